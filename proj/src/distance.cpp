#include "synphy/distance.hpp"

#include <sstream>

#include "synphy/error.hpp"

namespace synphy {

void DistanceMatrix::validate() const {
  const auto n = static_cast<Eigen::Index>(labels.size());
  if (entries.rows() != n || entries.cols() != n)
    throw Error("DistanceMatrix: entries do not match label count");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!entries(i, i).is_zero())
      throw Error("DistanceMatrix: nonzero diagonal at " + labels[i]);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (entries(i, j) != entries(j, i))
        throw Error("DistanceMatrix: asymmetric at (" + labels[i] + ", " +
                    labels[j] + ")");
      if (entries(i, j).sign() < 0)
        throw Error("DistanceMatrix: negative entry at (" + labels[i] + ", " +
                    labels[j] + ")");
    }
  }
}

long long hamming(std::span<const Cell> u, std::span<const Cell> v) {
  if (u.size() != v.size())
    throw Error("hamming: length mismatch (" + std::to_string(u.size()) +
                " vs " + std::to_string(v.size()) + ")");
  long long d = 0;
  for (size_t i = 0; i < u.size(); ++i) {
    if (u[i] == Cell::Unmapped || v[i] == Cell::Unmapped)
      throw Error("hamming: Unmapped cell at position " + std::to_string(i));
    if (u[i] != v[i]) ++d;
  }
  return d;
}

DistanceMatrix distance_matrix(const CharacterMatrix& m, MissingPolicy policy,
                               long long min_overlap) {
  const auto nl = static_cast<Eigen::Index>(m.n_languages());
  const auto np = static_cast<long long>(m.n_parameters());
  if (nl < 2) throw Error("distance_matrix: need at least 2 languages");
  if (np == 0) throw Error("distance_matrix: matrix has no columns");

  DistanceMatrix d;
  d.labels = m.languages();
  d.entries = RationalMatrix::Constant(nl, nl, Rational(0));

  for (Eigen::Index a = 0; a < nl; ++a) {
    auto ra = m.row(static_cast<size_t>(a));
    for (Eigen::Index b = a + 1; b < nl; ++b) {
      auto rb = m.row(static_cast<size_t>(b));
      long long mismatches = 0;
      Rational dist;
      if (policy == MissingPolicy::SharedOnly) {
        long long shared = 0;
        for (long long p = 0; p < np; ++p) {
          if (ra[p] == Cell::Unmapped || rb[p] == Cell::Unmapped) continue;
          ++shared;
          if (ra[p] != rb[p]) ++mismatches;
        }
        if (shared == 0 || shared < min_overlap)
          throw Error("distance_matrix: overlap " + std::to_string(shared) +
                      " below minimum " + std::to_string(min_overlap) +
                      " for pair (" + d.labels[a] + ", " + d.labels[b] + ")");
        dist = Rational(mismatches, shared);
      } else {
        const bool pad_mismatch = policy == MissingPolicy::PadAsMismatch;
        for (long long p = 0; p < np; ++p) {
          if (ra[p] == Cell::Unmapped || rb[p] == Cell::Unmapped) {
            if (pad_mismatch) ++mismatches;
          } else if (ra[p] != rb[p]) {
            ++mismatches;
          }
        }
        dist = Rational(mismatches, np);
      }
      d.entries(a, b) = dist;
      d.entries(b, a) = dist;
    }
  }
  return d;
}

namespace {

std::string pad_name(const std::string& name) {
  std::string s = name;
  for (char& c : s)
    if (c == ' ' || c == '\t') c = '_';
  if (s.size() < 10) s.resize(10, ' ');
  return s;
}

}  // namespace

std::string format_distance_matrix(const DistanceMatrix& d, bool lower_triangle,
                                   bool exact) {
  const auto n = static_cast<Eigen::Index>(d.labels.size());
  std::ostringstream os;
  os << n << "\n";
  for (Eigen::Index i = 0; i < n; ++i) {
    os << pad_name(d.labels[i]);
    const Eigen::Index cols = lower_triangle ? i : n;
    for (Eigen::Index j = 0; j < cols; ++j) {
      const Rational& v = d.entries(i, j);
      os << ' ' << (exact ? v.to_string() : v.to_decimal(6, false));
    }
    os << "\n";
  }
  return os.str();
}

DistanceMatrix parse_distance_matrix(std::string_view text) {
  std::istringstream is{std::string(text)};
  long long n = 0;
  if (!(is >> n) || n < 1)
    throw ParseError("distance matrix: missing or invalid taxon count", 1);

  std::vector<std::string> labels;
  std::vector<std::string> tokens;
  std::string tok;
  while (is >> tok) tokens.push_back(tok);

  const size_t square = static_cast<size_t>(n) * n + n;
  const size_t lower = static_cast<size_t>(n) * (n - 1) / 2 + n;
  bool is_square;
  if (tokens.size() == square) {
    is_square = true;
  } else if (tokens.size() == lower) {
    is_square = false;
  } else {
    throw ParseError("distance matrix: expected " + std::to_string(square) +
                         " (square) or " + std::to_string(lower) +
                         " (lower-triangle) tokens after the count, got " +
                         std::to_string(tokens.size()),
                     1);
  }

  DistanceMatrix d;
  d.entries = RationalMatrix::Constant(n, n, Rational(0));
  size_t t = 0;
  for (long long i = 0; i < n; ++i) {
    d.labels.push_back(tokens[t++]);
    const long long cols = is_square ? n : i;
    for (long long j = 0; j < cols; ++j) {
      Rational v;
      try {
        v = Rational::from_string(tokens[t]);
      } catch (const Error& e) {
        throw ParseError("distance matrix: bad entry '" + tokens[t] + "': " +
                             e.what(),
                         1);
      }
      ++t;
      d.entries(i, j) = v;
      if (!is_square) d.entries(j, i) = v;
    }
  }
  for (size_t i = 0; i < d.labels.size(); ++i)
    for (size_t j = i + 1; j < d.labels.size(); ++j)
      if (d.labels[i] == d.labels[j])
        throw ParseError("distance matrix: duplicate taxon '" + d.labels[i] + "'", 1);
  d.validate();
  return d;
}

}  // namespace synphy
