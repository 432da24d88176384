#include "synphy/charmatrix.hpp"

#include <algorithm>
#include <cctype>

#include <json.hpp>

#include "synphy/error.hpp"

namespace synphy {

namespace {

std::string trim(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  size_t e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

// 0/1/yes/no, case-insensitive
Cell parse_value(const std::string& raw, size_t line) {
  std::string v = lower(trim(raw));
  if (v == "0" || v == "no") return Cell::Zero;
  if (v == "1" || v == "yes") return Cell::One;
  throw ParseError("line " + std::to_string(line) + ": invalid value '" +
                       trim(raw) + "' (expected 0, 1, yes, or no)",
                   line);
}

struct Builder {
  std::vector<std::string> langs, params;
  std::unordered_map<std::string, size_t> lang_idx, param_idx;
  // sparse store until dimensions are known
  std::unordered_map<std::uint64_t, Cell> sparse;

  size_t lang(const std::string& name) {
    auto [it, fresh] = lang_idx.try_emplace(name, langs.size());
    if (fresh) langs.push_back(name);
    return it->second;
  }
  size_t param(const std::string& name) {
    auto [it, fresh] = param_idx.try_emplace(name, params.size());
    if (fresh) params.push_back(name);
    return it->second;
  }

  void set(size_t li, size_t pi, Cell v, size_t line) {
    std::uint64_t key = (static_cast<std::uint64_t>(li) << 32) | pi;
    auto [it, fresh] = sparse.try_emplace(key, v);
    if (!fresh && it->second != v) {
      throw ParseError("line " + std::to_string(line) +
                           ": conflicting duplicate record for (" + langs[li] +
                           ", " + params[pi] + ")",
                       line);
    }
  }

  CharacterMatrix finish() const {
    std::vector<Cell> cells(langs.size() * params.size(), Cell::Unmapped);
    for (const auto& [key, v] : sparse) {
      size_t li = key >> 32, pi = key & 0xFFFFFFFFu;
      cells[li * params.size() + pi] = v;
    }
    return CharacterMatrix(langs, params, std::move(cells));
  }
};

}  // namespace

CharacterMatrix::CharacterMatrix(std::vector<std::string> languages,
                                 std::vector<std::string> parameters,
                                 std::vector<Cell> cells)
    : languages_(std::move(languages)),
      parameters_(std::move(parameters)),
      cells_(std::move(cells)) {
  if (cells_.size() != languages_.size() * parameters_.size())
    throw Error("CharacterMatrix: grid does not match dimensions");
  index_languages();
  if (lang_index_.size() != languages_.size())
    throw Error("CharacterMatrix: duplicate language identifier");
  std::unordered_map<std::string, size_t> pidx;
  for (size_t i = 0; i < parameters_.size(); ++i) {
    if (parameters_[i].empty())
      throw Error("CharacterMatrix: empty parameter identifier");
    if (!pidx.try_emplace(parameters_[i], i).second)
      throw Error("CharacterMatrix: duplicate parameter identifier '" +
                  parameters_[i] + "'");
  }
  for (const auto& l : languages_)
    if (l.empty()) throw Error("CharacterMatrix: empty language identifier");
}

void CharacterMatrix::index_languages() {
  lang_index_.clear();
  for (size_t i = 0; i < languages_.size(); ++i)
    lang_index_.try_emplace(languages_[i], i);
}

CharacterMatrix CharacterMatrix::parse_csv(std::string_view text) {
  Builder b;
  size_t line_no = 0;
  size_t pos = 0;
  bool saw_data = false;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;

    std::vector<std::string> fields;
    size_t fpos = 0;
    while (true) {
      size_t bar = line.find('|', fpos);
      if (bar == std::string_view::npos) {
        fields.push_back(trim(line.substr(fpos)));
        break;
      }
      fields.push_back(trim(line.substr(fpos, bar - fpos)));
      fpos = bar + 1;
    }
    if (fields.size() != 3)
      throw ParseError("line " + std::to_string(line_no) + ": expected 3 '|'-separated fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    // optional header, detected by the literal field names
    if (!saw_data && lower(fields[0]) == "language" &&
        lower(fields[1]) == "property" && lower(fields[2]) == "value") {
      continue;
    }
    if (fields[0].empty() || fields[1].empty())
      throw ParseError("line " + std::to_string(line_no) + ": empty identifier", line_no);
    saw_data = true;
    Cell v = parse_value(fields[2], line_no);
    size_t li = b.lang(fields[0]);
    size_t pi = b.param(fields[1]);
    b.set(li, pi, v, line_no);
  }
  if (!saw_data) throw ParseError("empty character data", 0);
  return b.finish();
}

CharacterMatrix CharacterMatrix::parse_json(std::string_view text) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("JSON: ") + e.what(), 0);
  }
  if (!doc.is_object())
    throw ParseError("JSON: top level must be an object mapping languages", 0);
  if (doc.empty()) throw ParseError("empty character data", 0);

  Builder b;
  for (const auto& [lang_raw, entry] : doc.items()) {
    std::string lang = trim(lang_raw);
    if (lang.empty()) throw ParseError("JSON: empty language name", 0);
    size_t li = b.lang(lang);
    if (!entry.is_object())
      throw ParseError("JSON: value for '" + lang + "' must be an object", 0);
    for (const auto& [param_raw, val] : entry.items()) {
      std::string param = trim(param_raw);
      if (param.empty())
        throw ParseError("JSON: empty parameter name under '" + lang + "'", 0);
      Cell c;
      if (val.is_number_integer() && (val == 0 || val == 1)) {
        c = val == 0 ? Cell::Zero : Cell::One;
      } else {
        throw ParseError("JSON: value at " + lang + "/" + param +
                             " must be 0 or 1",
                         0);
      }
      b.set(li, b.param(param), c, 0);
    }
  }
  return b.finish();
}

CharacterMatrix CharacterMatrix::parse_auto(std::string_view text) {
  size_t b = text.find_first_not_of(" \t\r\n");
  if (b != std::string_view::npos && text[b] == '{') return parse_json(text);
  return parse_csv(text);
}

std::string CharacterMatrix::to_csv() const {
  std::string out;
  for (size_t li = 0; li < languages_.size(); ++li) {
    for (size_t pi = 0; pi < parameters_.size(); ++pi) {
      Cell c = at(li, pi);
      if (c == Cell::Unmapped) continue;
      out += languages_[li];
      out += '|';
      out += parameters_[pi];
      out += '|';
      out += c == Cell::One ? '1' : '0';
      out += '\n';
    }
  }
  return out;
}

std::string CharacterMatrix::to_json() const {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (size_t li = 0; li < languages_.size(); ++li) {
    nlohmann::ordered_json row = nlohmann::ordered_json::object();
    for (size_t pi = 0; pi < parameters_.size(); ++pi) {
      Cell c = at(li, pi);
      if (c == Cell::Unmapped) continue;
      row[parameters_[pi]] = c == Cell::One ? 1 : 0;
    }
    doc[languages_[li]] = std::move(row);
  }
  return doc.dump(2) + "\n";
}

bool CharacterMatrix::has_language(const std::string& lang) const {
  return lang_index_.contains(lang);
}

std::size_t CharacterMatrix::language_index(const std::string& lang) const {
  auto it = lang_index_.find(lang);
  if (it == lang_index_.end()) throw Error("unknown language '" + lang + "'");
  return it->second;
}

std::span<const Cell> CharacterMatrix::row(std::size_t lang) const {
  return {cells_.data() + lang * parameters_.size(), parameters_.size()};
}

CharacterMatrix CharacterMatrix::restricted(
    std::span<const std::string> langs) const {
  std::vector<std::string> new_langs;
  std::vector<Cell> new_cells;
  new_cells.reserve(langs.size() * parameters_.size());
  for (const auto& l : langs) {
    size_t li = language_index(l);
    new_langs.push_back(l);
    auto r = row(li);
    new_cells.insert(new_cells.end(), r.begin(), r.end());
  }
  return CharacterMatrix(std::move(new_langs), parameters_, std::move(new_cells));
}

CharacterMatrix CharacterMatrix::fully_mapped() const {
  std::vector<size_t> keep;
  for (size_t pi = 0; pi < parameters_.size(); ++pi) {
    bool full = true;
    for (size_t li = 0; li < languages_.size() && full; ++li)
      full = at(li, pi) != Cell::Unmapped;
    if (full) keep.push_back(pi);
  }
  std::vector<std::string> new_params;
  new_params.reserve(keep.size());
  for (size_t pi : keep) new_params.push_back(parameters_[pi]);
  std::vector<Cell> new_cells;
  new_cells.reserve(languages_.size() * keep.size());
  for (size_t li = 0; li < languages_.size(); ++li)
    for (size_t pi : keep) new_cells.push_back(at(li, pi));
  return CharacterMatrix(languages_, std::move(new_params), std::move(new_cells));
}

Rational CharacterMatrix::coverage(const std::string& lang) const {
  size_t li = language_index(lang);
  if (parameters_.empty()) return Rational(0);
  long long mapped = 0;
  for (Cell c : row(li))
    if (c != Cell::Unmapped) ++mapped;
  return Rational(mapped, static_cast<long long>(parameters_.size()));
}

}  // namespace synphy
