#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "synphy/rational.hpp"

namespace synphy {

/// State of one (language, parameter) cell. Unmapped is an explicit third
/// state: a missing record is never silently coerced to 0.
enum class Cell : std::uint8_t { Zero = 0, One = 1, Unmapped = 2 };

/// Languages x binary syntactic parameters, with explicit missing cells.
/// Immutable after construction; row and column order is first appearance
/// in the source text.
class CharacterMatrix {
 public:
  CharacterMatrix() = default;
  CharacterMatrix(std::vector<std::string> languages,
                  std::vector<std::string> parameters,
                  std::vector<Cell> cells);  // row-major, |langs| * |params|

  /// Pipe-separated lines "language|property|value"; value is 0/1/yes/no
  /// (case-insensitive). An optional header line naming the three fields is
  /// skipped. Conflicting duplicate records are an error, exact duplicates
  /// are tolerated.
  static CharacterMatrix parse_csv(std::string_view text);

  /// {"language": {"parameter": 0|1, ...}, ...}. Key order is preserved.
  static CharacterMatrix parse_json(std::string_view text);

  /// Sniffs the format: leading '{' means JSON, anything else CSV.
  static CharacterMatrix parse_auto(std::string_view text);

  /// Canonical serializations; Unmapped cells are omitted. A language whose
  /// row is entirely unmapped cannot be represented in the CSV form (JSON
  /// keeps it as an empty object).
  std::string to_csv() const;
  std::string to_json() const;

  std::size_t n_languages() const { return languages_.size(); }
  std::size_t n_parameters() const { return parameters_.size(); }
  const std::vector<std::string>& languages() const { return languages_; }
  const std::vector<std::string>& parameters() const { return parameters_; }

  Cell at(std::size_t lang, std::size_t param) const {
    return cells_[lang * parameters_.size() + param];
  }
  bool has_language(const std::string& lang) const;
  std::size_t language_index(const std::string& lang) const;  // Error if absent

  /// Row for one language, in parameter order.
  std::span<const Cell> row(std::size_t lang) const;

  /// Rows reordered to `langs` (which must all exist); columns unchanged.
  CharacterMatrix restricted(std::span<const std::string> langs) const;

  /// Keeps exactly the columns with no Unmapped cell; order preserved.
  /// May return a matrix with zero columns.
  CharacterMatrix fully_mapped() const;

  /// Mapped fraction of one language's row: (#mapped cells) / (#parameters).
  Rational coverage(const std::string& lang) const;

  bool operator==(const CharacterMatrix& o) const = default;

 private:
  std::vector<std::string> languages_, parameters_;
  std::vector<Cell> cells_;
  std::unordered_map<std::string, std::size_t> lang_index_;

  void index_languages();
};

}  // namespace synphy
