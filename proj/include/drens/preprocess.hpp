#pragma once

#include "drens/numcore.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace drens {

enum class ColumnKind { continuous, ordinal, binary, nominal, outcome };

std::string_view to_string(ColumnKind kind);
std::optional<ColumnKind> parse_column_kind(std::string_view text);

/// Missing, numeric, or a textual level (nominal columns only).
using Cell = std::variant<std::monostate, double, std::string>;

inline bool is_missing(const Cell& c) { return std::holds_alternative<std::monostate>(c); }

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::continuous;
  std::vector<Cell> cells;
};

/// Rectangular dataset with exactly one outcome column.
class DataTable {
 public:
  DataTable() = default;
  explicit DataTable(std::vector<Column> columns);

  Index rows() const { return rows_; }
  Index cols() const { return static_cast<Index>(columns_.size()); }
  const std::vector<Column>& columns() const { return columns_; }
  const Column& column(Index c) const { return columns_[static_cast<std::size_t>(c)]; }
  Index outcome_index() const { return outcome_; }
  const Column& outcome() const { return column(outcome_); }
  Index predictor_count() const { return cols() - 1; }
  bool has_missing() const;

 private:
  std::vector<Column> columns_;
  Index rows_ = 0;
  Index outcome_ = -1;
};

using Labels = std::vector<int>;

struct ColumnProvenance {
  std::string name;
  ColumnKind kind = ColumnKind::continuous;
  std::string encoding;             // "identity" or "nominal_codes"
  std::vector<std::string> levels;  // code -> original label, nominal only
};

/// Numeric predictors plus a {0,1} outcome.
struct FeatureMatrix {
  Matrix x;
  Labels y;
  std::vector<ColumnProvenance> columns;

  Index rows() const { return x.rows(); }
  Index cols() const { return x.cols(); }
};

/// Drops rows holding any missing cell; order preserved.
DataTable complete_cases(const DataTable& t);

/// Numeric pass-through for ordered kinds, first-appearance integer codes for
/// nominal columns.
FeatureMatrix encode(const DataTable& t);

/// Original label of an encoded cell, recovered from the provenance.
std::string decode_label(const FeatureMatrix& m, Index row, Index col);

/// Column-wise z-scores with sample standard deviation; constant columns -> 0.
FeatureMatrix standardize(const FeatureMatrix& m);

/// Shortest text that parses back to exactly `v`.
std::string format_number(double v);

}  // namespace drens
