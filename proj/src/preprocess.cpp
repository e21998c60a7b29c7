#include "drens/preprocess.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace drens {

std::string_view to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::continuous: return "continuous";
    case ColumnKind::ordinal: return "ordinal";
    case ColumnKind::binary: return "binary";
    case ColumnKind::nominal: return "nominal";
    case ColumnKind::outcome: return "outcome";
  }
  return "continuous";
}

std::optional<ColumnKind> parse_column_kind(std::string_view text) {
  for (auto k : {ColumnKind::continuous, ColumnKind::ordinal, ColumnKind::binary,
                 ColumnKind::nominal, ColumnKind::outcome})
    if (text == to_string(k)) return k;
  return std::nullopt;
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

DataTable::DataTable(std::vector<Column> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) throw std::invalid_argument("DataTable: no columns");
  rows_ = static_cast<Index>(columns_.front().cells.size());
  for (Index c = 0; c < cols(); ++c) {
    const Column& col = column(c);
    if (static_cast<Index>(col.cells.size()) != rows_)
      throw std::invalid_argument("DataTable: column '" + col.name + "' has a different length");
    if (col.kind == ColumnKind::outcome) {
      if (outcome_ >= 0) throw std::invalid_argument("DataTable: more than one outcome column");
      outcome_ = c;
    }
    for (std::size_t r = 0; r < col.cells.size(); ++r) {
      const Cell& cell = col.cells[r];
      if (const double* v = std::get_if<double>(&cell); v && !std::isfinite(*v)) {
        std::ostringstream os;
        os << "DataTable: non-finite value in column '" << col.name << "' row " << r;
        throw std::invalid_argument(os.str());
      }
      if (std::holds_alternative<std::string>(cell) && col.kind != ColumnKind::nominal) {
        std::ostringstream os;
        os << "DataTable: text value in non-nominal column '" << col.name << "' row " << r;
        throw std::invalid_argument(os.str());
      }
    }
  }
  if (outcome_ < 0) throw std::invalid_argument("DataTable: no outcome column");
}

bool DataTable::has_missing() const {
  for (const auto& col : columns_)
    if (std::any_of(col.cells.begin(), col.cells.end(), is_missing)) return true;
  return false;
}

DataTable complete_cases(const DataTable& t) {
  std::vector<bool> keep(static_cast<std::size_t>(t.rows()), true);
  for (const auto& col : t.columns())
    for (std::size_t r = 0; r < col.cells.size(); ++r)
      if (is_missing(col.cells[r])) keep[r] = false;
  if (std::none_of(keep.begin(), keep.end(), [](bool b) { return b; }))
    throw std::invalid_argument("complete_cases: every row has a missing cell");

  std::vector<Column> out;
  out.reserve(t.columns().size());
  for (const auto& col : t.columns()) {
    Column c{col.name, col.kind, {}};
    for (std::size_t r = 0; r < col.cells.size(); ++r)
      if (keep[r]) c.cells.push_back(col.cells[r]);
    out.push_back(std::move(c));
  }
  return DataTable(std::move(out));
}

namespace {

std::string level_key(const Cell& cell) {
  if (const auto* s = std::get_if<std::string>(&cell)) return *s;
  return format_number(std::get<double>(cell));
}

}  // namespace

FeatureMatrix encode(const DataTable& t) {
  if (t.has_missing()) throw std::invalid_argument("encode: table has missing cells");
  const Index n = t.rows();
  FeatureMatrix m;
  m.x.resize(n, t.predictor_count());
  m.y.resize(static_cast<std::size_t>(n));

  Index out_col = 0;
  for (Index c = 0; c < t.cols(); ++c) {
    const Column& col = t.column(c);
    if (col.kind == ColumnKind::outcome) {
      int seen[2] = {0, 0};
      for (Index r = 0; r < n; ++r) {
        const double* v = std::get_if<double>(&col.cells[static_cast<std::size_t>(r)]);
        if (!v || (*v != 0.0 && *v != 1.0))
          throw std::invalid_argument("encode: outcome values must be 0 or 1");
        m.y[static_cast<std::size_t>(r)] = static_cast<int>(*v);
        ++seen[static_cast<int>(*v)];
      }
      if (seen[0] == 0 || seen[1] == 0)
        throw std::invalid_argument("encode: outcome is constant");
      continue;
    }
    ColumnProvenance prov{col.name, col.kind, "identity", {}};
    if (col.kind == ColumnKind::nominal) {
      prov.encoding = "nominal_codes";
      std::map<std::string, int> codes;
      for (Index r = 0; r < n; ++r) {
        const std::string key = level_key(col.cells[static_cast<std::size_t>(r)]);
        auto [it, inserted] = codes.try_emplace(key, static_cast<int>(prov.levels.size()));
        if (inserted) prov.levels.push_back(key);
        m.x(r, out_col) = it->second;
      }
    } else {
      for (Index r = 0; r < n; ++r) m.x(r, out_col) = std::get<double>(col.cells[static_cast<std::size_t>(r)]);
    }
    m.columns.push_back(std::move(prov));
    ++out_col;
  }
  return m;
}

std::string decode_label(const FeatureMatrix& m, Index row, Index col) {
  const auto& prov = m.columns.at(static_cast<std::size_t>(col));
  const double v = m.x(row, col);
  if (prov.encoding == "nominal_codes") return prov.levels.at(static_cast<std::size_t>(v));
  return format_number(v);
}

FeatureMatrix standardize(const FeatureMatrix& m) {
  FeatureMatrix out = m;
  const Index n = m.rows();
  for (Index c = 0; c < m.cols(); ++c) {
    auto col = out.x.col(c);
    const double mean = col.mean();
    col.array() -= mean;
    const double sd = n > 1 ? std::sqrt(col.squaredNorm() / static_cast<double>(n - 1)) : 0.0;
    if (sd <= 1e-12 * std::max(1.0, std::abs(mean)))
      col.setZero();
    else
      col /= sd;
  }
  return out;
}

}  // namespace drens
