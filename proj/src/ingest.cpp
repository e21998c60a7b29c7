#include "drens/ingest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace drens {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> parse_double(std::string_view text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) return std::nullopt;
  return v;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

[[noreturn]] void cell_error(const char* who, std::size_t row, std::size_t col, std::string_view what) {
  std::ostringstream os;
  os << who << ": row " << row << ", column " << col << ": " << what;
  throw std::invalid_argument(os.str());
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

constexpr std::array<const char*, 9> kBreastCancerFeatures = {
    "clump_thickness",  "uniformity_cell_size", "uniformity_cell_shape",
    "marginal_adhesion", "single_epithelial_cell_size", "bare_nuclei",
    "bland_chromatin",  "normal_nucleoli",      "mitoses"};

struct DrugFeature {
  const char* name;
  ColumnKind kind;
};

constexpr std::array<DrugFeature, 12> kDrugFeatures = {{
    {"age", ColumnKind::ordinal},        {"gender", ColumnKind::binary},
    {"education", ColumnKind::ordinal},  {"country", ColumnKind::continuous},
    {"ethnicity", ColumnKind::continuous}, {"nscore", ColumnKind::continuous},
    {"escore", ColumnKind::continuous},  {"oscore", ColumnKind::continuous},
    {"ascore", ColumnKind::continuous},  {"cscore", ColumnKind::continuous},
    {"impulsive", ColumnKind::continuous}, {"ss", ColumnKind::continuous},
}};

constexpr std::array<const char*, 19> kDrugUsage = {
    "alcohol", "amphet", "amyl", "benzos", "caff", "cannabis", "choc",
    "coke", "crack", "ecstasy", "heroin", "ketamine", "legalh", "lsd",
    "meth", "mushrooms", "nicotine", "semer", "vsa"};

const char* usage_column(Substance s) {
  switch (s) {
    case Substance::cocaine: return "coke";
    case Substance::crack: return "crack";
    case Substance::heroin: return "heroin";
  }
  return "coke";
}

}  // namespace

std::string_view to_string(Substance s) {
  switch (s) {
    case Substance::cocaine: return "cocaine";
    case Substance::crack: return "crack";
    case Substance::heroin: return "heroin";
  }
  return "cocaine";
}

std::optional<Substance> parse_substance(std::string_view text) {
  for (auto s : {Substance::cocaine, Substance::crack, Substance::heroin})
    if (text == to_string(s)) return s;
  return std::nullopt;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  out.push_back(std::move(field));
  return out;
}

DataTable parse_breast_cancer(std::istream& in) {
  std::vector<Column> cols;
  for (const char* name : kBreastCancerFeatures) cols.push_back({name, ColumnKind::ordinal, {}});
  cols.push_back({"malignant", ColumnKind::outcome, {}});

  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto fields = split_csv_line(line);
    if (fields.size() != 11) {
      std::ostringstream os;
      os << "load_breast_cancer: row " << row << " has " << fields.size() << " columns, expected 11";
      throw std::invalid_argument(os.str());
    }
    for (std::size_t c = 1; c <= 9; ++c) {
      const std::string text = trim(fields[c]);
      if (text == "?") {
        cols[c - 1].cells.emplace_back(std::monostate{});
        continue;
      }
      const auto v = parse_double(text);
      if (!v) cell_error("load_breast_cancer", row, c + 1, "unparseable value '" + text + "'");
      cols[c - 1].cells.emplace_back(*v);
    }
    const std::string cls = trim(fields[10]);
    if (cls == "2")
      cols[9].cells.emplace_back(0.0);
    else if (cls == "4")
      cols[9].cells.emplace_back(1.0);
    else
      cell_error("load_breast_cancer", row, 11, "class must be 2 or 4, got '" + cls + "'");
  }
  return complete_cases(DataTable(std::move(cols)));
}

DataTable load_breast_cancer(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_breast_cancer(in);
}

DataTable parse_drug(std::istream& in, Substance substance) {
  constexpr std::size_t kColumns = 1 + kDrugFeatures.size() + kDrugUsage.size();
  std::vector<Column> cols;
  for (const auto& f : kDrugFeatures) cols.push_back({f.name, f.kind, {}});
  cols.push_back({std::string("uses_") + std::string(to_string(substance)), ColumnKind::outcome, {}});

  std::array<std::size_t, 12> feature_at{};
  for (std::size_t i = 0; i < feature_at.size(); ++i) feature_at[i] = 1 + i;
  std::size_t usage_at = 1 + kDrugFeatures.size() +
                         static_cast<std::size_t>(std::find_if(kDrugUsage.begin(), kDrugUsage.end(),
                                                               [&](const char* n) {
                                                                 return std::string_view(n) == usage_column(substance);
                                                               }) -
                                                  kDrugUsage.begin());

  std::string line;
  std::size_t row = 0;
  bool first = true;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    for (auto& f : fields) f = trim(f);
    if (first) {
      first = false;
      if (!parse_double(fields[0])) {
        // Header row: locate columns by name.
        auto find = [&](std::string_view name) {
          for (std::size_t c = 0; c < fields.size(); ++c)
            if (lower(fields[c]) == name) return c;
          throw std::invalid_argument("load_drug: header lacks column '" + std::string(name) + "'");
        };
        for (std::size_t i = 0; i < kDrugFeatures.size(); ++i) feature_at[i] = find(kDrugFeatures[i].name);
        usage_at = find(usage_column(substance));
        continue;
      }
    }
    ++row;
    if (fields.size() != kColumns) {
      std::ostringstream os;
      os << "load_drug: row " << row << " has " << fields.size() << " columns, expected " << kColumns;
      throw std::invalid_argument(os.str());
    }
    for (std::size_t i = 0; i < kDrugFeatures.size(); ++i) {
      const auto v = parse_double(fields[feature_at[i]]);
      if (!v) cell_error("load_drug", row, feature_at[i] + 1, "unparseable value '" + fields[feature_at[i]] + "'");
      cols[i].cells.emplace_back(*v);
    }
    const std::string& code = fields[usage_at];
    if (code.size() != 3 || code[0] != 'C' || code[1] != 'L' || code[2] < '0' || code[2] > '6')
      cell_error("load_drug", row, usage_at + 1, "unknown usage class '" + code + "'");
    cols.back().cells.emplace_back(code == "CL0" ? 0.0 : 1.0);
  }
  return DataTable(std::move(cols));
}

DataTable load_drug(const std::filesystem::path& path, Substance substance) {
  auto in = open_input(path);
  return parse_drug(in, substance);
}

DataTable load_dataset(const DatasetSpec& spec) {
  switch (spec.name) {
    case DatasetName::breast_cancer: return load_breast_cancer(spec.path);
    case DatasetName::drug: return load_drug(spec.path, spec.substance);
  }
  throw std::invalid_argument("load_dataset: unknown dataset");
}

void write_table_csv(std::ostream& os, const DataTable& t) {
  for (Index c = 0; c < t.cols(); ++c) {
    if (c > 0) os << ',';
    os << quote_if_needed(t.column(c).name + ":" + std::string(to_string(t.column(c).kind)));
  }
  os << '\n';
  for (Index r = 0; r < t.rows(); ++r) {
    for (Index c = 0; c < t.cols(); ++c) {
      if (c > 0) os << ',';
      const Cell& cell = t.column(c).cells[static_cast<std::size_t>(r)];
      if (const auto* v = std::get_if<double>(&cell))
        os << format_number(*v);
      else if (const auto* s = std::get_if<std::string>(&cell))
        os << quote_if_needed(*s);
    }
    os << '\n';
  }
}

DataTable read_table_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("read_table_csv: empty input");
  std::vector<Column> cols;
  for (const auto& field : split_csv_line(line)) {
    const auto colon = field.rfind(':');
    const auto kind = colon == std::string::npos ? std::nullopt
                                                  : parse_column_kind(std::string_view(field).substr(colon + 1));
    if (!kind)
      throw std::invalid_argument("read_table_csv: header cell '" + field +
                                  "' is not of the form name:kind");
    cols.push_back({field.substr(0, colon), *kind, {}});
  }
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    ++row;
    const auto fields = split_csv_line(line);
    if (fields.size() != cols.size()) {
      std::ostringstream os;
      os << "read_table_csv: row " << row << " has " << fields.size() << " cells, expected "
         << cols.size();
      throw std::invalid_argument(os.str());
    }
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const std::string& text = fields[c];
      if (text.empty()) {
        cols[c].cells.emplace_back(std::monostate{});
      } else if (const auto v = parse_double(text)) {
        cols[c].cells.emplace_back(*v);
      } else if (cols[c].kind == ColumnKind::nominal) {
        cols[c].cells.emplace_back(text);
      } else {
        cell_error("read_table_csv", row, c + 1, "unparseable value '" + text + "'");
      }
    }
  }
  return DataTable(std::move(cols));
}

DataTable read_table_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_table_csv(in);
}

}  // namespace drens
