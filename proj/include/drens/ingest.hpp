#pragma once

// Loaders for the two UCI medical datasets plus the normalized table CSV
// used for every dataset this project writes.

#include "drens/preprocess.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace drens {

enum class Substance { cocaine, crack, heroin };

std::string_view to_string(Substance s);
std::optional<Substance> parse_substance(std::string_view text);

enum class DatasetName { breast_cancer, drug };

struct DatasetSpec {
  DatasetName name = DatasetName::breast_cancer;
  std::filesystem::path path;
  Substance substance = Substance::cocaine;  // drug only
};

/// Wisconsin (original): id, 9 cytology scores, class (2 benign / 4 malignant),
/// "?" for missing. Returns complete cases with outcome `malignant`.
DataTable load_breast_cancer(const std::filesystem::path& path);
DataTable parse_breast_cancer(std::istream& in);

/// Drug consumption (quantified): id, 12 features, 19 usage columns coded
/// CL0..CL6. Outcome = 1 unless the substance column is CL0. A header row
/// is optional.
DataTable load_drug(const std::filesystem::path& path, Substance substance);
DataTable parse_drug(std::istream& in, Substance substance);

DataTable load_dataset(const DatasetSpec& spec);

/// Header row of `name:kind`, one row per record, empty cells for missing.
void write_table_csv(std::ostream& os, const DataTable& t);
DataTable read_table_csv(std::istream& in);
DataTable read_table_csv(const std::filesystem::path& path);

/// One RFC-4180 record; quotes are honoured, embedded newlines are not.
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace drens
