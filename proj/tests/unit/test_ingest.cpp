#include "drens/ingest.hpp"

#include <doctest.h>

#include <filesystem>
#include <sstream>

using namespace drens;

namespace {

const std::filesystem::path kBreastCancer = std::filesystem::path(DRENS_DATA_DIR) / "breast-cancer-wisconsin.data";
const std::filesystem::path kDrugFixture = std::filesystem::path(DRENS_TEST_DATA_DIR) / "drug_fixture.data";

int positives(const DataTable& t) {
  int count = 0;
  for (const auto& c : t.outcome().cells) count += std::get<double>(c) == 1.0 ? 1 : 0;
  return count;
}

std::string drug_row(const std::string& coke) {
  std::string row = "1";
  for (int i = 0; i < 12; ++i) row += ",0.5";
  for (int u = 0; u < 19; ++u) row += "," + (u == 7 ? coke : std::string("CL0"));
  return row + "\n";
}

}  // namespace

TEST_CASE("breast cancer file") {
  const DataTable t = load_breast_cancer(kBreastCancer);
  CHECK(t.rows() == 683);
  CHECK(t.predictor_count() == 9);
  CHECK(positives(t) == 239);
  CHECK(t.outcome().name == "malignant");
  CHECK(t.column(1).name == "uniformity_cell_size");
  CHECK(t.column(5).name == "bare_nuclei");
  CHECK_FALSE(t.has_missing());
}

TEST_CASE("breast cancer parsing errors") {
  SUBCASE("wrong column count") {
    std::istringstream in("1000025,5,1,1,1,2,1,3,1,1\n");
    CHECK_THROWS_AS(parse_breast_cancer(in), std::invalid_argument);
  }
  SUBCASE("bad cell names row and column") {
    std::istringstream in("1000025,5,1,1,1,2,1,3,1,1,2\n1002945,5,4,x,5,7,10,3,2,1,2\n");
    try {
      parse_breast_cancer(in);
      FAIL("expected an exception");
    } catch (const std::invalid_argument& e) {
      const std::string msg = e.what();
      CHECK(msg.find("row 2") != std::string::npos);
      CHECK(msg.find("column 4") != std::string::npos);
    }
  }
  SUBCASE("question marks are missing and dropped") {
    std::istringstream in("1,5,1,1,1,2,?,3,1,1,2\n2,5,4,4,5,7,10,3,2,1,4\n3,3,1,1,1,2,2,3,1,1,2\n");
    const DataTable t = parse_breast_cancer(in);
    CHECK(t.rows() == 2);
    CHECK(positives(t) == 1);
  }
}

TEST_CASE("drug schema fixture") {
  // Counts of non-CL0 codes in the fixture, tallied independently with awk.
  CHECK(positives(load_drug(kDrugFixture, Substance::cocaine)) == 23);
  CHECK(positives(load_drug(kDrugFixture, Substance::crack)) == 16);
  CHECK(positives(load_drug(kDrugFixture, Substance::heroin)) == 8);
  const DataTable t = load_drug(kDrugFixture, Substance::crack);
  CHECK(t.rows() == 40);
  CHECK(t.predictor_count() == 12);
  CHECK(t.outcome().name == "uses_crack");
  CHECK(encode(t).cols() == 12);
}

TEST_CASE("drug parsing") {
  SUBCASE("optional header locates columns by name") {
    std::string header = "ID,Age,Gender,Education,Country,Ethnicity,Nscore,Escore,Oscore,AScore,Cscore,Impulsive,SS";
    for (const char* d : {"Alcohol", "Amphet", "Amyl", "Benzos", "Caff", "Cannabis", "Choc", "Coke", "Crack",
                          "Ecstasy", "Heroin", "Ketamine", "Legalh", "LSD", "Meth", "Mushrooms", "Nicotine",
                          "Semer", "VSA"})
      header += std::string(",") + d;
    std::istringstream in(header + "\n" + drug_row("CL3") + drug_row("CL0"));
    const DataTable t = parse_drug(in, Substance::cocaine);
    CHECK(t.rows() == 2);
    CHECK(positives(t) == 1);
  }
  SUBCASE("unknown usage class rejected") {
    std::istringstream in(drug_row("CL7"));
    CHECK_THROWS_AS(parse_drug(in, Substance::cocaine), std::invalid_argument);
  }
  SUBCASE("wrong column count rejected") {
    std::istringstream in("1,2,3\n");
    CHECK_THROWS_AS(parse_drug(in, Substance::heroin), std::invalid_argument);
  }
  SUBCASE("substance names") {
    CHECK(parse_substance("crack") == Substance::crack);
    CHECK_FALSE(parse_substance("semer").has_value());
  }
}

TEST_CASE("table csv round-trips bit-exactly") {
  std::vector<Column> cols;
  cols.push_back({"x", ColumnKind::continuous, {Cell{0.1}, Cell{1.0 / 3.0}, Cell{}, Cell{-7e-300}}});
  cols.push_back({"site, name", ColumnKind::nominal,
                  {Cell{std::string("a \"quoted\" level")}, Cell{std::string("b")}, Cell{std::string("a")}, Cell{}}});
  cols.push_back({"y", ColumnKind::outcome, {Cell{0.0}, Cell{1.0}, Cell{1.0}, Cell{0.0}}});
  const DataTable t(cols);
  std::ostringstream out;
  write_table_csv(out, t);
  std::istringstream in(out.str());
  const DataTable back = read_table_csv(in);
  REQUIRE(back.cols() == 3);
  REQUIRE(back.rows() == 4);
  for (Index c = 0; c < 3; ++c) {
    CHECK(back.column(c).name == t.column(c).name);
    CHECK(back.column(c).kind == t.column(c).kind);
    CHECK(back.column(c).cells == t.column(c).cells);
  }
  std::ostringstream again;
  write_table_csv(again, back);
  CHECK(again.str() == out.str());

  const DataTable bc = load_breast_cancer(kBreastCancer);
  std::ostringstream bc_out;
  write_table_csv(bc_out, bc);
  std::istringstream bc_in(bc_out.str());
  std::ostringstream bc_again;
  write_table_csv(bc_again, read_table_csv(bc_in));
  CHECK(bc_again.str() == bc_out.str());
}

TEST_CASE("csv splitting") {
  CHECK(split_csv_line("a,\"b,c\",\"d\"\"e\",") == std::vector<std::string>{"a", "b,c", "d\"e", ""});
}

TEST_CASE("load_dataset dispatch and missing files") {
  DatasetSpec spec;
  spec.name = DatasetName::drug;
  spec.path = kDrugFixture;
  spec.substance = Substance::heroin;
  CHECK(load_dataset(spec).outcome().name == "uses_heroin");
  spec.path = "/nonexistent/drug.data";
  try {
    load_dataset(spec);
    FAIL("expected an exception");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("/nonexistent/drug.data") != std::string::npos);
  }
}
