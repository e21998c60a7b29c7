#include "drens/ensemble.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <sstream>

using namespace drens;

namespace {

std::vector<EmbeddingResult> fake_results(Index n, Index dims = 2) {
  std::vector<EmbeddingResult> out;
  std::uint64_t seed = 1;
  for (Method m : kAllMethods) {
    EmbeddingResult r;
    r.method = m;
    r.scores = oracle::random_matrix(n, dims, seed++);
    out.push_back(r);
  }
  return out;
}

Labels alternating(Index n) {
  Labels y(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = static_cast<int>(i % 2);
  return y;
}

}  // namespace

TEST_CASE("ensemble sizes and column provenance") {
  const auto results = fake_results(10, 3);
  const Labels y = alternating(10);
  SUBCASE("large: 16 columns in canonical order") {
    const EnsembleMatrix e = build_ensemble(results, EnsembleSelection::large(), y);
    REQUIRE(e.x.cols() == 16);
    for (std::size_t m = 0; m < 8; ++m)
      for (int c = 0; c < 2; ++c) {
        const EnsembleColumn& col = e.columns[2 * m + static_cast<std::size_t>(c)];
        CHECK(col.method == kAllMethods[m]);
        CHECK(col.component == c + 1);
        CHECK(e.x.col(static_cast<Index>(2 * m) + c) == results[m].scores.col(c));
      }
  }
  SUBCASE("small: pca, mds, tsne") {
    const EnsembleMatrix e = build_ensemble(results, EnsembleSelection::small(), y);
    REQUIRE(e.x.cols() == 6);
    CHECK(e.columns[0].method == Method::pca);
    CHECK(e.columns[2].method == Method::mds);
    CHECK(e.columns[4].method == Method::tsne);
    CHECK(e.x.col(4) == results[7].scores.col(0));
  }
  SUBCASE("singleton and custom order") {
    const EnsembleMatrix one = build_ensemble(results, EnsembleSelection::custom({Method::le}), y);
    CHECK(one.x == results[6].scores.leftCols(2));
    const EnsembleMatrix two =
        build_ensemble(results, EnsembleSelection::custom({Method::tsne, Method::lle}), y);
    CHECK(two.columns[0].method == Method::lle);
    CHECK(two.x.cols() == 4);
  }
  SUBCASE("names") {
    CHECK(EnsembleSelection::large().name() == "large_ensemble");
    CHECK(EnsembleSelection::small().name() == "small_ensemble");
  }
}

TEST_CASE("ensemble errors") {
  auto results = fake_results(10);
  const Labels y = alternating(10);
  SUBCASE("missing method is named") {
    results.erase(results.begin() + 1);  // mds
    try {
      build_ensemble(results, EnsembleSelection::small(), y);
      FAIL("expected an exception");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("mds") != std::string::npos);
    }
  }
  SUBCASE("row mismatch") {
    results[3].scores = oracle::random_matrix(9, 2, 1);
    CHECK_THROWS_AS(build_ensemble(results, EnsembleSelection::large(), y), std::invalid_argument);
  }
  SUBCASE("fewer than two components") {
    results[0].scores = oracle::random_matrix(10, 1, 1);
    CHECK_THROWS_AS(build_ensemble(results, EnsembleSelection::small(), y), std::invalid_argument);
  }
}

TEST_CASE("ensemble csv") {
  const auto results = fake_results(3);
  std::ostringstream os;
  write_ensemble_csv(os, build_ensemble(results, EnsembleSelection::small(), Labels{0, 1, 1}));
  const std::string text = os.str();
  CHECK(text.rfind("pca_1,pca_2,mds_1,mds_2,tsne_1,tsne_2,outcome\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
}
