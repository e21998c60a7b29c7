#include "drens/numcore.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <limits>
#include <numeric>

using namespace drens;

namespace {

double residual(const Matrix& a, const EigenPairs& p) {
  double worst = 0.0;
  for (Index c = 0; c < p.values.size(); ++c)
    worst = std::max(worst, (a * p.vectors.col(c) - p.values[c] * p.vectors.col(c)).cwiseAbs().maxCoeff());
  return worst;
}

NeighborGraph graph_from_weights(const Matrix& w) {
  NeighborGraph g;
  g.symmetric = true;
  g.adjacency.resize(static_cast<std::size_t>(w.rows()));
  for (Index i = 0; i < w.rows(); ++i)
    for (Index j = i + 1; j < w.rows(); ++j)
      if (std::isfinite(w(i, j))) g.add_edge(i, j, w(i, j));
  return g;
}

}  // namespace

TEST_CASE("pairwise distances") {
  SUBCASE("single point") {
    const Matrix x = Matrix::Constant(1, 3, 2.0);
    const DistanceMatrix d = pairwise_distances(x);
    CHECK(d.size() == 1);
    CHECK(d(0, 0) == 0.0);
  }
  SUBCASE("3-4-5") {
    Matrix x(2, 2);
    x << 0, 0, 3, 4;
    CHECK(pairwise_distances(x)(0, 1) == doctest::Approx(5.0).epsilon(1e-15));
  }
  SUBCASE("brute-force oracle") {
    const Matrix x = oracle::random_matrix(5, 3, 11);
    const Matrix expected = oracle::brute_distances(x);
    CHECK((pairwise_distances(x).matrix() - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("non-finite input rejected") {
    Matrix x = Matrix::Zero(3, 2);
    x(1, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(pairwise_distances(x), std::invalid_argument);
  }
}

TEST_CASE("distance matrix validation") {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 1) = 1.0;
  CHECK_THROWS_AS(DistanceMatrix{d}, std::invalid_argument);
  d(1, 0) = 1.0;
  CHECK_NOTHROW(DistanceMatrix{d});
  d(0, 0) = 0.5;
  CHECK_THROWS_AS(DistanceMatrix{d}, std::invalid_argument);
}

TEST_CASE("knn graph") {
  SUBCASE("collinear points") {
    Matrix x(3, 1);
    x << 0, 1, 10;
    const DistanceMatrix d = pairwise_distances(x);
    const NeighborGraph g = knn_graph(d, 1, false);
    CHECK(g.adjacency[0].size() == 1);
    CHECK(g.adjacency[0][0].index == 1);
    CHECK(g.adjacency[1][0].index == 0);
    CHECK(g.adjacency[2][0].index == 1);
    const NeighborGraph s = symmetrized(g);
    CHECK(s.edge_count() == 2);
    CHECK(s.has_edge(0, 1));
    CHECK(s.has_edge(1, 2));
    CHECK(s.has_edge(2, 1));
    CHECK_FALSE(s.has_edge(0, 2));
  }
  SUBCASE("ties go to the lower index") {
    Matrix x(3, 1);
    x << 0, -1, 1;
    const NeighborGraph g = knn_graph(pairwise_distances(x), 1, false);
    CHECK(g.adjacency[0][0].index == 1);
  }
  SUBCASE("full-sort oracle") {
    const Matrix x = oracle::random_matrix(20, 3, 5);
    const DistanceMatrix d = pairwise_distances(x);
    const Index k = 4;
    const NeighborGraph g = knn_graph(d, k, false);
    for (Index i = 0; i < 20; ++i) {
      std::vector<Index> others;
      for (Index j = 0; j < 20; ++j)
        if (j != i) others.push_back(j);
      std::sort(others.begin(), others.end(), [&](Index a, Index b) {
        return d(i, a) < d(i, b) || (d(i, a) == d(i, b) && a < b);
      });
      REQUIRE(g.adjacency[static_cast<std::size_t>(i)].size() == static_cast<std::size_t>(k));
      for (Index r = 0; r < k; ++r)
        CHECK(g.adjacency[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)].index ==
              others[static_cast<std::size_t>(r)]);
    }
  }
  SUBCASE("k=12 on 2000 points: degree at least 12 after symmetrization") {
    const Matrix x = oracle::random_matrix(2000, 3, 9);
    const NeighborGraph g = knn_graph(pairwise_distances(x), 12, true);
    for (const auto& adj : g.adjacency) CHECK(adj.size() >= 12);
  }
  SUBCASE("bad k rejected") {
    const DistanceMatrix d = pairwise_distances(oracle::random_matrix(5, 2, 1));
    CHECK_THROWS_AS(knn_graph(d, 5, false), std::invalid_argument);
    CHECK_THROWS_AS(knn_graph(d, 0, false), std::invalid_argument);
  }
}

TEST_CASE("symmetrization properties") {
  const DistanceMatrix d = pairwise_distances(oracle::random_matrix(40, 3, 17));
  const NeighborGraph once = symmetrized(knn_graph(d, 5, false));
  const NeighborGraph twice = symmetrized(once);
  REQUIRE(once.size() == twice.size());
  for (std::size_t i = 0; i < once.adjacency.size(); ++i) {
    REQUIRE(once.adjacency[i].size() == twice.adjacency[i].size());
    for (std::size_t e = 0; e < once.adjacency[i].size(); ++e) {
      CHECK(once.adjacency[i][e].index == twice.adjacency[i][e].index);
      CHECK(once.adjacency[i][e].distance == twice.adjacency[i][e].distance);
    }
  }
  for (Index i = 0; i < once.size(); ++i)
    for (const auto& nb : once.adjacency[static_cast<std::size_t>(i)]) {
      CHECK(nb.index != i);
      CHECK(nb.distance > 0.0);
      CHECK(once.has_edge(nb.index, i));
    }
}

TEST_CASE("sym_eigen") {
  SUBCASE("identity") {
    const EigenPairs p = sym_eigen(Matrix::Identity(3, 3), 3, Spectrum::largest);
    CHECK((p.values.array() - 1.0).abs().maxCoeff() < 1e-14);
  }
  SUBCASE("diagonal") {
    Matrix a(2, 2);
    a << 3, 0, 0, 1;
    const EigenPairs p = sym_eigen(a, 1, Spectrum::largest);
    CHECK(p.values[0] == doctest::Approx(3.0));
    CHECK(p.vectors(0, 0) == doctest::Approx(1.0));
    CHECK(std::abs(p.vectors(1, 0)) < 1e-14);
  }
  SUBCASE("characteristic-polynomial root oracle, 4x4") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const Matrix a = oracle::random_symmetric(4, seed);
      const double bound = a.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
      const auto roots = oracle::real_roots(oracle::characteristic_polynomial(a), -bound, bound);
      REQUIRE(roots.size() == 4);
      const EigenPairs p = sym_eigen(a, 4, Spectrum::smallest);
      for (Index i = 0; i < 4; ++i) CHECK(std::abs(p.values[i] - roots[static_cast<std::size_t>(i)]) < 1e-8);
    }
  }
  SUBCASE("order and sign convention") {
    const Matrix a = oracle::random_symmetric(12, 3);
    const EigenPairs lo = sym_eigen(a, 3, Spectrum::smallest);
    const EigenPairs hi = sym_eigen(a, 3, Spectrum::largest);
    for (Index i = 0; i + 1 < 3; ++i) {
      CHECK(lo.values[i] <= lo.values[i + 1]);
      CHECK(hi.values[i] >= hi.values[i + 1]);
    }
    for (const EigenPairs* p : {&lo, &hi})
      for (Index c = 0; c < 3; ++c) {
        Index arg = 0;
        p->vectors.col(c).cwiseAbs().maxCoeff(&arg);
        CHECK(p->vectors(arg, c) > 0.0);
        CHECK(std::abs(p->vectors.col(c).norm() - 1.0) < 1e-12);
      }
  }
  SUBCASE("non-symmetric input rejected") {
    Matrix a = Matrix::Identity(3, 3);
    a(0, 1) = 1.0;
    CHECK_THROWS_AS(sym_eigen(a, 1, Spectrum::largest), std::invalid_argument);
  }
  SUBCASE("bit-identical reruns") {
    const Matrix a = oracle::random_symmetric(60, 8);
    const EigenPairs p = sym_eigen(a, 4, Spectrum::smallest);
    const EigenPairs q = sym_eigen(a, 4, Spectrum::smallest);
    CHECK(p.values == q.values);
    CHECK(p.vectors == q.vectors);
  }
}

TEST_CASE("sym_eigen residuals on 100 random matrices up to 50x50") {
  drens::Rng rng(2024);
  for (int t = 0; t < 100; ++t) {
    const Index n = 1 + static_cast<Index>(rng.below(50));
    const Matrix a = oracle::random_symmetric(n, 1000 + static_cast<std::uint64_t>(t));
    const Index count = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
    for (Spectrum which : {Spectrum::largest, Spectrum::smallest}) {
      const EigenPairs p = sym_eigen(a, count, which);
      CHECK(residual(a, p) < 1e-8);
    }
  }
}

TEST_CASE("sym_eigen on clustered spectra") {
  // Graph Laplacians of disconnected pieces give exactly repeated zeros.
  Matrix l = Matrix::Zero(90, 90);
  for (Index block = 0; block < 3; ++block)
    for (Index i = 0; i < 29; ++i) {
      const Index a = block * 30 + i, b = a + 1;
      l(a, b) = l(b, a) = -1.0;
      l(a, a) += 1.0;
      l(b, b) += 1.0;
    }
  const EigenPairs p = sym_eigen(l, 5, Spectrum::smallest);
  CHECK(residual(l, p) < 1e-8);
  CHECK((p.vectors.transpose() * p.vectors - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-8);
  for (Index i = 0; i < 3; ++i) CHECK(std::abs(p.values[i]) < 1e-10);
}

TEST_CASE("gen_sym_eigen") {
  SUBCASE("path graph: zero eigenvalue, constant vector") {
    Matrix w = Matrix::Zero(3, 3);
    w(0, 1) = w(1, 0) = w(1, 2) = w(2, 1) = 1.0;
    const Vector deg = w.rowwise().sum();
    const Matrix l = Matrix(deg.asDiagonal()) - w;
    const EigenPairs p = gen_sym_eigen(l, deg, 1);
    CHECK(std::abs(p.values[0]) < 1e-12);
    CHECK((p.vectors.col(0).array() - p.vectors(0, 0)).abs().maxCoeff() < 1e-12);
  }
  SUBCASE("identity weighting reduces to sym_eigen") {
    const Matrix a = oracle::random_symmetric(7, 4);
    const EigenPairs g = gen_sym_eigen(a, Vector(Vector::Ones(7)), 3);
    const EigenPairs s = sym_eigen(a, 3, Spectrum::smallest);
    CHECK((g.values - s.values).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(oracle::max_diff_up_to_sign(g.vectors, s.vectors) < 1e-8);
  }
  SUBCASE("normalized-Laplacian oracle on a random connected 6-node graph") {
    drens::Rng rng(77);
    Matrix w = Matrix::Zero(6, 6);
    for (Index i = 0; i + 1 < 6; ++i) w(i, i + 1) = w(i + 1, i) = 0.5 + rng.uniform();
    for (int e = 0; e < 4; ++e) {
      const Index i = static_cast<Index>(rng.below(6)), j = static_cast<Index>(rng.below(6));
      if (i != j) w(i, j) = w(j, i) = 0.5 + rng.uniform();
    }
    const Vector deg = w.rowwise().sum();
    const Matrix l = Matrix(deg.asDiagonal()) - w;
    const Vector inv_sqrt = deg.cwiseSqrt().cwiseInverse();
    const Matrix normalized = inv_sqrt.asDiagonal() * l * inv_sqrt.asDiagonal();
    const auto [values, vectors] = oracle::jacobi_eigen(normalized);
    const EigenPairs p = gen_sym_eigen(l, deg, 3);
    for (Index c = 0; c < 3; ++c) {
      CHECK(std::abs(p.values[c] - values[c]) < 1e-10);
      Vector expected = inv_sqrt.asDiagonal() * vectors.col(c);
      const double diff = std::min((expected - p.vectors.col(c)).cwiseAbs().maxCoeff(),
                                   (expected + p.vectors.col(c)).cwiseAbs().maxCoeff());
      CHECK(diff < 1e-8);
      CHECK((l * p.vectors.col(c) - p.values[c] * deg.asDiagonal() * p.vectors.col(c)).cwiseAbs().maxCoeff() <
            1e-8);
    }
    const Matrix gram = p.vectors.transpose() * deg.asDiagonal() * p.vectors;
    CHECK((gram - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("non-positive weights rejected") {
    Vector d = Vector::Ones(3);
    d[1] = 0.0;
    CHECK_THROWS_AS(gen_sym_eigen(Matrix::Identity(3, 3), d, 1), std::invalid_argument);
    Matrix dm = Matrix::Identity(3, 3);
    dm(0, 1) = 0.1;
    CHECK_THROWS_AS(gen_sym_eigen(Matrix::Identity(3, 3), dm, 1), std::invalid_argument);
  }
}

TEST_CASE("thin_svd") {
  SUBCASE("diagonal") {
    Matrix a(2, 2);
    a << 2, 0, 0, 1;
    const SvdResult s = thin_svd(a, 2);
    CHECK(s.values[0] == doctest::Approx(2.0));
    CHECK(s.values[1] == doctest::Approx(1.0));
  }
  SUBCASE("rank one") {
    const Vector u = oracle::random_matrix(5, 1, 2).col(0);
    const Vector v = oracle::random_matrix(4, 1, 3).col(0);
    const SvdResult s = thin_svd(u * v.transpose(), 4);
    CHECK(s.values[0] > 1e-3);
    for (Index i = 1; i < 4; ++i) CHECK(s.values[i] < 1e-12);
  }
  SUBCASE("Gram-matrix oracle, 6x4") {
    const Matrix a = oracle::random_matrix(6, 4, 21);
    const SvdResult s = thin_svd(a, 4);
    const EigenPairs gram = sym_eigen(a.transpose() * a, 4, Spectrum::largest);
    for (Index i = 0; i < 4; ++i) {
      CHECK(std::abs(s.values[i] * s.values[i] - gram.values[i]) < 1e-10);
      CHECK((a * s.right.col(i) - s.values[i] * s.left.col(i)).cwiseAbs().maxCoeff() < 1e-8);
      if (i > 0) CHECK(s.values[i] <= s.values[i - 1]);
    }
  }
  SUBCASE("count too large rejected") {
    CHECK_THROWS_AS(thin_svd(Matrix::Ones(3, 2), 3), std::invalid_argument);
  }
}

TEST_CASE("graph shortest paths") {
  const double inf = std::numeric_limits<double>::infinity();
  SUBCASE("unit triangle") {
    Matrix w = Matrix::Ones(3, 3);
    const ShortestPaths sp = graph_shortest_paths(graph_from_weights(w));
    CHECK(sp.connected());
    for (Index i = 0; i < 3; ++i)
      for (Index j = 0; j < 3; ++j) CHECK(sp.distances(i, j) == (i == j ? 0.0 : 1.0));
  }
  SUBCASE("path") {
    Matrix w = Matrix::Constant(3, 3, inf);
    w(0, 1) = w(1, 0) = w(1, 2) = w(2, 1) = 1.0;
    CHECK(graph_shortest_paths(graph_from_weights(w)).distances(0, 2) == 2.0);
  }
  SUBCASE("disconnected graph reports components") {
    Matrix w = Matrix::Constant(4, 4, inf);
    w(0, 1) = w(1, 0) = 1.0;
    w(2, 3) = w(3, 2) = 2.0;
    const ShortestPaths sp = graph_shortest_paths(graph_from_weights(w));
    CHECK(sp.component_count == 2);
    CHECK(sp.component == std::vector<Index>{0, 0, 1, 1});
    CHECK(std::isinf(sp.distances(0, 3)));
    CHECK_THROWS(sp.as_distance_matrix());
  }
}

TEST_CASE("shortest paths match Floyd-Warshall on random sparse graphs") {
  const double inf = std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    drens::Rng rng(seed);
    const Index n = 30;
    Matrix w = Matrix::Constant(n, n, inf);
    for (Index i = 0; i + 1 < n; ++i) w(i, i + 1) = w(i + 1, i) = 0.1 + rng.uniform();
    for (int e = 0; e < 40; ++e) {
      const Index i = static_cast<Index>(rng.below(n)), j = static_cast<Index>(rng.below(n));
      if (i != j) w(i, j) = w(j, i) = 0.1 + 3.0 * rng.uniform();
    }
    const Matrix expected = oracle::floyd_warshall(w);
    const NeighborGraph g = graph_from_weights(w);
    const ShortestPaths one = graph_shortest_paths(g, 1);
    const ShortestPaths many = graph_shortest_paths(g, 4);
    CHECK((one.distances - expected).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(one.distances == many.distances);
    // triangle inequality on sampled triples
    for (int t = 0; t < 200; ++t) {
      const Index i = static_cast<Index>(rng.below(n)), j = static_cast<Index>(rng.below(n)),
                  k = static_cast<Index>(rng.below(n));
      CHECK(one.distances(i, j) <= one.distances(i, k) + one.distances(k, j) + 1e-12);
    }
  }
}
