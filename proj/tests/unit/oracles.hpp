#pragma once

// Independent reference implementations used only by the tests. None of
// them share code with the library.

#include "drens/numcore.hpp"
#include "drens/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace oracle {

using drens::Index;
using drens::Matrix;
using drens::Vector;

inline Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  drens::Rng rng(seed);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

inline Matrix random_symmetric(Index n, std::uint64_t seed) {
  const Matrix a = random_matrix(n, n, seed);
  return 0.5 * (a + a.transpose());
}

inline Matrix brute_distances(const Matrix& x) {
  Matrix d(x.rows(), x.rows());
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.rows(); ++j) {
      double s = 0.0;
      for (Index c = 0; c < x.cols(); ++c) s += (x(i, c) - x(j, c)) * (x(i, c) - x(j, c));
      d(i, j) = std::sqrt(s);
    }
  return d;
}

/// Cyclic Jacobi rotations. Returns ascending values and matching columns.
inline std::pair<Vector, Matrix> jacobi_eigen(Matrix a) {
  const Index n = a.rows();
  Matrix v = Matrix::Identity(n, n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Index p = 0; p < n; ++p)
      for (Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (Index p = 0; p < n; ++p)
      for (Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](Index x, Index y) { return a(x, x) < a(y, y); });
  Vector values(n);
  Matrix vectors(n, n);
  for (Index i = 0; i < n; ++i) {
    values[i] = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
    vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  return {values, vectors};
}

/// Characteristic polynomial coefficients c[0..n] (monic, c[n] = 1) by
/// Faddeev-LeVerrier.
inline std::vector<double> characteristic_polynomial(const Matrix& a) {
  const Index n = a.rows();
  std::vector<double> c(static_cast<std::size_t>(n + 1), 0.0);
  c[static_cast<std::size_t>(n)] = 1.0;
  Matrix m = Matrix::Zero(n, n);
  for (Index k = 1; k <= n; ++k) {
    m = a * m + c[static_cast<std::size_t>(n - k + 1)] * Matrix::Identity(n, n);
    c[static_cast<std::size_t>(n - k)] = -(a * m).trace() / static_cast<double>(k);
  }
  return c;
}

/// Real roots of a polynomial whose roots are all real and lie in
/// [lo, hi]: sign scan, then bisection.
inline std::vector<double> real_roots(const std::vector<double>& c, double lo, double hi) {
  auto eval = [&](double x) {
    double r = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) r = r * x + c[i];
    return r;
  };
  std::vector<double> roots;
  const int steps = 200000;
  double x0 = lo, f0 = eval(lo);
  for (int s = 1; s <= steps; ++s) {
    const double x1 = lo + (hi - lo) * s / steps;
    const double f1 = eval(x1);
    if (f0 == 0.0) {
      roots.push_back(x0);
    } else if (f0 * f1 < 0.0) {
      double a = x0, b = x1, fa = f0;
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = eval(m);
        if (fa * fm <= 0.0) {
          b = m;
        } else {
          a = m;
          fa = fm;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

/// All-pairs shortest paths on a dense weight matrix (inf = no edge).
inline Matrix floyd_warshall(Matrix w) {
  const Index n = w.rows();
  for (Index i = 0; i < n; ++i) w(i, i) = 0.0;
  for (Index k = 0; k < n; ++k)
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        if (w(i, k) + w(k, j) < w(i, j)) w(i, j) = w(i, k) + w(k, j);
  return w;
}

/// KL(P || Q) straight from the definition, Q from Student-t kernels.
inline double kl_divergence(const Matrix& p, const Matrix& y) {
  const Index n = y.rows();
  double z = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (i != j) z += 1.0 / (1.0 + (y.row(i) - y.row(j)).squaredNorm());
  double kl = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      if (i == j || p(i, j) <= 0.0) continue;
      const double q = 1.0 / (1.0 + (y.row(i) - y.row(j)).squaredNorm()) / z;
      kl += p(i, j) * std::log(p(i, j) / q);
    }
  return kl;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

/// Correlation between the upper-triangle entries of two distance matrices.
inline double distance_correlation(const Matrix& a, const Matrix& b) {
  std::vector<double> x, y;
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = i + 1; j < a.rows(); ++j) {
      x.push_back(a(i, j));
      y.push_back(b(i, j));
    }
  return pearson(x, y);
}

/// Flips each column of `b` to best match the same column of `a`, then
/// returns the largest absolute difference.
inline double max_diff_up_to_sign(const Matrix& a, const Matrix& b) {
  double worst = 0.0;
  for (Index c = 0; c < a.cols(); ++c) {
    const double same = (a.col(c) - b.col(c)).cwiseAbs().maxCoeff();
    const double flip = (a.col(c) + b.col(c)).cwiseAbs().maxCoeff();
    worst = std::max(worst, std::min(same, flip));
  }
  return worst;
}

}  // namespace oracle

namespace oracle {

struct SwissRoll {
  Matrix x;       // n x 3 ambient coordinates
  Matrix params;  // n x 2: arc length along the spiral, height
};

inline double spiral_arc_length(double t) { return 0.5 * (t * std::sqrt(1.0 + t * t) + std::asinh(t)); }

/// Spiral angle t in [1.5 pi, 4.5 pi], height in [0, 21], ambient point
/// (t cos t, height, t sin t). Points are uniform on the surface (uniform in
/// arc length, not in t), so the outer turns are not undersampled.
inline SwissRoll swiss_roll(Index n, std::uint64_t seed) {
  drens::Rng rng(seed);
  const double a = 1.5 * M_PI, b = 4.5 * M_PI;
  const double sa = spiral_arc_length(a), sb = spiral_arc_length(b);
  SwissRoll s{Matrix(n, 3), Matrix(n, 2)};
  for (Index i = 0; i < n; ++i) {
    const double target = sa + rng.uniform() * (sb - sa);
    double lo = a, hi = b;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (spiral_arc_length(mid) < target ? lo : hi) = mid;
    }
    const double t = 0.5 * (lo + hi);
    const double h = 21.0 * rng.uniform();
    s.x.row(i) << t * std::cos(t), h, t * std::sin(t);
    s.params.row(i) << spiral_arc_length(t), h;
  }
  return s;
}

/// Columns shifted to mean 0 and scaled to unit sample variance.
inline Matrix standardized_columns(Matrix m) {
  for (Index c = 0; c < m.cols(); ++c) {
    m.col(c).array() -= m.col(c).mean();
    m.col(c) /= std::sqrt(m.col(c).squaredNorm() / static_cast<double>(m.rows() - 1));
  }
  return m;
}

}  // namespace oracle
