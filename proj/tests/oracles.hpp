#pragma once

// Reference computations that share no code path with the library kernels.

#include <unsupported/Eigen/MatrixFunctions>

#include <vector>

#include "ctlscape/linalg.hpp"
#include "ctlscape/objective.hpp"

namespace oracle {

using ctlscape::CMatrix;
using ctlscape::Complex;
using ctlscape::Index;
using ctlscape::RMatrix;
using ctlscape::RVector;

/// Product of Pade/scaling-squaring exponentials exp(i dt (H0 + w_k Hc)).
inline CMatrix propagator(const CMatrix& h0, const CMatrix& hc, const RVector& w, double horizon) {
  const double dt = horizon / static_cast<double>(w.size());
  CMatrix u = CMatrix::Identity(h0.rows(), h0.cols());
  for (Index k = 0; k < w.size(); ++k) {
    const CMatrix gen = (Complex(0.0, dt) * (h0 + w(k) * hc)).eval();
    u = gen.exp() * u;
  }
  return u;
}

/// Classical RK4 on dx/dt = A x + w b, written out directly.
inline RVector lti_rk4(const RMatrix& a, const RVector& b, const RVector& x0, const RVector& w,
                       double horizon, int substeps) {
  const double h = horizon / static_cast<double>(w.size() * substeps);
  RVector x = x0;
  for (Index k = 0; k < w.size(); ++k) {
    const RVector f = w(k) * b;
    for (int s = 0; s < substeps; ++s) {
      const RVector k1 = a * x + f;
      const RVector k2 = a * (x + 0.5 * h * k1) + f;
      const RVector k3 = a * (x + 0.5 * h * k2) + f;
      const RVector k4 = a * (x + h * k3) + f;
      x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  return x;
}

/// Central differences of F along each coordinate.
inline RVector fd_gradient(const ctlscape::Landscape& f, const ctlscape::PiecewiseControl& w,
                           double h = 1e-5) {
  RVector g(w.intervals());
  for (Index k = 0; k < w.intervals(); ++k) {
    RVector plus = w.values();
    RVector minus = w.values();
    plus(k) += h;
    minus(k) -= h;
    g(k) = (f.value(w.with_values(plus)) - f.value(w.with_values(minus))) / (2.0 * h);
  }
  return g;
}

/// Kalman rank by full-pivot LU rather than SVD.
inline Index kalman_rank_lu(const RMatrix& a, const RVector& b) {
  const Index n = a.rows();
  RMatrix k(n, n);
  RVector col = b;
  for (Index j = 0; j < n; ++j) {
    k.col(j) = col;
    col = a * col;
  }
  Eigen::FullPivLU<RMatrix> lu(k);
  lu.setThreshold(1e-10);
  return lu.rank();
}

/// Dimension of the real span of every bracket word in iH0, iHc up to `depth`
/// letters, by brute-force enumeration (no incremental orthogonalization).
inline Index lie_dimension_bruteforce(const CMatrix& h0, const CMatrix& hc, int depth) {
  const Complex i(0.0, 1.0);
  std::vector<CMatrix> level = {(i * h0).eval(), (i * hc).eval()};
  std::vector<CMatrix> all = level;
  for (int d = 2; d <= depth; ++d) {
    std::vector<CMatrix> next;
    for (const auto& x : level) {
      next.push_back((i * h0 * x - x * i * h0).eval());
      next.push_back((i * hc * x - x * i * hc).eval());
    }
    for (const auto& m : next) all.push_back(m);
    level = std::move(next);
  }
  const Index n = h0.rows();
  RMatrix stacked(2 * n * n, static_cast<Index>(all.size()));
  for (std::size_t c = 0; c < all.size(); ++c) {
    const auto& m = all[c];
    for (Index e = 0; e < n * n; ++e) {
      stacked(e, static_cast<Index>(c)) = m(e % n, e / n).real();
      stacked(n * n + e, static_cast<Index>(c)) = m(e % n, e / n).imag();
    }
  }
  Eigen::JacobiSVD<RMatrix> svd(stacked);
  const auto& sv = svd.singularValues();
  Index rank = 0;
  for (Index k = 0; k < sv.size(); ++k) rank += sv(k) > 1e-9 * sv(0);
  return rank;
}

/// Normalized fidelities |Tr D|^2 / n^2 over every diagonal sign pattern D.
inline std::vector<double> diagonal_sign_fidelities(int n) {
  std::vector<double> out;
  for (int mask = 0; mask < (1 << n); ++mask) {
    int trace = 0;
    for (int k = 0; k < n; ++k) trace += (mask >> k) & 1 ? -1 : 1;
    out.push_back(static_cast<double>(trace * trace) / (n * n));
  }
  return out;
}

}  // namespace oracle
