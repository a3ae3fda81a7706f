#include "ctlscape/linalg.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace ctlscape {

HermitianSpectrum hermitian_spectrum(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("hermitian eigendecomposition failed");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

CMatrix exp_i_hermitian(const HermitianSpectrum& spectrum, double scale) {
  const Index n = spectrum.values.size();
  CVector phases(n);
  for (Index a = 0; a < n; ++a) {
    phases(a) = std::polar(1.0, scale * spectrum.values(a));
  }
  return spectrum.vectors * phases.asDiagonal() * spectrum.vectors.adjoint();
}

CMatrix exp_i_hermitian(const CMatrix& h, double scale) {
  return exp_i_hermitian(hermitian_spectrum(h), scale);
}

RMatrix expm(const RMatrix& a) { return a.exp(); }

double hermitian_deviation(const CMatrix& h) {
  return max_abs(CMatrix(h - h.adjoint()));
}

CMatrix hermitize(const CMatrix& h) { return 0.5 * (h + h.adjoint()); }

double unitarity_deviation(const CMatrix& u) {
  return max_abs(CMatrix(u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())));
}

double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double max_abs(const RMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

CMatrix commutator(const CMatrix& x, const CMatrix& y) { return x * y - y * x; }

double hs_inner(const CMatrix& a, const CMatrix& b) {
  return (a.conjugate().cwiseProduct(b)).sum().real();
}

RVector realify(const CMatrix& m) {
  const Index size = m.size();
  RVector out(2 * size);
  out.head(size) = m.real().reshaped();
  out.tail(size) = m.imag().reshaped();
  return out;
}

bool all_finite(const RVector& v) { return v.allFinite(); }
bool all_finite(const RMatrix& m) { return m.allFinite(); }
bool all_finite(const CMatrix& m) {
  return m.real().allFinite() && m.imag().allFinite();
}

namespace pauli {

CMatrix x() {
  CMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

CMatrix y() {
  CMatrix m(2, 2);
  m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  return m;
}

CMatrix z() {
  CMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

CMatrix identity(Index n) { return CMatrix::Identity(n, n); }

}  // namespace pauli

}  // namespace ctlscape
