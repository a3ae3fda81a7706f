#include "ctlscape/random.hpp"

#include <cmath>

namespace ctlscape {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0xD1B54A32D192ED03ULL));
}

Rng make_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32)};
  return Rng(seq);
}

RVector gaussian_vector(Index n, Rng& rng) {
  std::normal_distribution<double> normal;
  RVector v(n);
  for (Index i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

RMatrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal;
  RMatrix m(rows, cols);
  // Row-major fill so the draw order matches the serialized layout.
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  return m;
}

CMatrix gaussian_hermitian(Index n, Rng& rng) {
  std::normal_distribution<double> normal;
  CMatrix x(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      x(i, j) = Complex(re, im) / std::sqrt(2.0);
    }
  return hermitize(x);
}

CMatrix haar_unitary(Index n, Rng& rng) {
  std::normal_distribution<double> normal;
  CMatrix z(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(i, j) = Complex(re, im);
    }
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    if (mag > 0.0) q.col(j) *= d / mag;
  }
  return q;
}

RVector uniform_box(Index n, double amplitude, Rng& rng) {
  std::uniform_real_distribution<double> uniform(-amplitude, amplitude);
  RVector v(n);
  for (Index i = 0; i < n; ++i) v(i) = uniform(rng);
  return v;
}

RVector random_direction(Index n, Rng& rng) {
  RVector v = gaussian_vector(n, rng);
  const double norm = v.norm();
  if (norm == 0.0) {
    v.setZero();
    v(0) = 1.0;
    return v;
  }
  return v / norm;
}

}  // namespace ctlscape
