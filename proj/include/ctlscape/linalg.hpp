#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ctlscape {

using Complex = std::complex<double>;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Raised for malformed inputs: dimension mismatches, non-finite values,
/// non-Hermitian generators, non-unitary goals.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Spectral data of a Hermitian matrix H = V diag(values) V^dagger.
struct HermitianSpectrum {
  RVector values;
  CMatrix vectors;
};

HermitianSpectrum hermitian_spectrum(const CMatrix& h);

/// exp(i * scale * H) for Hermitian H, built from its spectrum so the result
/// is unitary to rounding.
CMatrix exp_i_hermitian(const HermitianSpectrum& spectrum, double scale);
CMatrix exp_i_hermitian(const CMatrix& h, double scale);

/// Padé scaling-and-squaring exponential of a general real matrix.
RMatrix expm(const RMatrix& a);

/// Largest entrywise |H - H^dagger|.
double hermitian_deviation(const CMatrix& h);
CMatrix hermitize(const CMatrix& h);

/// Largest entrywise |U^dagger U - I|.
double unitarity_deviation(const CMatrix& u);

double max_abs(const CMatrix& m);
double max_abs(const RMatrix& m);

CMatrix commutator(const CMatrix& x, const CMatrix& y);

/// Real inner product Re Tr(A^dagger B); the Hilbert-Schmidt product on the
/// real vector space of complex matrices.
double hs_inner(const CMatrix& a, const CMatrix& b);

/// Stacks real parts then imaginary parts (column-major) into one real vector.
RVector realify(const CMatrix& m);

bool all_finite(const RVector& v);
bool all_finite(const RMatrix& m);
bool all_finite(const CMatrix& m);

namespace pauli {
CMatrix x();
CMatrix y();
CMatrix z();
CMatrix identity(Index n);
}  // namespace pauli

}  // namespace ctlscape
