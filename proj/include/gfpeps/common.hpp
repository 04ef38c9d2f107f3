#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace gfpeps {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<cplx>;

inline constexpr cplx I_UNIT{0.0, 1.0};

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GeometryError : Error {
  using Error::Error;
};
struct ValidationError : Error {
  using Error::Error;
};
struct GapError : Error {
  using Error::Error;
};
struct RepresentationError : Error {
  using Error::Error;
};
struct ContractionError : Error {
  using Error::Error;
};
struct SizeError : Error {
  using Error::Error;
};
struct SymmetryError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

/// Max-abs deviation of A from antisymmetry, |A + A^T|_inf.
inline double antisymmetry_defect(const Mat& A) {
  return (A + A.transpose()).cwiseAbs().maxCoeff();
}

/// Max-abs deviation of A from hermiticity.
inline double hermiticity_defect(const Mat& A) {
  return (A - A.adjoint()).cwiseAbs().maxCoeff();
}

/// Enforce exact antisymmetry by averaging.
inline Mat antisymmetrize(const Mat& A) { return 0.5 * (A - A.transpose()); }

}  // namespace gfpeps
