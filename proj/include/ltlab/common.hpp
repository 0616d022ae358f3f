#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ltlab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on user input was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed to reach its accuracy target.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Closed interval on the real line.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
  bool contains(const Interval& o) const { return o.lo >= lo && o.hi <= hi; }
};

/// Max-entry norm; the Hermiticity and support invariants are stated in it.
template <typename Derived>
double max_entry_norm(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m, double tol = 1e-12) {
  return m.rows() == m.cols() && max_entry_norm(m - m.adjoint()) <= tol;
}

/// True when every imaginary part is exactly zero, so real arithmetic suffices.
template <typename Derived>
bool is_real(const Eigen::MatrixBase<Derived>& m) {
  if constexpr (Eigen::NumTraits<typename Derived::Scalar>::IsComplex) {
    return (m.imag().array() == 0.0).all();
  } else {
    return true;
  }
}

}  // namespace ltlab
