#pragma once

#include <vector>

#include <Eigen/Sparse>

#include "ltlab/common.hpp"

namespace ltlab {

/// Ascending eigenvalues of a Hermitian matrix. Takes the real symmetric
/// path when every imaginary part vanishes.
RealVector hermitian_eigenvalues(const Matrix& h);
RealVector hermitian_eigenvalues(const RealMatrix& h);

/// Eigen-decomposition, ascending; columns of `vectors` are orthonormal.
struct EigenPairs {
  RealVector values;
  Matrix vectors;
};
EigenPairs hermitian_eigenpairs(const Matrix& h);

/// Positive and negative parts A = A+ - A-, both PSD, from the spectral theorem.
Matrix positive_part(const Matrix& a);
Matrix negative_part(const Matrix& a);

/// Principal PSD square root. Throws NumericalError when an eigenvalue is
/// below -tol * max(1, ||a||).
Matrix psd_sqrt(const Matrix& a, double tol = 1e-10);

/// Partial sums of descending eigenvalues: entry n-1 is sum_{j<=n} lambda_j.
template <typename Derived>
std::vector<double> descending_partial_sums(const Eigen::MatrixBase<Derived>& h, int n_max) {
  const RealVector ev = hermitian_eigenvalues(Matrix(h.template cast<Complex>()));
  const int size = static_cast<int>(ev.size());
  if (n_max > size) throw InvalidArgument("partial sums: n_max exceeds matrix size");
  std::vector<double> out(n_max);
  double s = 0.0;
  for (int j = 0; j < n_max; ++j) {
    s += ev(size - 1 - j);
    out[j] = s;
  }
  return out;
}

/// Hermitian block-tridiagonal matrix whose off-diagonal blocks are
/// `coupling` times the identity. Scalar may be double or Complex.
template <typename Scalar>
struct BlockTridiagonal {
  using Block = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  std::vector<Block> diagonal;
  double coupling = 0.0;

  int blocks() const { return static_cast<int>(diagonal.size()); }
  int block_size() const { return diagonal.empty() ? 0 : static_cast<int>(diagonal.front().rows()); }
  int size() const { return blocks() * block_size(); }

  Block dense() const;

  /// Number of eigenvalues strictly below `lambda` (Sylvester inertia of the
  /// block LDL* factorisation of H - lambda).
  int count_below(double lambda) const;

  /// Lower bound on the spectrum (Gershgorin on the block structure).
  double lower_bound() const;

  /// Ascending eigenvalues below `threshold` by bisection on count_below.
  std::vector<double> eigenvalues_below(double threshold, double rel_tol = 1e-15) const;
};

extern template struct BlockTridiagonal<double>;
extern template struct BlockTridiagonal<Complex>;

/// Eigenvalues below `threshold` of a large sparse Hermitian matrix, by
/// Lanczos with full reorthogonalisation and locking; restarts in the
/// complement of converged vectors so degenerate eigenvalues are all found.
std::vector<double> sparse_eigenvalues_below(const Eigen::SparseMatrix<Complex>& h, double threshold,
                                             int max_count = 2000);

}  // namespace ltlab
