#include "ltlab/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace ltlab {

RealVector hermitian_eigenvalues(const RealMatrix& h) {
  if (h.rows() == 0) return RealVector();
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericalError("dense eigensolver did not converge (size " + std::to_string(h.rows()) + ")");
  }
  return es.eigenvalues();
}

RealVector hermitian_eigenvalues(const Matrix& h) {
  if (h.rows() == 0) return RealVector();
  if (is_real(h)) return hermitian_eigenvalues(RealMatrix(h.real()));
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericalError("dense eigensolver did not converge (size " + std::to_string(h.rows()) + ")");
  }
  return es.eigenvalues();
}

EigenPairs hermitian_eigenpairs(const Matrix& h) {
  if (is_real(h)) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(h.real());
    if (es.info() != Eigen::Success) throw NumericalError("dense eigensolver did not converge");
    return {es.eigenvalues(), es.eigenvectors().cast<Complex>()};
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) throw NumericalError("dense eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

namespace {

Matrix spectral_map(const Matrix& a, double (*f)(double)) {
  const EigenPairs ep = hermitian_eigenpairs(a);
  RealVector mapped = ep.values.unaryExpr(f);
  Matrix out = ep.vectors * mapped.cast<Complex>().asDiagonal() * ep.vectors.adjoint();
  return 0.5 * (out + out.adjoint());
}

}  // namespace

Matrix positive_part(const Matrix& a) {
  return spectral_map(a, [](double x) { return x > 0.0 ? x : 0.0; });
}

Matrix negative_part(const Matrix& a) {
  return spectral_map(a, [](double x) { return x < 0.0 ? -x : 0.0; });
}

Matrix psd_sqrt(const Matrix& a, double tol) {
  const EigenPairs ep = hermitian_eigenpairs(a);
  const double scale = std::max(1.0, ep.values.cwiseAbs().maxCoeff());
  if (ep.values.size() > 0 && ep.values.minCoeff() < -tol * scale) {
    throw NumericalError("psd_sqrt: matrix has eigenvalue " + std::to_string(ep.values.minCoeff()));
  }
  RealVector r = ep.values.unaryExpr([](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; });
  Matrix out = ep.vectors * r.cast<Complex>().asDiagonal() * ep.vectors.adjoint();
  return 0.5 * (out + out.adjoint());
}

// ---------------------------------------------------------------------------
// Block tridiagonal

template <typename Scalar>
typename BlockTridiagonal<Scalar>::Block BlockTridiagonal<Scalar>::dense() const {
  const int nb = blocks();
  const int n = block_size();
  Block out = Block::Zero(nb * n, nb * n);
  for (int i = 0; i < nb; ++i) {
    out.block(i * n, i * n, n, n) = diagonal[i];
    if (i + 1 < nb) {
      for (int r = 0; r < n; ++r) {
        out(i * n + r, (i + 1) * n + r) = coupling;
        out((i + 1) * n + r, i * n + r) = coupling;
      }
    }
  }
  return out;
}

template <typename Scalar>
double BlockTridiagonal<Scalar>::lower_bound() const {
  double lb = std::numeric_limits<double>::infinity();
  const int n = block_size();
  for (int i = 0; i < blocks(); ++i) {
    const int neighbours = (i > 0) + (i + 1 < blocks());
    for (int r = 0; r < n; ++r) {
      double radius = neighbours * std::abs(coupling);
      for (int s = 0; s < n; ++s) {
        if (s != r) radius += std::abs(diagonal[i](r, s));
      }
      lb = std::min(lb, std::real(diagonal[i](r, r)) - radius);
    }
  }
  return lb;
}

template <typename Scalar>
int BlockTridiagonal<Scalar>::count_below(double lambda) const {
  const int nb = blocks();
  const int n = block_size();
  const double c2 = coupling * coupling;
  const double pivmin = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon() *
                        std::max(1.0, c2);
  int count = 0;
  if (n == 1) {
    double d = 1.0;
    for (int i = 0; i < nb; ++i) {
      double a = std::real(diagonal[i](0, 0)) - lambda;
      if (i > 0) a -= c2 / d;
      if (std::abs(a) < pivmin) a = -pivmin;
      if (a < 0.0) ++count;
      d = a;
    }
    return count;
  }
  if (n == 2) {
    // closed-form inertia and inverse of each 2x2 Hermitian pivot
    double ia = 0.0, ie = 0.0;
    Scalar ib = Scalar(0);
    for (int i = 0; i < nb; ++i) {
      double a = std::real(diagonal[i](0, 0)) - lambda;
      double e = std::real(diagonal[i](1, 1)) - lambda;
      Scalar b = diagonal[i](0, 1);
      if (i > 0) {
        a -= c2 * ia;
        e -= c2 * ie;
        b -= c2 * ib;
      }
      double det = a * e - std::norm(b);
      const double scale = std::max({std::abs(a * e), std::norm(b), pivmin});
      if (std::abs(det) < std::numeric_limits<double>::epsilon() * scale) {
        det = -std::numeric_limits<double>::epsilon() * scale;
      }
      if (det < 0.0) {
        count += 1;
      } else if (a + e < 0.0) {
        count += 2;
      }
      ia = e / det;
      ie = a / det;
      ib = -b / det;
    }
    return count;
  }
  Block prev_inv;
  Eigen::SelfAdjointEigenSolver<Block> es;
  for (int i = 0; i < nb; ++i) {
    Block d = diagonal[i];
    d.diagonal().array() -= lambda;
    if (i > 0) d -= c2 * prev_inv;
    es.compute(d);
    Eigen::VectorXd ev = es.eigenvalues();
    for (int r = 0; r < n; ++r) {
      if (std::abs(ev(r)) < pivmin) ev(r) = -pivmin;
      if (ev(r) < 0.0) ++count;
    }
    prev_inv = es.eigenvectors() * ev.cwiseInverse().template cast<Scalar>().asDiagonal() *
               es.eigenvectors().adjoint();
  }
  return count;
}

template <typename Scalar>
std::vector<double> BlockTridiagonal<Scalar>::eigenvalues_below(double threshold, double rel_tol) const {
  const int total = count_below(threshold);
  std::vector<double> out;
  out.reserve(total);
  const double floor = lower_bound() - 1.0;
  double lo_prev = floor;
  for (int j = 0; j < total; ++j) {
    double lo = lo_prev;
    double hi = threshold;
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (count_below(mid) > j) {
        hi = mid;
      } else {
        lo = mid;
      }
      if (hi - lo <= rel_tol * std::max(std::abs(lo), std::abs(hi))) break;
    }
    out.push_back(0.5 * (lo + hi));
    lo_prev = lo;
  }
  return out;
}

template struct BlockTridiagonal<double>;
template struct BlockTridiagonal<Complex>;

// ---------------------------------------------------------------------------
// Lanczos with locking

std::vector<double> sparse_eigenvalues_below(const Eigen::SparseMatrix<Complex>& h, double threshold,
                                             int max_count) {
  const int n = static_cast<int>(h.rows());
  double norm = 0.0;
  {
    Eigen::VectorXd rows = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < h.outerSize(); ++k) {
      for (Eigen::SparseMatrix<Complex>::InnerIterator it(h, k); it; ++it) rows(it.row()) += std::abs(it.value());
    }
    norm = rows.maxCoeff();
  }
  const double res_tol = 1e-11 * std::max(norm, 1.0);

  std::mt19937_64 rng(0x5eed1a2c3b4d5e6fULL);
  auto uniform = [&rng] { return (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 0.5; };

  Matrix locked(n, 0);
  std::vector<double> found;
  int steps = std::min(n, 160);

  auto orthogonalise = [&](Vector& w, const Matrix& basis, int cols) {
    for (int pass = 0; pass < 2; ++pass) {
      if (locked.cols() > 0) w -= locked * (locked.adjoint() * w);
      if (cols > 0) w -= basis.leftCols(cols) * (basis.leftCols(cols).adjoint() * w);
    }
  };

  for (int restart = 0; restart < 4 * max_count + 20; ++restart) {
    const int room = n - static_cast<int>(locked.cols());
    if (room <= 0) break;
    const int m = std::min(steps, room);
    Matrix basis(n, m + 1);
    std::vector<double> alpha, beta;
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = Complex(uniform(), uniform());
    orthogonalise(v, basis, 0);
    v.normalize();
    basis.col(0) = v;
    int used = 0;
    double last_beta = 0.0;
    for (int j = 0; j < m; ++j) {
      Vector w = h * basis.col(j);
      const double a = std::real(basis.col(j).dot(w));
      alpha.push_back(a);
      w -= a * basis.col(j);
      if (j > 0) w -= beta[j - 1] * basis.col(j - 1);
      orthogonalise(w, basis, j + 1);
      const double b = w.norm();
      used = j + 1;
      last_beta = b;
      if (b < 1e-12 * std::max(norm, 1.0)) {
        last_beta = 0.0;
        break;
      }
      beta.push_back(b);
      basis.col(j + 1) = w / b;
    }
    RealMatrix t = RealMatrix::Zero(used, used);
    for (int j = 0; j < used; ++j) {
      t(j, j) = alpha[j];
      if (j + 1 < used) t(j, j + 1) = t(j + 1, j) = beta[j];
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(t);
    const RealVector& theta = es.eigenvalues();
    const RealMatrix& s = es.eigenvectors();
    std::vector<int> accepted;
    bool lowest_converged = false;
    for (int i = 0; i < used; ++i) {
      const double resid = std::abs(last_beta * s(used - 1, i));
      if (i == 0) lowest_converged = resid <= res_tol;
      if (theta(i) < threshold && resid <= res_tol) accepted.push_back(i);
    }
    if (accepted.empty()) {
      if (lowest_converged && theta(0) >= threshold) break;
      if (m == room) {
        if (lowest_converged) break;
        throw NumericalError("Lanczos failed to converge on the negative spectrum");
      }
      steps = std::min(2 * steps, n);
      continue;
    }
    for (int i : accepted) {
      Vector y = basis.leftCols(used) * s.col(i).cast<Complex>();
      orthogonalise(y, basis, 0);
      const double nrm = y.norm();
      if (nrm < 1e-8) continue;
      locked.conservativeResize(n, locked.cols() + 1);
      locked.col(locked.cols() - 1) = y / nrm;
      found.push_back(theta(i));
    }
    if (static_cast<int>(found.size()) >= max_count) {
      throw NumericalError("Lanczos: more than " + std::to_string(max_count) + " eigenvalues below threshold");
    }
  }
  std::sort(found.begin(), found.end());
  return found;
}

}  // namespace ltlab
