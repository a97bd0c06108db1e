#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qss/rng.hpp"
#include "qss/simplex.hpp"

namespace qss {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

namespace detail {

inline bool is_hermitian(const CMatrix& m, double tol) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

inline double min_eigenvalue(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Pauli matrices and identity for qubit constructions.
inline CMatrix pauli(int a) {
  CMatrix m(2, 2);
  switch (a) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case 3: m << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("pauli index in 0..3");
  }
  return m;
}

// (1/weight)(1 + a.sigma), the generic qubit effect with Bloch vector a
inline CMatrix bloch_effect(double ax, double ay, double az, double weight) {
  return (pauli(0) + ax * pauli(1) + ay * pauli(2) + az * pauli(3)) / weight;
}

}  // namespace detail

/// d x d Hermitian, unit-trace, positive-semidefinite matrix.
class DensityOperator {
 public:
  DensityOperator(CMatrix m) : mat_(std::move(m)) {
    const auto d = mat_.rows();
    if (d < 1 || mat_.cols() != d)
      throw std::invalid_argument("density operator must be square");
    if (!detail::is_hermitian(mat_, 1e-12))
      throw std::invalid_argument("density operator must be Hermitian");
    if (std::abs(mat_.trace().real() - 1.0) > 1e-12 ||
        std::abs(mat_.trace().imag()) > 1e-12)
      throw std::invalid_argument("density operator must have unit trace");
    if (detail::min_eigenvalue(mat_) < -1e-10)
      throw std::invalid_argument("density operator must be positive semidefinite");
  }

  // skips invariant checks; for constructions that guarantee them
  static DensityOperator trusted(CMatrix m) {
    return DensityOperator(std::move(m), TrustedTag{});
  }

  static DensityOperator maximally_mixed(int dim) {
    return trusted(CMatrix::Identity(dim, dim) / static_cast<double>(dim));
  }

  int dim() const { return static_cast<int>(mat_.rows()); }
  const CMatrix& matrix() const { return mat_; }

 private:
  struct TrustedTag {};
  DensityOperator(CMatrix m, TrustedTag) : mat_(std::move(m)) {}
  CMatrix mat_;
};

/// Probability-operator measurement: K nonnegative Hermitian effects with
/// unit sum.
class Pom {
 public:
  Pom(int dim, std::vector<CMatrix> outcomes, std::string name)
      : dim_(dim), outcomes_(std::move(outcomes)), name_(std::move(name)) {
    if (outcomes_.empty()) throw std::invalid_argument("POM needs outcomes");
    CMatrix sum = CMatrix::Zero(dim_, dim_);
    for (const auto& e : outcomes_) {
      if (e.rows() != dim_ || e.cols() != dim_)
        throw std::invalid_argument("effect dimension mismatch");
      if (!detail::is_hermitian(e, 1e-10))
        throw std::invalid_argument("effect must be Hermitian");
      if (detail::min_eigenvalue(e) < -1e-10)
        throw std::invalid_argument("effect must be nonnegative");
      sum += e;
    }
    if ((sum - CMatrix::Identity(dim_, dim_)).cwiseAbs().maxCoeff() > 1e-10)
      throw std::invalid_argument("effects must sum to identity");
  }

  int dim() const { return dim_; }
  int outcome_count() const { return static_cast<int>(outcomes_.size()); }
  const CMatrix& outcome(int k) const { return outcomes_.at(k); }
  const std::vector<CMatrix>& outcomes() const { return outcomes_; }
  const std::string& name() const { return name_; }

 private:
  int dim_;
  std::vector<CMatrix> outcomes_;
  std::string name_;
};

/// Born rule: p_k = tr{Pi_k rho}.
inline ProbVector born_probabilities(const DensityOperator& rho, const Pom& pom) {
  if (rho.dim() != pom.dim())
    throw std::invalid_argument("state and POM dimensions differ");
  ProbVector p(pom.outcome_count());
  for (int k = 0; k < pom.outcome_count(); ++k)
    p[k] = (pom.outcome(k) * rho.matrix()).trace().real();
  return p;
}

/// Three-outcome trine POM in the equatorial Bloch plane:
/// p_1 = (1+x)/3, p_{2,3} = (1 - x/2 +- (sqrt3/2) y)/3.
inline Pom make_trine() {
  const double s = std::sqrt(3.0) / 2.0;
  std::vector<CMatrix> fx = {detail::bloch_effect(1.0, 0.0, 0.0, 3.0),
                             detail::bloch_effect(-0.5, s, 0.0, 3.0),
                             detail::bloch_effect(-0.5, -s, 0.0, 3.0)};
  return Pom(2, std::move(fx), "trine");
}

/// Trine with the signs of x and y reversed.
inline Pom make_antitrine() {
  const double s = std::sqrt(3.0) / 2.0;
  std::vector<CMatrix> fx = {detail::bloch_effect(-1.0, 0.0, 0.0, 3.0),
                             detail::bloch_effect(0.5, -s, 0.0, 3.0),
                             detail::bloch_effect(0.5, s, 0.0, 3.0)};
  return Pom(2, std::move(fx), "antitrine");
}

/// Four-outcome tetrahedron POM, Pi_k = (1 + a_k.sigma)/4 with the a_k at
/// tetrahedral angles (a_j.a_k = -1/3 for j != k). Orientation is fixed to
/// the (+-1,+-1,+-1)/sqrt3 axes; any rigid rotation is equivalent.
inline Pom make_tetrahedron() {
  const double c = 1.0 / std::sqrt(3.0);
  std::vector<CMatrix> fx = {detail::bloch_effect(c, c, c, 4.0),
                             detail::bloch_effect(c, -c, -c, 4.0),
                             detail::bloch_effect(-c, c, -c, 4.0),
                             detail::bloch_effect(-c, -c, c, 4.0)};
  return Pom(2, std::move(fx), "tetra");
}

/// Tensor-product POM; outcome index j*K_b + k (row-major).
inline Pom product_pom(const Pom& a, const Pom& b, std::string name = "") {
  std::vector<CMatrix> fx;
  fx.reserve(static_cast<std::size_t>(a.outcome_count()) * b.outcome_count());
  for (int j = 0; j < a.outcome_count(); ++j)
    for (int k = 0; k < b.outcome_count(); ++k)
      fx.push_back(Eigen::kroneckerProduct(a.outcome(j), b.outcome(k)).eval());
  if (name.empty()) name = a.name() + "x" + b.name();
  return Pom(a.dim() * b.dim(), std::move(fx), std::move(name));
}

inline Pom make_tat() { return product_pom(make_trine(), make_antitrine(), "tat"); }
inline Pom make_tetra_pair() {
  return product_pom(make_tetrahedron(), make_tetrahedron(), "tetra2");
}

/// Purity xi(rho) = tr{rho^2}; equals the squared Frobenius norm for
/// Hermitian rho.
inline double purity(const DensityOperator& rho) {
  return rho.matrix().squaredNorm();
}

inline double purity_from_eigenvalues(const Eigen::VectorXd& evals) {
  return evals.squaredNorm();
}

/// Partial transpose on the second qubit of a 4x4 two-qubit matrix.
inline CMatrix partial_transpose_second(const CMatrix& m) {
  if (m.rows() != 4 || m.cols() != 4)
    throw std::invalid_argument("partial transpose defined for 4x4 here");
  CMatrix out(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out.block<2, 2>(2 * i, 2 * j) = m.block<2, 2>(2 * i, 2 * j).transpose();
  return out;
}

/// Peres-Horodecki test; exact for qubit pairs.
inline bool is_ppt_separable(const DensityOperator& rho, double tol = 1e-10) {
  if (rho.dim() != 4)
    throw std::invalid_argument("PPT separability test requires dim 4");
  return detail::min_eigenvalue(partial_transpose_second(rho.matrix())) >= -tol;
}

/// Haar-random unitary: QR of a complex Ginibre matrix with the phase
/// convention that the triangular factor has positive real diagonal.
inline CMatrix haar_unitary(int dim, Rng& rng) {
  CMatrix a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = Complex(rng.gaussian(), rng.gaussian());
  Eigen::HouseholderQR<CMatrix> qr(a);
  CMatrix q = qr.householderQ();
  CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    Complex d = r(j, j);
    q.col(j) *= d / std::abs(d);
  }
  return q;
}

/// Prior I of [Zyczkowski et al.]: eigenvalues uniform on the simplex,
/// eigenbasis Haar-random.
inline DensityOperator sample_prior_one(int dim, Rng& rng) {
  if (dim < 2) throw std::invalid_argument("dim >= 2 required");
  ProbVector evals = sample_simplex_exponential(dim, rng);
  CMatrix u = haar_unitary(dim, rng);
  CMatrix m = u * evals.asDiagonal() * u.adjoint();
  m = 0.5 * (m + m.adjoint().eval());
  m /= m.trace().real();
  return DensityOperator::trusted(std::move(m));
}

/// rho = A A^dagger / tr{A A^dagger} with standard complex Gaussian A;
/// induces the primitive prior for informationally complete POMs.
inline DensityOperator sample_ginibre(int dim, Rng& rng) {
  if (dim < 2) throw std::invalid_argument("dim >= 2 required");
  CMatrix a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = Complex(rng.gaussian(), rng.gaussian());
  CMatrix m = a * a.adjoint();
  m = 0.5 * (m + m.adjoint().eval());
  m /= m.trace().real();
  return DensityOperator::trusted(std::move(m));
}

/// Linear p -> Hermitian reconstruction for informationally complete POMs.
/// The pseudo-inverse of the effect map is factorized once per POM and
/// reused across queries.
class IcReconstructor {
 public:
  explicit IcReconstructor(const Pom& pom) : dim_(pom.dim()) {
    const int d = dim_;
    const int K = pom.outcome_count();
    const int n = d * d;
    // real parameterization of Hermitian M: diagonal, then (Re, Im) per i<j
    Eigen::MatrixXd map(K, n);
    for (int k = 0; k < K; ++k) {
      const CMatrix& e = pom.outcome(k);
      int c = 0;
      for (int i = 0; i < d; ++i) map(k, c++) = e(i, i).real();
      for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
          map(k, c++) = 2.0 * e(i, j).real();
          map(k, c++) = 2.0 * e(i, j).imag();
        }
    }
    cod_.compute(map);
    if (cod_.rank() < n)
      throw std::invalid_argument("POM is not informationally complete");
  }

  /// The unique Hermitian unit-trace M with tr{Pi_k M} = p_k; Hermitian but
  /// possibly non-positive when p is unphysical.
  CMatrix reconstruct(const ProbVector& p) const {
    Eigen::VectorXd v = cod_.solve(p);
    const int d = dim_;
    CMatrix m(d, d);
    int c = 0;
    for (int i = 0; i < d; ++i) m(i, i) = v[c++];
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        m(i, j) = Complex(v[c], v[c + 1]);
        m(j, i) = Complex(v[c], -v[c + 1]);
        c += 2;
      }
    return m;
  }

  double min_eigenvalue(const ProbVector& p) const {
    return detail::min_eigenvalue(reconstruct(p));
  }

 private:
  int dim_;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod_;
};

/// One-shot reconstruction; prefer a cached IcReconstructor in loops.
inline CMatrix reconstruct_ic(const ProbVector& p, const Pom& pom) {
  return IcReconstructor(pom).reconstruct(p);
}

}  // namespace qss
