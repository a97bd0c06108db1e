#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qss/densities.hpp"
#include "qss/quantum.hpp"

namespace qss {

/// Figure-of-merit functional Q(p; p_hat) with max 0 at p_hat = p.
enum class QKind { KL, Bhattacharyya };

inline double q_value(QKind kind, const ProbVector& p, const ProbVector& phat) {
  double q = 0.0;
  if (kind == QKind::KL) {
    for (int k = 0; k < p.size(); ++k) {
      if (p[k] <= 0.0) continue;
      if (phat[k] <= 0.0) return kNegInf;
      q += p[k] * std::log(phat[k] / p[k]);
    }
  } else {
    for (int k = 0; k < p.size(); ++k)
      q += std::sqrt(std::max(p[k], 0.0) * std::max(phat[k], 0.0));
    q -= 1.0;
  }
  return q;
}

inline void q_derivatives(QKind kind, const ProbVector& p, const ProbVector& phat,
                          ProbVector& out) {
  const double floor = 1e-300;
  if (kind == QKind::KL) {
    for (int k = 0; k < p.size(); ++k)
      out[k] = p[k] <= 0.0 ? 0.0 : p[k] / std::max(phat[k], floor);
  } else {
    for (int k = 0; k < p.size(); ++k)
      out[k] = p[k] <= 0.0 ? 0.0
                           : 0.5 * std::sqrt(p[k] / std::max(phat[k], floor));
  }
}

enum class AscentMethod { DG, CG };

struct AscentConfig {
  double epsilon_step = 0.05;   // gradient step, halved on Q decrease
  double precision = 1e-8;      // trace-norm convergence threshold
  double chi = 0.0;             // Polak-Ribiere damping
  int max_iterations = 20000;
  AscentMethod method = AscentMethod::CG;
  double q_tolerance = 1e-8;    // physicality verdict threshold on q_max
  bool record_trajectory = false;
  QKind q_kind = QKind::KL;
};

struct AscentResult {
  double q_max = kNegInf;
  CMatrix rho_hat;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trajectory;  // Q per accepted step if recorded
};

namespace detail {

inline double trace_norm(const CMatrix& m) {
  return Eigen::JacobiSVD<CMatrix>(m).singularValues().sum();
}

// Gradient ascent of Q over rho_hat = A^dagger A / tr{A^dagger A}.
// `derivs(phat, c)` fills c_k = dQ/dphat_k, `value(phat)` evaluates Q.
template <typename DerivFn, typename ValueFn>
AscentResult ascend(const Pom& pom, const AscentConfig& cfg, DerivFn&& derivs,
                    ValueFn&& value) {
  const int d = pom.dim();
  const int K = pom.outcome_count();

  CMatrix a = CMatrix::Identity(d, d);
  CMatrix rho = CMatrix::Identity(d, d) / static_cast<double>(d);
  ProbVector phat(K), coeff(K);
  auto born = [&](const CMatrix& r, ProbVector& out) {
    for (int k = 0; k < K; ++k) out[k] = (pom.outcome(k) * r).trace().real();
  };
  auto normalize = [&](const CMatrix& m) {
    CMatrix r = m.adjoint() * m;
    r = 0.5 * (r + r.adjoint().eval());
    return (r / r.trace().real()).eval();
  };

  born(rho, phat);
  double q = value(phat);
  double eps = cfg.epsilon_step;

  AscentResult res;
  res.rho_hat = rho;
  res.q_max = q;
  if (cfg.record_trajectory) res.trajectory.push_back(q);

  CMatrix g_prev, h_prev;
  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    res.iterations = iter;
    derivs(phat, coeff);
    CMatrix r_op = CMatrix::Zero(d, d);
    for (int k = 0; k < K; ++k) r_op += coeff[k] * pom.outcome(k);
    const double r_avg = (r_op * rho).trace().real();
    CMatrix m = r_op - r_avg * CMatrix::Identity(d, d);

    if (trace_norm(m * rho) <= cfg.precision) {
      res.converged = true;
      break;
    }

    CMatrix g = a * m;
    CMatrix h = g;
    if (cfg.method == AscentMethod::CG && g_prev.size() > 0) {
      const double denom = (g_prev.adjoint() * g_prev).trace().real();
      if (denom > 0.0) {
        const double gamma = std::max(
            (g.adjoint() * (g - cfg.chi * g_prev)).trace().real() / denom, 0.0);
        h = g + gamma * h_prev;
      }
    }

    // step with halving on Q decrease; CG memory resets on a shrink
    bool stepped = false;
    ProbVector phat_new(K);
    while (eps > 1e-14) {
      CMatrix a_new = a + eps * h;
      CMatrix rho_new = normalize(a_new);
      born(rho_new, phat_new);
      const double q_new = value(phat_new);
      if (q_new >= q - 1e-15) {
        a = a_new / a_new.norm();
        rho = rho_new;
        phat = phat_new;
        q = q_new;
        stepped = true;
        break;
      }
      eps *= 0.5;
      h = g;
    }
    if (!stepped) {
      res.converged = true;  // step underflow: at a numerical stationary point
      break;
    }

    g_prev = g;
    h_prev = h;
    res.q_max = q;
    res.rho_hat = rho;
    if (cfg.record_trajectory) res.trajectory.push_back(q);
  }
  res.q_max = q;
  res.rho_hat = rho;
  return res;
}

}  // namespace detail

/// max_{rho_hat} Q(p; born(rho_hat)) via DG/CG ascent in the A
/// parameterization; q_max = 0 within tolerance iff p is physical.
inline AscentResult maximize_q(const ProbVector& p, const Pom& pom,
                               const AscentConfig& cfg = {}) {
  require_prob_vector(p);
  return detail::ascend(
      pom, cfg,
      [&](const ProbVector& phat, ProbVector& c) {
        q_derivatives(cfg.q_kind, p, phat, c);
      },
      [&](const ProbVector& phat) { return q_value(cfg.q_kind, p, phat); });
}

/// Maximum-likelihood state and log L_max for the given data. Runs the
/// same ascent with Q = sum_k (n_k/N) ln phat_k.
inline std::pair<ProbVector, double> maximize_likelihood(const Dataset& data,
                                                         const Pom& pom,
                                                         AscentConfig cfg = {}) {
  const long N = data.total();
  if (N <= 0) throw std::invalid_argument("dataset has no clicks");
  const int K = pom.outcome_count();
  if (static_cast<int>(data.counts.size()) != K)
    throw std::invalid_argument("dataset/POM outcome count mismatch");
  ProbVector f(K);
  for (int k = 0; k < K; ++k) f[k] = static_cast<double>(data.counts[k]) / N;

  AscentResult res = detail::ascend(
      pom, cfg,
      [&](const ProbVector& phat, ProbVector& c) {
        for (int k = 0; k < K; ++k)
          c[k] = f[k] <= 0.0 ? 0.0 : f[k] / std::max(phat[k], 1e-300);
      },
      [&](const ProbVector& phat) {
        double q = 0.0;
        for (int k = 0; k < K; ++k) {
          if (f[k] <= 0.0) continue;
          if (phat[k] <= 0.0) return kNegInf;
          q += f[k] * std::log(phat[k]);
        }
        return q;
      });
  if (!res.converged)
    throw std::runtime_error("maximize_likelihood did not converge");

  ProbVector p_ml(K);
  for (int k = 0; k < K; ++k)
    p_ml[k] = (pom.outcome(k) * res.rho_hat).trace().real();
  double logl = 0.0;
  for (int k = 0; k < K; ++k)
    if (data.counts[k] > 0) logl += data.counts[k] * std::log(p_ml[k]);
  return {p_ml, logl};
}

/// IC fast path: p is physical iff the linear reconstruction is
/// positive semidefinite.
inline bool is_physical_ic(const ProbVector& p, const IcReconstructor& rec,
                           double tol = 1e-10) {
  return rec.min_eigenvalue(p) >= -tol;
}

inline bool is_physical_ic(const ProbVector& p, const Pom& pom, double tol = 1e-10) {
  return is_physical_ic(p, IcReconstructor(pom), tol);
}

namespace detail {

// TAT reconstruction machinery. The nine probabilities fix eight real
// parameters (single-qubit x/y Bloch components and the xy correlation
// block); the representative family leaves <sigma_z sigma_z> = t free.
struct TatMaps {
  Eigen::MatrixXd pinv;              // 8x9, solves 9p - 1 -> parameters
  std::array<CMatrix, 8> basis;      // operators paired with the parameters
  CMatrix zz;

  TatMaps() {
    const double s3 = std::sqrt(3.0) / 2.0;
    const double ax[3] = {1.0, -0.5, -0.5};
    const double ay[3] = {0.0, s3, -s3};
    // antitrine axes: trine with x and y reversed
    Eigen::MatrixXd map(9, 8);
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        const double bx = -ax[k], by = -ay[k];
        map.row(3 * j + k) << ax[j], ay[j], bx, by, ax[j] * bx, ax[j] * by,
            ay[j] * bx, ay[j] * by;
      }
    pinv = map.completeOrthogonalDecomposition().pseudoInverse();

    auto kron = [](const CMatrix& a, const CMatrix& b) {
      return Eigen::kroneckerProduct(a, b).eval();
    };
    const CMatrix id = pauli(0), x = pauli(1), y = pauli(2), z = pauli(3);
    basis = {kron(x, id), kron(y, id), kron(id, x), kron(id, y),
             kron(x, x),  kron(x, y),  kron(y, x),  kron(y, y)};
    zz = kron(z, z);
  }
};

inline const TatMaps& tat_maps() {
  static const TatMaps maps;
  return maps;
}

}  // namespace detail

/// TAT structure check: recover the eight determined parameters, then
/// search t = <sigma_z sigma_z> in [-1,1] for a positive-semidefinite
/// representative. The minimum eigenvalue is concave in t; a coarse scan
/// brackets the maximum and golden-section refines it, with a dense grid
/// fallback if the scan and the refinement disagree.
inline bool is_physical_tat(const ProbVector& p, double tol = 1e-10) {
  if (p.size() != 9) throw std::invalid_argument("TAT check needs 9 entries");
  require_prob_vector(p);
  const auto& maps = detail::tat_maps();
  Eigen::VectorXd rhs = 9.0 * p - Eigen::VectorXd::Ones(9);
  Eigen::VectorXd theta = maps.pinv * rhs;

  CMatrix base = CMatrix::Identity(4, 4);
  for (int i = 0; i < 8; ++i) base += theta[i] * maps.basis[i];

  auto min_eig = [&](double t) {
    return detail::min_eigenvalue(((base + t * maps.zz) / 4.0).eval());
  };

  // coarse bracket; early out as soon as any evaluation clears the bar
  const int n_coarse = 9;
  double best_t = -1.0, best_v = kNegInf;
  for (int i = 0; i < n_coarse; ++i) {
    const double t = -1.0 + 2.0 * i / (n_coarse - 1);
    const double v = min_eig(t);
    if (v >= -tol) return true;
    if (v > best_v) {
      best_v = v;
      best_t = t;
    }
  }

  const double step = 2.0 / (n_coarse - 1);
  double lo = std::max(-1.0, best_t - step);
  double hi = std::min(1.0, best_t + step);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  double fc = min_eig(c), fd = min_eig(d);
  while (hi - lo > 1e-6) {
    if (fc >= -tol || fd >= -tol) return true;
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = min_eig(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = min_eig(d);
    }
  }
  double refined = std::max({best_v, fc, fd});
  if (refined >= -tol) return true;

  // concavity should make this unreachable; scan densely if the refinement
  // somehow lost to the coarse scan
  if (refined < best_v - 1e-12) {
    for (int i = 0; i <= 2000; ++i) {
      if (min_eig(-1.0 + i * 1e-3) >= -tol) return true;
    }
  }
  return false;
}

/// Physicality dispatcher. Picks the fastest applicable check for the POM
/// (TAT parameter search, IC reconstruction, Q ascent); a cached instance
/// amortizes the IC factorization over many queries.
class PhysicalityChecker {
 public:
  explicit PhysicalityChecker(const Pom& pom, AscentConfig cfg = {},
                              bool force_ascent = false)
      : pom_(pom), cfg_(cfg) {
    if (!force_ascent) {
      if (pom.name() == "tat" && pom.outcome_count() == 9 && pom.dim() == 4) {
        mode_ = Mode::Tat;
      } else {
        try {
          ic_.emplace(pom);
          mode_ = Mode::Ic;
        } catch (const std::invalid_argument&) {
          mode_ = Mode::Ascent;
        }
      }
    }
  }

  bool is_physical(const ProbVector& p) const {
    switch (mode_) {
      case Mode::Tat:
        return is_physical_tat(p);
      case Mode::Ic:
        return is_physical_ic(p, *ic_);
      case Mode::Ascent: {
        AscentResult r = maximize_q(p, pom_, cfg_);
        iterations_ += r.iterations;
        return r.q_max >= -cfg_.q_tolerance;
      }
    }
    return false;
  }

  /// q_max where the ascent runs it; 0 placeholder for the fast paths.
  double q_max(const ProbVector& p) const {
    if (mode_ != Mode::Ascent) return is_physical(p) ? 0.0 : kNegInf;
    AscentResult r = maximize_q(p, pom_, cfg_);
    iterations_ += r.iterations;
    return r.q_max;
  }

  long total_iterations() const { return iterations_; }
  const Pom& pom() const { return pom_; }

 private:
  enum class Mode { Tat, Ic, Ascent };
  Pom pom_;
  AscentConfig cfg_;
  Mode mode_ = Mode::Ascent;
  std::optional<IcReconstructor> ic_;
  mutable long iterations_ = 0;
};

/// One-shot convenience wrapper over PhysicalityChecker.
inline bool is_physical(const ProbVector& p, const Pom& pom,
                        const AscentConfig& cfg = {}) {
  return PhysicalityChecker(pom, cfg).is_physical(p);
}

}  // namespace qss
