#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qss/densities.hpp"
#include "qss/physicality.hpp"
#include "qss/quantum.hpp"
#include "qss/rng.hpp"
#include "qss/simplex.hpp"

namespace qss {

struct SampleMeta {
  std::string method;
  std::string pom_name;
  std::string target;
  std::uint64_t seed = 0;
  double acceptance_rate = 0.0;
  long proposals_total = 0;
  double ess = 0.0;
  double sigma_final = 0.0;
  std::string rng_name{Rng::kName};
  std::string warning;
};

/// Points with nonnegative weights; weights are all 1 for rejection and
/// MCMC output, and every point with positive weight is physical.
struct WeightedSample {
  std::vector<ProbVector> points;
  std::vector<double> weights;
  SampleMeta meta;

  double weight_sum() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }

  double effective_sample_size() const {
    double s = 0.0, s2 = 0.0;
    for (double w : weights) {
      s += w;
      s2 += w * w;
    }
    return s2 > 0.0 ? s * s / s2 : 0.0;
  }
};

struct ChainConfig {
  double step_sigma = 0.1;
  long length = 100000;      // total chain steps including burn-in
  long burn_in = 10000;
  long thinning = 1;
  bool tune = false;         // adapt sigma during burn-in only
  double tune_target = 0.23;
  std::uint64_t seed = 0;
};

/// Rejection sampling against the uniform-on-simplex reference: discard
/// unphysical draws, accept physical p with probability
/// exp(log r(p) - log_R_bound).
inline WeightedSample rejection_sample(const TargetDensity& target,
                                       const PhysicalityChecker& checker,
                                       long n_accept_goal, Rng& rng,
                                       double log_R_bound,
                                       long max_proposals = 500000000L) {
  const int K = checker.pom().outcome_count();
  WeightedSample out;
  out.meta.method = "reject";
  out.meta.pom_name = checker.pom().name();
  out.meta.target = target_kind_name(target.kind);
  long proposed = 0;
  while (static_cast<long>(out.points.size()) < n_accept_goal) {
    if (proposed >= max_proposals) {
      if (out.points.empty())
        throw std::runtime_error(
            "rejection sampling: no acceptances within proposal budget (" +
            std::to_string(max_proposals) + " proposals, target " +
            out.meta.target + ")");
      break;
    }
    ProbVector p = sample_simplex_exponential(K, rng);
    ++proposed;
    if (!checker.is_physical(p)) continue;
    const double logr = std::min(log_ratio_r(p, target), log_R_bound);
    if (std::log(rng.uniform()) < logr - log_R_bound) {
      out.points.push_back(std::move(p));
      out.weights.push_back(1.0);
    }
  }
  out.meta.proposals_total = proposed;
  out.meta.acceptance_rate =
      proposed > 0 ? static_cast<double>(out.points.size()) / proposed : 0.0;
  out.meta.ess = static_cast<double>(out.points.size());
  return out;
}

/// Importance sampling: every uniform-simplex draw is kept; unphysical
/// points carry weight 0, physical ones weight exp(log r - c) with a single
/// shared shift c = max observed log r.
inline WeightedSample importance_sample(const TargetDensity& target,
                                        const PhysicalityChecker& checker,
                                        long n_points, Rng& rng) {
  const int K = checker.pom().outcome_count();
  WeightedSample out;
  out.meta.method = "importance";
  out.meta.pom_name = checker.pom().name();
  out.meta.target = target_kind_name(target.kind);
  std::vector<double> logr(n_points, kNegInf);
  long physical = 0;
  for (long i = 0; i < n_points; ++i) {
    ProbVector p = sample_simplex_exponential(K, rng);
    if (checker.is_physical(p)) {
      logr[i] = log_ratio_r(p, target);
      ++physical;
    }
    out.points.push_back(std::move(p));
  }
  double shift = kNegInf;
  for (double v : logr) shift = std::max(shift, v);
  out.weights.resize(n_points, 0.0);
  if (physical > 0) {
    for (long i = 0; i < n_points; ++i)
      if (logr[i] > kNegInf) out.weights[i] = std::exp(logr[i] - shift);
  }
  out.meta.proposals_total = n_points;
  out.meta.acceptance_rate =
      n_points > 0 ? static_cast<double>(physical) / n_points : 0.0;
  out.meta.ess = out.effective_sample_size();
  return out;
}

/// Generic Metropolis-Hastings with a symmetric proposal; rejected
/// proposals repeat the current point.
inline std::vector<Eigen::VectorXd> mhmc_generic(
    const std::function<double(const Eigen::VectorXd&)>& target_log_density,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&, Rng&)>& propose,
    Eigen::VectorXd start, long length, Rng& rng, long* accepted_out = nullptr) {
  double lf = target_log_density(start);
  if (!(lf > kNegInf))
    throw std::invalid_argument("MHMC start has zero target density");
  std::vector<Eigen::VectorXd> chain;
  chain.reserve(length);
  chain.push_back(start);
  long accepted = 0;
  Eigen::VectorXd cur = std::move(start);
  for (long j = 1; j < length; ++j) {
    Eigen::VectorXd prop = propose(cur, rng);
    const double lf_new = target_log_density(prop);
    if (lf_new > kNegInf && std::log(rng.uniform()) < lf_new - lf) {
      cur = std::move(prop);
      lf = lf_new;
      ++accepted;
    }
    chain.push_back(cur);
  }
  if (accepted_out) *accepted_out = accepted;
  return chain;
}

/// x-parameterized MHMC on the unit hypersphere (p = x^2). The Jacobian
/// contributes sum_k (1/2) ln p_k to the log target; unphysical proposals
/// are zero-density rejections inside the MH step. With tuning on, sigma
/// adapts toward tune_target during burn-in only and is frozen afterward.
inline WeightedSample xmhmc_sample(const TargetDensity& target,
                                   const PhysicalityChecker& checker,
                                   const ChainConfig& cfg, Rng& rng) {
  if (cfg.burn_in >= cfg.length)
    throw std::invalid_argument("burn_in must be smaller than chain length");
  const Pom& pom = checker.pom();
  const int K = pom.outcome_count();

  auto log_target_x = [&](const ProbVector& p) {
    double lt = target.log_density(p);
    if (!(lt > kNegInf)) return kNegInf;
    for (int k = 0; k < K; ++k) {
      if (p[k] <= 0.0) return kNegInf;
      lt += 0.5 * std::log(p[k]);
    }
    return lt;
  };

  ProbVector p = born_probabilities(DensityOperator::maximally_mixed(pom.dim()), pom);
  Eigen::VectorXd x = p.cwiseSqrt();
  double lt = log_target_x(p);

  WeightedSample out;
  out.meta.method = "mcmc";
  out.meta.pom_name = pom.name();
  out.meta.target = target_kind_name(target.kind);
  out.meta.seed = cfg.seed;

  double sigma = cfg.step_sigma;
  long accepted_post = 0, proposed_post = 0;
  long window_accepted = 0, window_proposed = 0;

  for (long j = 0; j < cfg.length; ++j) {
    Eigen::VectorXd dx(K);
    for (int k = 0; k < K; ++k) dx[k] = sigma * rng.gaussian();
    Eigen::VectorXd x_star = x + dx;
    x_star /= x_star.norm();
    ProbVector p_star = x_star.cwiseAbs2();
    // renormalize away rounding drift so downstream checks see a simplex point
    p_star /= p_star.sum();

    bool accept = false;
    if (checker.is_physical(p_star)) {
      const double lt_star = log_target_x(p_star);
      if (lt_star > kNegInf && std::log(rng.uniform()) < lt_star - lt) {
        accept = true;
        lt = lt_star;
      }
    }
    if (accept) {
      x = std::move(x_star);
      p = std::move(p_star);
    }

    const bool in_burn_in = j < cfg.burn_in;
    if (in_burn_in) {
      if (cfg.tune) {
        ++window_proposed;
        if (accept) ++window_accepted;
        if (window_proposed == 100) {
          const double rate = static_cast<double>(window_accepted) / 100.0;
          sigma *= rate > cfg.tune_target ? 1.1 : 0.9;
          window_proposed = 0;
          window_accepted = 0;
        }
      }
    } else {
      ++proposed_post;
      if (accept) ++accepted_post;
      if ((j - cfg.burn_in) % cfg.thinning == 0) {
        out.points.push_back(p);
        out.weights.push_back(1.0);
      }
    }
  }

  out.meta.proposals_total = cfg.length;
  out.meta.acceptance_rate =
      proposed_post > 0 ? static_cast<double>(accepted_post) / proposed_post : 0.0;
  out.meta.sigma_final = sigma;
  out.meta.ess = static_cast<double>(out.points.size());
  return out;
}

/// Probe a grid of step sizes with short chains; returns the sigma whose
/// acceptance is closest to 0.23 plus the full table.
inline std::pair<double, std::vector<std::pair<double, double>>> tune_step_size(
    const TargetDensity& target, const PhysicalityChecker& checker,
    const std::vector<double>& sigma_grid, long probe_length, Rng& rng) {
  std::vector<std::pair<double, double>> table;
  double best_sigma = sigma_grid.front();
  double best_gap = kPosInf;
  for (double sigma : sigma_grid) {
    ChainConfig cfg;
    cfg.step_sigma = sigma;
    cfg.length = probe_length;
    cfg.burn_in = probe_length / 10;
    cfg.tune = false;
    WeightedSample probe = xmhmc_sample(target, checker, cfg, rng);
    table.emplace_back(sigma, probe.meta.acceptance_rate);
    const double gap = std::abs(probe.meta.acceptance_rate - 0.23);
    if (gap < best_gap) {
      best_gap = gap;
      best_sigma = sigma;
    }
  }
  return {best_sigma, table};
}

}  // namespace qss
