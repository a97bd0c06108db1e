#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qss/densities.hpp"
#include "qss/physicality.hpp"
#include "qss/quantum.hpp"
#include "qss/samplers.hpp"

namespace qss {

struct RegionEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Weighted fraction of the sample inside the region. Binomial standard
/// error for unit weights, ratio-estimator delta method otherwise.
inline RegionEstimate region_probability(
    const WeightedSample& sample,
    const std::function<bool(const ProbVector&)>& region) {
  if (sample.points.empty()) throw std::invalid_argument("empty sample");
  const double wsum = sample.weight_sum();
  if (wsum <= 0.0) throw std::invalid_argument("sample has zero total weight");

  double win = 0.0;
  std::vector<bool> inside(sample.points.size());
  bool unit_weights = true;
  for (std::size_t j = 0; j < sample.points.size(); ++j) {
    inside[j] = region(sample.points[j]);
    if (inside[j]) win += sample.weights[j];
    if (sample.weights[j] != 1.0) unit_weights = false;
  }
  RegionEstimate out;
  out.estimate = win / wsum;
  if (unit_weights) {
    const double n = wsum;
    out.std_error = std::sqrt(out.estimate * (1.0 - out.estimate) / n);
  } else {
    double s = 0.0;
    for (std::size_t j = 0; j < sample.points.size(); ++j) {
      const double dev = (inside[j] ? 1.0 : 0.0) - out.estimate;
      s += sample.weights[j] * sample.weights[j] * dev * dev;
    }
    out.std_error = std::sqrt(s) / wsum;
  }
  return out;
}

struct SizeCurve {
  std::vector<double> lambdas;
  std::vector<double> sizes;
  std::vector<double> std_errors;
  double logl_max = 0.0;
  double ess = 0.0;
  std::string warning;
};

inline std::vector<double> default_lambda_grid(int n = 21) {
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) grid[i] = static_cast<double>(i) / (n - 1);
  return grid;
}

/// Prior content s_lambda of the bounded-likelihood regions
/// L(D|p) >= lambda L_max; expects a prior-target sample.
inline SizeCurve size_curve(const WeightedSample& sample, const Dataset& data,
                            const Pom& pom,
                            std::vector<double> lambda_grid = default_lambda_grid()) {
  auto [p_ml, logl_max] = maximize_likelihood(data, pom);
  (void)p_ml;
  SizeCurve curve;
  curve.logl_max = logl_max;
  curve.ess = sample.effective_sample_size();
  for (double lam : lambda_grid) {
    auto pred = [&, lam](const ProbVector& p) {
      if (lam <= 0.0) return true;
      return log_likelihood(p, data) >= std::log(lam) + logl_max;
    };
    RegionEstimate est = region_probability(sample, pred);
    curve.lambdas.push_back(lam);
    curve.sizes.push_back(est.estimate);
    curve.std_errors.push_back(est.std_error);
  }
  return curve;
}

/// Credibility c_lambda of the same region family: a prior sample is
/// importance-reweighted by the likelihood; a posterior-target sample with
/// its own weights passes through unchanged (set reweight = false).
inline SizeCurve credibility_curve(const WeightedSample& sample, const Dataset& data,
                                   const Pom& pom,
                                   std::vector<double> lambda_grid = default_lambda_grid(),
                                   bool reweight = true) {
  auto [p_ml, logl_max] = maximize_likelihood(data, pom);
  (void)p_ml;
  WeightedSample posterior = sample;
  if (reweight) {
    for (std::size_t j = 0; j < posterior.points.size(); ++j) {
      const double ll = log_likelihood(posterior.points[j], data);
      posterior.weights[j] *= ll > kNegInf ? std::exp(ll - logl_max) : 0.0;
    }
  }
  SizeCurve curve;
  curve.logl_max = logl_max;
  curve.ess = posterior.effective_sample_size();
  if (curve.ess < 10.0) curve.warning = "degenerate effective sample size";
  for (double lam : lambda_grid) {
    auto pred = [&, lam](const ProbVector& p) {
      if (lam <= 0.0) return true;
      return log_likelihood(p, data) >= std::log(lam) + logl_max;
    };
    RegionEstimate est = region_probability(posterior, pred);
    curve.lambdas.push_back(lam);
    curve.sizes.push_back(est.estimate);
    curve.std_errors.push_back(est.std_error);
  }
  return curve;
}

struct Histogram {
  double lo = 0.0, hi = 1.0;
  std::vector<double> centers;
  std::vector<double> densities;  // normalized: sum(density * width) = 1
  std::vector<double> counts;     // weighted counts per bin
  double bin_width() const { return (hi - lo) / centers.size(); }
};

inline Histogram weighted_histogram(const std::vector<double>& values,
                                    const std::vector<double>& weights, double lo,
                                    double hi, int bins) {
  if (bins < 1 || hi <= lo) throw std::invalid_argument("bad histogram spec");
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.counts.assign(bins, 0.0);
  const double width = (hi - lo) / bins;
  double total = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    const double w = weights.empty() ? 1.0 : weights[j];
    if (w <= 0.0) continue;
    int b = static_cast<int>((values[j] - lo) / width);
    b = std::min(std::max(b, 0), bins - 1);
    h.counts[b] += w;
    total += w;
  }
  if (total <= 0.0) throw std::invalid_argument("histogram has zero total weight");
  for (int b = 0; b < bins; ++b) {
    h.centers.push_back(lo + (b + 0.5) * width);
    h.densities.push_back(h.counts[b] / (total * width));
  }
  return h;
}

/// Purity histogram over [1/d, 1] from explicit states.
inline Histogram purity_histogram(const std::vector<DensityOperator>& states,
                                  int bins = 40) {
  if (states.empty()) throw std::invalid_argument("no states");
  const int d = states.front().dim();
  std::vector<double> xi;
  xi.reserve(states.size());
  for (const auto& s : states) xi.push_back(purity(s));
  return weighted_histogram(xi, {}, 1.0 / d, 1.0, bins);
}

/// Purity histogram from a probability-space sample. Uses the tetrahedron
/// identity xi = 6 sum p^2 - 1 when applicable, otherwise reconstructs via
/// the IC map.
inline Histogram purity_histogram(const WeightedSample& sample, const Pom& pom,
                                  int bins = 40) {
  if (sample.points.empty()) throw std::invalid_argument("empty sample");
  const int d = pom.dim();
  std::vector<double> xi;
  xi.reserve(sample.points.size());
  if (pom.name() == "tetra" && pom.outcome_count() == 4) {
    for (const auto& p : sample.points) xi.push_back(6.0 * p.squaredNorm() - 1.0);
  } else {
    IcReconstructor rec(pom);  // throws for non-IC POMs
    for (const auto& p : sample.points)
      xi.push_back(rec.reconstruct(p).squaredNorm());
  }
  return weighted_histogram(xi, sample.weights, 1.0 / d, 1.0, bins);
}

enum class PriorLabel { I, II };

struct PurityDensityValue {
  double value = 0.0;
  bool normalized = true;
};

/// Closed-form purity densities. Prior I: d = 2, 3, 4 over the full range.
/// Prior II: d = 2 over the full range; d = 3 and d = 4 only on
/// [1/3, 1/2] resp. [1/4, 1/3] and only up to normalization.
inline PurityDensityValue analytic_purity_density(PriorLabel prior, int dim,
                                                  double xi) {
  const double pi = std::acos(-1.0);
  if (dim < 2 || dim > 4) throw std::invalid_argument("dim in {2,3,4}");
  if (xi < 1.0 / dim - 1e-12 || xi > 1.0 + 1e-12)
    throw std::invalid_argument("purity outside [1/d, 1]");
  xi = std::min(std::max(xi, 1.0 / dim), 1.0);

  if (prior == PriorLabel::I) {
    if (dim == 2) return {1.0 / std::sqrt(std::max(2.0 * xi - 1.0, 1e-300)), true};
    if (dim == 3) {
      if (xi <= 0.5) return {2.0 * pi / std::sqrt(3.0), true};
      return {std::sqrt(3.0) *
                  (pi / 6.0 - std::asin((3.0 * xi - 2.0) / (3.0 * xi - 1.0))),
              true};
    }
    // dim == 4
    if (xi <= 1.0 / 3.0) return {3.0 * pi * std::sqrt(4.0 * xi - 1.0), true};
    if (xi <= 0.5)
      return {2.0 * std::sqrt(3.0) * pi - 3.0 * pi * std::sqrt(4.0 * xi - 1.0), true};
    // the two printed branches on [1/2, 1] add up
    const double b1 =
        3.0 * std::sqrt(3.0) *
        (std::acos((3.0 * xi - 2.0) / (3.0 * xi - 1.0)) - pi / 3.0);
    const double b2 = -9.0 * std::sqrt(4.0 * xi - 1.0) *
                      (std::asin(xi / (3.0 * xi - 1.0)) - pi / 6.0);
    return {b1 + b2, true};
  }

  // prior II
  if (dim == 2) return {3.0 * std::sqrt(std::max(2.0 * xi - 1.0, 0.0)), true};
  if (dim == 3) {
    if (xi > 0.5 + 1e-12)
      throw std::invalid_argument("prior II d=3 density known only on [1/3, 1/2]");
    return {std::pow(3.0 * xi - 1.0, 3.0), false};
  }
  if (xi > 1.0 / 3.0 + 1e-12)
    throw std::invalid_argument("prior II d=4 density known only on [1/4, 1/3]");
  return {std::pow(4.0 * xi - 1.0, 6.5), false};
}

struct SeparableFraction {
  RegionEstimate overall;
  std::vector<double> bin_centers;          // purity bin centers, if binned
  std::vector<RegionEstimate> per_bin;
  std::vector<long> bin_counts;
};

/// PPT fraction over two-qubit states, overall and optionally conditioned
/// on purity bins.
inline SeparableFraction separable_fraction(const std::vector<DensityOperator>& states,
                                            int purity_bins = 0) {
  if (states.empty()) throw std::invalid_argument("no states");
  SeparableFraction out;
  long sep = 0;
  std::vector<long> bin_n, bin_sep;
  const double lo = 0.25, hi = 1.0;
  if (purity_bins > 0) {
    bin_n.assign(purity_bins, 0);
    bin_sep.assign(purity_bins, 0);
  }
  for (const auto& s : states) {
    const bool ok = is_ppt_separable(s);
    if (ok) ++sep;
    if (purity_bins > 0) {
      int b = static_cast<int>((purity(s) - lo) / (hi - lo) * purity_bins);
      b = std::min(std::max(b, 0), purity_bins - 1);
      ++bin_n[b];
      if (ok) ++bin_sep[b];
    }
  }
  const double n = static_cast<double>(states.size());
  out.overall.estimate = sep / n;
  out.overall.std_error =
      std::sqrt(out.overall.estimate * (1.0 - out.overall.estimate) / n);
  for (int b = 0; b < purity_bins; ++b) {
    out.bin_centers.push_back(lo + (b + 0.5) * (hi - lo) / purity_bins);
    out.bin_counts.push_back(bin_n[b]);
    RegionEstimate e;
    if (bin_n[b] >  0) {
      e.estimate = static_cast<double>(bin_sep[b]) / bin_n[b];
      e.std_error = std::sqrt(e.estimate * (1.0 - e.estimate) / bin_n[b]);
    }
    out.per_bin.push_back(e);
  }
  return out;
}

}  // namespace qss
