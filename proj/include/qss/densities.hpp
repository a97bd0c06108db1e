#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qss/simplex.hpp"

namespace qss {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kPosInf = std::numeric_limits<double>::infinity();

/// Click counts per detector.
struct Dataset {
  std::vector<long> counts;

  long total() const {
    long n = 0;
    for (long c : counts) n += c;
    return n;
  }

  static Dataset parse_csv(const std::string& csv) {
    Dataset d;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      long v = std::stol(tok);
      if (v < 0) throw std::invalid_argument("counts must be nonnegative");
      d.counts.push_back(v);
    }
    if (d.counts.empty()) throw std::invalid_argument("empty dataset");
    return d;
  }
};

enum class PriorKind { Primitive, Jeffreys };

enum class TargetKind {
  PriorPrimitive,
  PriorJeffreys,
  PosteriorPrimitive,
  PosteriorJeffreys,
};

inline PriorKind prior_of(TargetKind t) {
  return (t == TargetKind::PriorJeffreys || t == TargetKind::PosteriorJeffreys)
             ? PriorKind::Jeffreys
             : PriorKind::Primitive;
}

inline bool is_posterior(TargetKind t) {
  return t == TargetKind::PosteriorPrimitive || t == TargetKind::PosteriorJeffreys;
}

inline std::string target_kind_name(TargetKind t) {
  switch (t) {
    case TargetKind::PriorPrimitive: return "prior-primitive";
    case TargetKind::PriorJeffreys: return "prior-jeffreys";
    case TargetKind::PosteriorPrimitive: return "posterior-primitive";
    case TargetKind::PosteriorJeffreys: return "posterior-jeffreys";
  }
  return "?";
}

inline TargetKind parse_target_kind(const std::string& s) {
  if (s == "prior-primitive") return TargetKind::PriorPrimitive;
  if (s == "prior-jeffreys") return TargetKind::PriorJeffreys;
  if (s == "posterior-primitive") return TargetKind::PosteriorPrimitive;
  if (s == "posterior-jeffreys") return TargetKind::PosteriorJeffreys;
  throw std::invalid_argument("unknown target kind: " + s);
}

/// log L(D|p) = sum_k n_k ln p_k with 0 ln 0 = 0; -inf when some p_k = 0
/// carries counts.
inline double log_likelihood(const ProbVector& p, const Dataset& data) {
  if (static_cast<std::size_t>(p.size()) != data.counts.size())
    throw std::invalid_argument("probability/count length mismatch");
  double s = 0.0;
  for (int k = 0; k < p.size(); ++k) {
    long n = data.counts[k];
    if (n == 0) continue;
    if (p[k] <= 0.0) return kNegInf;
    s += static_cast<double>(n) * std::log(p[k]);
  }
  return s;
}

/// 0 for the primitive prior; -(1/2) sum ln p_k for Jeffreys (+inf at the
/// simplex boundary).
inline double log_prior(const ProbVector& p, PriorKind kind) {
  if (kind == PriorKind::Primitive) return 0.0;
  double s = 0.0;
  for (int k = 0; k < p.size(); ++k) {
    if (p[k] <= 0.0) return kPosInf;
    s += std::log(p[k]);
  }
  return -0.5 * s;
}

/// log w_D = log w_0 + log L. The collision n_k > 0 with p_k = 0 under
/// Jeffreys resolves to -inf: the raw product w_0 L vanishes there since
/// every n_k is at least 1 > 1/2.
inline double log_posterior(const ProbVector& p, const Dataset& data, PriorKind kind) {
  double ll = log_likelihood(p, data);
  if (ll == kNegInf) return kNegInf;
  return log_prior(p, kind) + ll;
}

/// Unnormalized target log-density over probability vectors. Houses the
/// prior/posterior factor only; the quantum constraint w_qu is a separate
/// 0/1 factor applied by the samplers.
struct TargetDensity {
  TargetKind kind = TargetKind::PriorPrimitive;
  std::optional<Dataset> dataset;

  static TargetDensity prior(PriorKind k) {
    return {k == PriorKind::Primitive ? TargetKind::PriorPrimitive
                                      : TargetKind::PriorJeffreys,
            std::nullopt};
  }

  static TargetDensity posterior(PriorKind k, Dataset d) {
    return {k == PriorKind::Primitive ? TargetKind::PosteriorPrimitive
                                      : TargetKind::PosteriorJeffreys,
            std::move(d)};
  }

  static TargetDensity make(TargetKind k, std::optional<Dataset> d) {
    if (is_posterior(k) && !d)
      throw std::invalid_argument("posterior target needs a dataset");
    return {k, std::move(d)};
  }

  double log_density(const ProbVector& p) const {
    if (is_posterior(kind)) return log_posterior(p, *dataset, prior_of(kind));
    return log_prior(p, prior_of(kind));
  }
};

/// log r(p) relating the target to the uniform-on-simplex reference,
/// excluding the 0/1 quantum factor.
inline double log_ratio_r(const ProbVector& p, const TargetDensity& target) {
  return target.log_density(p);
}

/// Cutoff convention for the formally unbounded Jeffreys ratio in
/// rejection sampling: ln R_cap = (K/2) ln(K * 10^3).
inline double jeffreys_log_cap(int K) {
  return 0.5 * K * std::log(K * 1.0e3);
}

}  // namespace qss
