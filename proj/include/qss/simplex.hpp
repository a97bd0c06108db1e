#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "qss/rng.hpp"

namespace qss {

using ProbVector = Eigen::VectorXd;

inline bool is_prob_vector(const ProbVector& p, double tol = 1e-12) {
  if (p.size() < 1) return false;
  if (p.minCoeff() < 0.0) return false;
  return std::abs(p.sum() - 1.0) <= tol;
}

inline void require_prob_vector(const ProbVector& p, double tol = 1e-9) {
  if (!is_prob_vector(p, tol))
    throw std::invalid_argument("probability vector violates basic constraints");
}

/// Uniform draw from the (K-1)-simplex via normalized exponentials
/// (Dirichlet(1,...,1)).
inline ProbVector sample_simplex_exponential(int K, Rng& rng) {
  if (K < 2) throw std::invalid_argument("simplex sampling needs K >= 2");
  ProbVector y(K);
  for (int k = 0; k < K; ++k) y[k] = -std::log(rng.uniform());
  return y / y.sum();
}

/// Uniform draw from the (K-1)-simplex via spacings of K-1 sorted uniforms.
inline ProbVector sample_simplex_spacings(int K, Rng& rng) {
  if (K < 2) throw std::invalid_argument("simplex sampling needs K >= 2");
  std::vector<double> x(K + 1);
  x[0] = 0.0;
  x[K] = 1.0;
  for (int k = 1; k < K; ++k) x[k] = rng.uniform();
  std::sort(x.begin() + 1, x.end() - 1);
  ProbVector p(K);
  for (int k = 0; k < K; ++k) p[k] = x[k + 1] - x[k];
  return p;
}

}  // namespace qss
