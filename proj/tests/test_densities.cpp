#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qss/qss.hpp"
#include "test_helpers.hpp"

using namespace qss;

namespace {
const Dataset kTatData = Dataset::parse_csv("11,4,5,2,10,5,4,6,13");
}

TEST_CASE("log likelihood") {
  ProbVector uniform = ProbVector::Constant(9, 1.0 / 9.0);
  CHECK(log_likelihood(uniform, kTatData) ==
        doctest::Approx(60.0 * std::log(1.0 / 9.0)).epsilon(1e-12));

  Dataset zero{std::vector<long>(9, 0)};
  CHECK(log_likelihood(uniform, zero) == 0.0);

  ProbVector corner(3);
  corner << 1.0, 0.0, 0.0;
  Dataset d{{2, 0, 0}};
  CHECK(log_likelihood(corner, d) == 0.0);
  ProbVector other(3);
  other << 0.0, 1.0, 0.0;
  CHECK(log_likelihood(other, d) == kNegInf);

  CHECK_THROWS_AS(log_likelihood(corner, kTatData), std::invalid_argument);
}

TEST_CASE("log prior") {
  ProbVector uniform = ProbVector::Constant(3, 1.0 / 3.0);
  CHECK(log_prior(uniform, PriorKind::Primitive) == 0.0);
  CHECK(log_prior(uniform, PriorKind::Jeffreys) ==
        doctest::Approx(1.5 * std::log(3.0)).epsilon(1e-12));

  ProbVector edge(3);
  edge << 0.5, 0.5, 0.0;
  CHECK(log_prior(edge, PriorKind::Jeffreys) == kPosInf);
}

TEST_CASE("log posterior composes prior and likelihood") {
  Rng rng(1);
  ProbVector uniform9 = ProbVector::Constant(9, 1.0 / 9.0);
  // primitive posterior equals the likelihood exactly
  for (int i = 0; i < 20; ++i) {
    ProbVector p = sample_simplex_exponential(9, rng);
    CHECK(log_posterior(p, kTatData, PriorKind::Primitive) ==
          log_likelihood(p, kTatData));
  }
  // empty dataset: posterior equals the prior
  Dataset zero{std::vector<long>(9, 0)};
  CHECK(log_posterior(uniform9, zero, PriorKind::Jeffreys) ==
        log_prior(uniform9, PriorKind::Jeffreys));

  // Jeffreys posterior at the uniform point: -(9/2) ln(1/9) + 60 ln(1/9)
  const double expect = 4.5 * std::log(9.0) + 60.0 * std::log(1.0 / 9.0);
  CHECK(log_posterior(uniform9, kTatData, PriorKind::Jeffreys) ==
        doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("log ratio r") {
  ProbVector uniform = ProbVector::Constant(3, 1.0 / 3.0);
  CHECK(log_ratio_r(uniform, TargetDensity::prior(PriorKind::Primitive)) == 0.0);
  CHECK(log_ratio_r(uniform, TargetDensity::prior(PriorKind::Jeffreys)) ==
        doctest::Approx(1.5 * std::log(3.0)));

  Dataset d{{10, 5, 5}};
  TargetDensity post = TargetDensity::posterior(PriorKind::Primitive, d);
  CHECK(log_ratio_r(uniform, post) == log_likelihood(uniform, d));
}

TEST_CASE("likelihood is concave along simplex segments") {
  Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    ProbVector a = sample_simplex_exponential(9, rng);
    ProbVector b = sample_simplex_exponential(9, rng);
    const double mid = log_likelihood(((a + b) / 2.0).eval(), kTatData);
    const double chord =
        0.5 * (log_likelihood(a, kTatData) + log_likelihood(b, kTatData));
    CHECK(mid >= chord - 1e-10);
  }
}

TEST_CASE("dataset parsing") {
  Dataset d = Dataset::parse_csv("11,4,5,2,10,5,4,6,13");
  CHECK(d.counts.size() == 9);
  CHECK(d.total() == 60);
  CHECK_THROWS_AS(Dataset::parse_csv("1,-2"), std::invalid_argument);
  CHECK_THROWS_AS(TargetDensity::make(TargetKind::PosteriorPrimitive, std::nullopt),
                  std::invalid_argument);
}
