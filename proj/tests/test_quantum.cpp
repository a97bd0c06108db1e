#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qss/qss.hpp"
#include "test_helpers.hpp"

using namespace qss;
using namespace qss::test;

TEST_CASE("born rule on known states") {
  Pom trine = make_trine();
  ProbVector p = born_probabilities(DensityOperator::maximally_mixed(2), trine);
  for (int k = 0; k < 3; ++k) CHECK(p[k] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  p = born_probabilities(bloch_state(1, 0, 0), trine);
  CHECK(p[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(p[2] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));

  Pom tetra2 = make_tetra_pair();
  p = born_probabilities(DensityOperator::maximally_mixed(4), tetra2);
  for (int k = 0; k < 16; ++k) CHECK(p[k] == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
}

TEST_CASE("born rule rejects dimension mismatch") {
  CHECK_THROWS_AS(born_probabilities(DensityOperator::maximally_mixed(4), make_trine()),
                  std::invalid_argument);
}

TEST_CASE("trine and antitrine match the Bloch-plane formulas") {
  ProbVector p = born_probabilities(bloch_state(0, 1, 0), make_trine());
  const double s = std::sqrt(3.0) / 2.0;
  CHECK(p[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx((1.0 + s) / 3.0).epsilon(1e-12));
  CHECK(p[2] == doctest::Approx((1.0 - s) / 3.0).epsilon(1e-12));

  // antitrine on <sigma_x> = 1: substitute x -> -1 in the trine formula
  p = born_probabilities(bloch_state(1, 0, 0), make_antitrine());
  CHECK(p[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p[2] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("tetrahedron POM geometry") {
  Pom tetra = make_tetrahedron();
  ProbVector p = born_probabilities(DensityOperator::maximally_mixed(2), tetra);
  for (int k = 0; k < 4; ++k) CHECK(p[k] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(6.0 * p.squaredNorm() - 1.0 == doctest::Approx(0.5).epsilon(1e-12));

  // pure state aligned with the first axis (1,1,1)/sqrt3
  const double c = 1.0 / std::sqrt(3.0);
  p = born_probabilities(bloch_state(c, c, c), tetra);
  CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-12));
  for (int k = 1; k < 4; ++k) CHECK(p[k] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(6.0 * p.squaredNorm() - 1.0 == doctest::Approx(1.0).epsilon(1e-12));

  // every outcome probability stays in [0, 1/2]
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    p = born_probabilities(sample_ginibre(2, rng), tetra);
    CHECK(p.minCoeff() >= -1e-12);
    CHECK(p.maxCoeff() <= 0.5 + 1e-12);
  }
}

TEST_CASE("product POMs") {
  Pom tat = make_tat();
  CHECK(tat.outcome_count() == 9);
  CHECK(tat.dim() == 4);
  ProbVector p = born_probabilities(DensityOperator::maximally_mixed(4), tat);
  for (int k = 0; k < 9; ++k) CHECK(p[k] == doctest::Approx(1.0 / 9.0).epsilon(1e-12));

  CHECK(make_tetra_pair().outcome_count() == 16);

  // row-major outcome ordering: index = j*K_b + k
  Pom trine = make_trine(), anti = make_antitrine();
  CMatrix expect = Eigen::kroneckerProduct(trine.outcome(1), anti.outcome(2)).eval();
  CHECK((tat.outcome(1 * 3 + 2) - expect).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("purity") {
  CHECK(purity(DensityOperator::maximally_mixed(4)) == doctest::Approx(0.25));
  CHECK(purity(bloch_state(0, 0, 1)) == doctest::Approx(1.0));
  CMatrix m = CMatrix::Zero(4, 4);
  m(0, 0) = 0.5;
  m(1, 1) = 0.5;
  CHECK(purity(DensityOperator(m)) == doctest::Approx(0.5));
}

TEST_CASE("PPT separability") {
  CHECK(is_ppt_separable(DensityOperator::maximally_mixed(4)));
  CHECK_FALSE(is_ppt_separable(bell_phi_plus()));
  CHECK(detail::min_eigenvalue(partial_transpose_second(bell_phi_plus().matrix())) ==
        doctest::Approx(-0.5).epsilon(1e-10));

  // Werner family: PPT min eigenvalue is (1-3q)/4
  for (int i = 0; i <= 10; ++i) {
    const double q = i / 10.0;
    const double min_eig =
        detail::min_eigenvalue(partial_transpose_second(werner(q).matrix()));
    CHECK(min_eig == doctest::Approx((1.0 - 3.0 * q) / 4.0).epsilon(1e-9));
    CHECK(is_ppt_separable(werner(q)) == (q <= 1.0 / 3.0 + 1e-9));
  }

  CHECK_THROWS_AS(is_ppt_separable(DensityOperator::maximally_mixed(2)),
                  std::invalid_argument);
}

TEST_CASE("prior I sampling: purity mean and eigenvalue marginal, d=2") {
  Rng rng(42);
  const int n = 100000;
  double xi_sum = 0.0;
  std::vector<long> eig_bins(10, 0);
  for (int i = 0; i < n; ++i) {
    DensityOperator rho = sample_prior_one(2, rng);
    xi_sum += purity(rho);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.matrix(), Eigen::EigenvaluesOnly);
    const double lam = es.eigenvalues()[0];
    eig_bins[std::min(static_cast<int>(lam * 10.0), 9)]++;
  }
  // E[xi] = int xi / sqrt(2 xi - 1) dxi over [1/2, 1] = 2/3
  CHECK(xi_sum / n == doctest::Approx(2.0 / 3.0).epsilon(0.005));

  // min eigenvalue uniform on [0, 1/2]: bins above 0.5 empty, rest equal
  std::vector<double> expect(10, 0.0);
  for (int b = 0; b < 5; ++b) expect[b] = 0.2;
  CHECK(chi_square({eig_bins.begin(), eig_bins.begin() + 5},
                   {expect.begin(), expect.begin() + 5}, n) < 30.0);
  for (int b = 5; b < 10; ++b) CHECK(eig_bins[b] == 0);
}

TEST_CASE("Haar invariance smoke test: |<e1|U|e1>|^2 is Beta(1, d-1)") {
  for (int d : {2, 3}) {
    Rng rng(7 + d);
    const int n = 100000;
    std::vector<long> bins(10, 0);
    for (int i = 0; i < n; ++i) {
      CMatrix u = haar_unitary(d, rng);
      const double t = std::norm(u(0, 0));
      bins[std::min(static_cast<int>(t * 10.0), 9)]++;
    }
    // Beta(1, d-1) CDF: 1 - (1-t)^(d-1)
    std::vector<double> expect(10);
    for (int b = 0; b < 10; ++b) {
      const double lo = b / 10.0, hi = (b + 1) / 10.0;
      expect[b] = std::pow(1.0 - lo, d - 1) - std::pow(1.0 - hi, d - 1);
    }
    CHECK(chi_square(bins, expect, n) < 35.0);  // ~5-sigma for 9 dof
  }
}

TEST_CASE("Ginibre states are physical") {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    DensityOperator rho = sample_ginibre(4, rng);
    CHECK(detail::min_eigenvalue(rho.matrix()) >= -1e-12);
    CHECK(std::abs(rho.matrix().trace().real() - 1.0) < 1e-12);
  }
}

TEST_CASE("IC reconstruction round trip") {
  for (int d : {2, 4}) {
    Pom pom = d == 2 ? make_tetrahedron() : make_tetra_pair();
    IcReconstructor rec(pom);
    Rng rng(d);
    for (int i = 0; i < 1000; ++i) {
      DensityOperator rho = sample_ginibre(d, rng);
      CMatrix m = rec.reconstruct(born_probabilities(rho, pom));
      CHECK((m - rho.matrix()).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("IC reconstruction of unphysical and symmetric points") {
  Pom tetra2 = make_tetra_pair();
  IcReconstructor rec(tetra2);

  ProbVector corner = ProbVector::Zero(16);
  corner[0] = 1.0;
  CHECK(rec.min_eigenvalue(corner) < -1e-6);

  ProbVector uniform = ProbVector::Constant(16, 1.0 / 16.0);
  CMatrix m = rec.reconstruct(uniform);
  CHECK((m - CMatrix::Identity(4, 4) / 4.0).cwiseAbs().maxCoeff() < 1e-12);

  // trine is not informationally complete
  CHECK_THROWS_AS(IcReconstructor{make_trine()}, std::invalid_argument);
}

TEST_CASE("trine Born images satisfy the quadratic constraint") {
  Rng rng(99);
  Pom trine = make_trine();
  for (int i = 0; i < 100000; ++i) {
    ProbVector p = born_probabilities(sample_ginibre(2, rng), trine);
    CHECK(p.squaredNorm() <= 0.5 + 1e-12);
  }
}

TEST_CASE("tetrahedron purity identity") {
  Rng rng(5);
  Pom tetra = make_tetrahedron();
  for (int i = 0; i < 1000; ++i) {
    DensityOperator rho = sample_ginibre(2, rng);
    ProbVector p = born_probabilities(rho, tetra);
    CHECK(std::abs(purity(rho) - (6.0 * p.squaredNorm() - 1.0)) < 1e-10);
  }
}

TEST_CASE("density operator invariant checks") {
  CMatrix bad = CMatrix::Identity(2, 2);
  CHECK_THROWS_AS(DensityOperator{bad}, std::invalid_argument);  // trace 2
  bad = CMatrix::Zero(2, 2);
  bad(0, 0) = 1.5;
  bad(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityOperator{bad}, std::invalid_argument);  // negative
}
