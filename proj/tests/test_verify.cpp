#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "invcorr/models.hpp"
#include "invcorr/verify.hpp"
#include "testutil.hpp"

using namespace invcorr;
using testutil::cyclic_triatomic;

namespace {

JointPMF quasi_frechet_with_remainder(double r, std::uint64_t seed) {
  const std::vector<double> p{0.25, 0.4, 0.35};
  CounterRng rng(seed, 0);
  Eigen::Vector3d pv(p[0], p[1], p[2]);
  Eigen::MatrixXd base = (1.0 - r) * (pv * pv.transpose());
  base.diagonal() += r * pv;
  const Eigen::MatrixXd S =
      testutil::random_compatible_antisymmetric(base, 0.6, rng);
  return make_quasi_frechet(p, r, S);
}

// Bi-atomic x bi-atomic, different supports, dependent.
JointPMF biatomic_dependent() {
  Eigen::MatrixXd P(2, 2);
  P << 0.4, 0.1, 0.1, 0.4;
  return make_joint_pmf({0.0, 1.0}, {0.5, 2.0}, P);
}

GammaModel frechet_pair_model(double r) {
  return make_gamma_model(2, {{make_partition(2, {{1, 2}}), r},
                              {make_partition(2, {{1}, {2}}), 1.0 - r}});
}

}  // namespace

TEST_CASE("transform_library is deterministic and sized") {
  const auto lib5 = transform_library(VerifyMode::all, 5, 1);
  CHECK(lib5.size() == 5);
  const auto again = transform_library(VerifyMode::all, 5, 1);
  for (std::size_t i = 0; i < lib5.size(); ++i) {
    CHECK(lib5[i].id == again[i].id);
    CHECK(lib5[i].params == again[i].params);
  }
  const auto lib20 = transform_library(VerifyMode::all, 20, 7);
  CHECK(lib20.size() == 20);
  const auto other_seed = transform_library(VerifyMode::all, 20, 8);
  bool all_same = true;
  for (std::size_t i = 5; i < 20; ++i) {
    if (lib20[i].params != other_seed[i].params) all_same = false;
  }
  CHECK_FALSE(all_same);
}

TEST_CASE("increasing-mode transforms are nondecreasing on a 1000-point grid") {
  const auto specs = transform_library(VerifyMode::increasing, 24, 3);
  const auto realized = realize_for_unit_interval(specs);
  for (const auto& transform : realized) {
    CHECK(transform.monotone);
    double previous = transform.eval(0.0);
    for (int k = 1; k <= 1000; ++k) {
      const double x = static_cast<double>(k) / 1000.0;
      const double value = transform.eval(x);
      CHECK(value >= previous - 1e-14);
      previous = value;
    }
  }
}

TEST_CASE("verify_exact passes quasi-Frechet models with remainder") {
  const JointPMF pmf = quasi_frechet_with_remainder(0.3, 5);
  const InvarianceReport report = verify_exact(pmf, VerifyMode::all, 20, 9);
  CHECK(report.pass);
  CHECK(report.max_abs_deviation <= 1e-12);
  CHECK(report.structural_invariant);
  CHECK(*report.structural_r == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(report.oracle_structural_agree);

  const InvarianceReport inc =
      verify_exact(pmf, VerifyMode::increasing, 20, 9);
  CHECK(inc.pass);
  CHECK(inc.oracle_structural_agree);
}

TEST_CASE("verify_exact passes quasi-independent models at r = 0") {
  const JointPMF pmf = cyclic_triatomic(1.0 / 9.0);
  const InvarianceReport report = verify_exact(pmf, VerifyMode::all, 20, 11);
  CHECK(report.pass);
  CHECK(report.target_r == doctest::Approx(0.0).epsilon(1e-12));
  for (const auto& record : report.records) {
    if (!record.skipped) CHECK(std::abs(record.estimate) <= 1e-12);
  }
}

TEST_CASE("verify_exact fails dependent models with different marginals") {
  // Tri-atomic, different marginals, nonzero correlation: no invariance in
  // either mode.
  Eigen::MatrixXd P(3, 3);
  P << 0.2, 0.05, 0.0, 0.05, 0.25, 0.05, 0.0, 0.1, 0.3;
  const JointPMF pmf = make_joint_pmf({1, 2, 3}, {1, 2, 3}, P / P.sum());
  REQUIRE_FALSE(pmf.identical_marginals);
  REQUIRE(std::abs(correlation(pmf)) > 0.05);

  const InvarianceReport all_mode = verify_exact(pmf, VerifyMode::all, 20, 13);
  CHECK_FALSE(all_mode.pass);
  CHECK_FALSE(all_mode.structural_invariant);
  CHECK(all_mode.oracle_structural_agree);

  const InvarianceReport inc_mode =
      verify_exact(pmf, VerifyMode::increasing, 20, 13);
  CHECK_FALSE(inc_mode.pass);
  CHECK(inc_mode.oracle_structural_agree);
}

TEST_CASE("bi-atomic separation: increasing passes where all fails") {
  const JointPMF pmf = biatomic_dependent();
  REQUIRE(std::abs(correlation(pmf)) > 0.1);

  const InvarianceReport increasing =
      verify_exact(pmf, VerifyMode::increasing, 20, 17);
  CHECK(increasing.pass);
  CHECK(increasing.structural_invariant);

  const InvarianceReport all_mode = verify_exact(pmf, VerifyMode::all, 20, 17);
  CHECK_FALSE(all_mode.pass);
  CHECK_FALSE(all_mode.structural_invariant);
  CHECK(all_mode.oracle_structural_agree);
}

TEST_CASE("bi-atomic same-support different-marginal models are invariant") {
  // Two-point supports force every transform to act affinely, so any
  // dependence structure is invariant, in both modes.
  Eigen::MatrixXd P(2, 2);
  P << 0.35, 0.25, 0.05, 0.35;  // p = (0.6, 0.4), q = (0.4, 0.6), dependent
  const JointPMF pmf = make_joint_pmf({1.0, 2.0}, {1.0, 2.0}, P);
  REQUIRE_FALSE(pmf.identical_marginals);
  REQUIRE(std::abs(correlation(pmf)) > 0.1);
  for (VerifyMode mode : {VerifyMode::all, VerifyMode::increasing}) {
    const InvarianceReport report = verify_exact(pmf, mode, 16, 23);
    CHECK(report.pass);
    CHECK(report.structural_invariant);
    CHECK(*report.structural_r ==
          doctest::Approx(correlation(pmf)).epsilon(1e-12));
    CHECK(report.oracle_structural_agree);
  }
}

TEST_CASE("bi-atomic inside tri-atomic support: invariant iff independent") {
  // Independent case: invariant at r = 0.
  Eigen::MatrixXd indep(2, 3);
  indep << 0.4 * 0.2, 0.4 * 0.3, 0.4 * 0.5,
           0.6 * 0.2, 0.6 * 0.3, 0.6 * 0.5;
  const JointPMF free_pmf = make_joint_pmf({1, 2}, {1, 2, 3}, indep);
  const InvarianceReport free_report =
      verify_exact(free_pmf, VerifyMode::all, 16, 29);
  CHECK(free_report.pass);
  CHECK(free_report.structural_invariant);
  CHECK(*free_report.structural_r == doctest::Approx(0.0));

  // Dependent case: no invariance in either mode.
  Eigen::MatrixXd dep(2, 3);
  dep << 0.12, 0.12, 0.16, 0.08, 0.18, 0.34;
  const JointPMF dep_pmf = make_joint_pmf({1, 2}, {1, 2, 3}, dep);
  REQUIRE(std::abs(correlation(dep_pmf)) > 0.01);
  CHECK_FALSE(verify_exact(dep_pmf, VerifyMode::all, 16, 29).pass);
  CHECK_FALSE(verify_exact(dep_pmf, VerifyMode::increasing, 16, 29).pass);
}

TEST_CASE("oracle and structural verdicts agree on randomized models") {
  CounterRng rng(2718, 1);
  int positives = 0, negatives = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_index(5));  // grids <= 6
    const auto p = testutil::random_simplex(n, rng);
    JointPMF pmf;
    const int flavor = static_cast<int>(rng.next_index(3));
    try {
      if (flavor == 0) {
        // Constructed positive: quasi-Frechet with remainder.
        const RBounds bounds = r_bounds(p);
        const double r =
            bounds.lower + rng.next_uniform() * (1.0 - bounds.lower);
        Eigen::VectorXd pv(n);
        for (int i = 0; i < n; ++i) pv(i) = p[static_cast<std::size_t>(i)];
        Eigen::MatrixXd base = (1.0 - r) * (pv * pv.transpose());
        base.diagonal() += r * pv;
        if (base.minCoeff() < 0.0) continue;
        const Eigen::MatrixXd S =
            testutil::random_compatible_antisymmetric(base, 0.5, rng);
        pmf = make_quasi_frechet(p, r, S);
      } else if (flavor == 1) {
        // Constructed positive: quasi-independent, different marginals.
        const auto q = testutil::random_simplex(n, rng);
        Eigen::VectorXd pv(n), qv(n);
        for (int i = 0; i < n; ++i) {
          pv(i) = p[static_cast<std::size_t>(i)];
          qv(i) = q[static_cast<std::size_t>(i)];
        }
        const Eigen::MatrixXd S = testutil::random_compatible_antisymmetric(
            pv * qv.transpose(), 0.7, rng);
        pmf = make_quasi_independent(p, q, S);
      } else {
        // Perturbed negative.
        Eigen::VectorXd pv(n);
        for (int i = 0; i < n; ++i) pv(i) = p[static_cast<std::size_t>(i)];
        Eigen::MatrixXd P = pv * pv.transpose();
        const int i = static_cast<int>(rng.next_index(static_cast<std::uint64_t>(n)));
        const int j = (i + 1) % n;
        const double shift = 0.5 * std::min(P(i, j), P(j, i));
        P(i, i) += shift;
        P(i, j) -= shift;
        std::vector<double> atoms;
        for (int k = 0; k < n; ++k) atoms.push_back(k + 1.0);
        pmf = make_joint_pmf(atoms, atoms, P / P.sum());
      }
    } catch (const Error&) {
      continue;
    }
    const InvarianceReport report =
        verify_exact(pmf, VerifyMode::all, 12,
                     3000 + static_cast<std::uint64_t>(trial), 1e-10);
    CHECK(report.oracle_structural_agree);
    if (report.pass) ++positives;
    else ++negatives;
  }
  CHECK(positives > 20);
  CHECK(negatives > 20);
}

TEST_CASE("mode equivalence for non-bi-atomic models") {
  CounterRng rng(3141, 2);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 3 + static_cast<int>(rng.next_index(3));
    const auto p = testutil::random_simplex(n, rng);
    JointPMF pmf;
    try {
      if (trial % 2 == 0) {
        pmf = quasi_frechet_with_remainder(
            0.2, 400 + static_cast<std::uint64_t>(trial));
      } else {
        Eigen::VectorXd pv(n);
        for (int i = 0; i < n; ++i) pv(i) = p[static_cast<std::size_t>(i)];
        Eigen::MatrixXd P = pv * pv.transpose();
        P(0, 0) += 0.3 * P(0, 1);
        P(0, 1) -= 0.3 * P(0, 1);
        std::vector<double> atoms;
        for (int k = 0; k < n; ++k) atoms.push_back(k + 1.0);
        pmf = make_joint_pmf(atoms, atoms, P / P.sum());
      }
    } catch (const Error&) {
      continue;
    }
    REQUIRE(pmf.x_atoms.size() > 2);
    const bool pass_all =
        verify_exact(pmf, VerifyMode::all, 12,
                     500 + static_cast<std::uint64_t>(trial), 1e-10)
            .pass;
    const bool pass_inc =
        verify_exact(pmf, VerifyMode::increasing, 12,
                     500 + static_cast<std::uint64_t>(trial), 1e-10)
            .pass;
    CHECK(pass_all == pass_inc);
  }
}

TEST_CASE("verify_mc accepts the block-sharing sampler") {
  const GammaModel model = frechet_pair_model(0.4);
  const CorrMatrix target = expected_corr(model);
  const auto sampler = [&model](std::int64_t count, std::uint64_t seed) {
    return sample_gamma_model(model, count, seed);
  };
  const InvarianceReport report =
      verify_mc(sampler, target, VerifyMode::all, 20, 100'000, 97);
  CHECK(report.pass);
  CHECK_FALSE(report.inconclusive);

  // A mis-specified target must fail.
  Eigen::MatrixXd off(2, 2);
  off << 1.0, 0.5, 0.5, 1.0;
  const InvarianceReport wrong = verify_mc(
      sampler, make_corr_matrix(std::move(off)), VerifyMode::all, 20,
      100'000, 97);
  CHECK_FALSE(wrong.pass);
}

TEST_CASE("verify_mc accepts the conformal sampler against 1/(n+2)") {
  const ConformalSpec spec{8, 2};
  const auto sampler = [spec](std::int64_t count, std::uint64_t seed) {
    return sample_conformal(spec, count, seed);
  };
  Eigen::MatrixXd target(2, 2);
  target << 1.0, 0.1, 0.1, 1.0;
  const InvarianceReport report =
      verify_mc(sampler, make_corr_matrix(std::move(target)), VerifyMode::all,
                20, 100'000, 101);
  CHECK(report.pass);
  // The coarse grid makes some indicator transforms constant; they are
  // recorded as skipped rather than failed.
  for (const auto& record : report.records) {
    if (record.skipped) CHECK(record.estimate == 0.0);
  }
}

TEST_CASE("verify_mc calibration on the independence sampler") {
  const GammaModel indep = make_gamma_model(
      2, {{make_partition(2, {{1}, {2}}), 1.0}});
  const CorrMatrix target = expected_corr(indep);
  const auto sampler = [&indep](std::int64_t count, std::uint64_t seed) {
    return sample_gamma_model(indep, count, seed);
  };
  int passes = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const InvarianceReport report =
        verify_mc(sampler, target, VerifyMode::all, 10, 10'000,
                  9000 + static_cast<std::uint64_t>(rep));
    if (report.pass) ++passes;
  }
  CHECK(passes >= 98);
}

TEST_CASE("copula identity check") {
  const GammaModel comonotone =
      make_gamma_model(2, {{make_partition(2, {{1, 2}}), 1.0}});
  const SampleMatrix glued = sample_gamma_model(comonotone, 100'000, 111);
  const CopulaIdentityResult top = copula_identity_check(glued, 1.0, 10);
  CHECK(top.pass);

  const GammaModel frechet = frechet_pair_model(0.5);
  const SampleMatrix mixed = sample_gamma_model(frechet, 100'000, 113);
  CHECK(copula_identity_check(mixed, 0.5, 10).pass);

  // Non-symmetric checkerboard with r = 0.3 satisfies the symmetrized
  // identity by construction.
  Eigen::Matrix3d P3;
  P3 << 1.0 / 9, 2.0 / 9, 0.0,
        0.0, 1.0 / 9, 2.0 / 9,
        2.0 / 9, 0.0, 1.0 / 9;
  const SampleMatrix board =
      sample_checkerboard_quasi_frechet(P3, 0.3, 100'000, 115);
  CHECK(copula_identity_check(board, 0.3, 10).pass);

  // Wrong r: the deviation blows past the band.
  CHECK_FALSE(copula_identity_check(board, 0.8, 10).pass);
}

TEST_CASE("verify_mc turns inconclusive when transforms degenerate") {
  // A constant sampler makes every transformed column degenerate; all tests
  // are skipped, which is the exit-code-3 contract.
  const auto constant_sampler = [](std::int64_t count, std::uint64_t) {
    SampleMatrix samples = make_sample_matrix(count, 2);
    for (auto& value : samples.data) value = 0.5;
    return samples;
  };
  Eigen::MatrixXd target(2, 2);
  target << 1.0, 0.0, 0.0, 1.0;
  const InvarianceReport report =
      verify_mc(constant_sampler, make_corr_matrix(std::move(target)),
                VerifyMode::all, 10, 20'000, 3);
  CHECK(report.inconclusive);
  CHECK_FALSE(report.pass);
  CHECK(report.skipped_count == static_cast<int>(report.records.size()));
}

TEST_CASE("verify_mc rejects bad parameters") {
  const GammaModel model = frechet_pair_model(0.2);
  const auto sampler = [&model](std::int64_t count, std::uint64_t seed) {
    return sample_gamma_model(model, count, seed);
  };
  const CorrMatrix target = expected_corr(model);
  CHECK_THROWS_AS(
      verify_mc(sampler, target, VerifyMode::all, 10, 100, 1), Error);
  CHECK_THROWS_AS(
      verify_mc(sampler, target, VerifyMode::all, 10, 20'000, 1, 1.5), Error);
}
