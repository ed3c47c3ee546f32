#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "invcorr/json_io.hpp"
#include "invcorr/polytope.hpp"
#include "testutil.hpp"

using namespace invcorr;

namespace {

CorrMatrix corr3(double r12, double r13, double r23) {
  Eigen::MatrixXd m(3, 3);
  m << 1, r12, r13, r12, 1, r23, r13, r23, 1;
  return make_corr_matrix(std::move(m));
}

// Dirichlet-ish random convex combination of clique points.
CorrMatrix random_member(int d, CounterRng& rng,
                         std::vector<std::pair<SetPartition, double>>* used) {
  const auto partitions = enumerate_partitions(d);
  std::vector<double> weights(partitions.size());
  double total = 0.0;
  for (auto& w : weights) {
    w = -std::log(1.0 - rng.next_uniform());
    total += w;
  }
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t i = 0; i < partitions.size(); ++i) {
    weights[i] /= total;
    sum += weights[i] * clique_point(partitions[i]).entries;
    if (used) used->emplace_back(partitions[i], weights[i]);
  }
  return make_corr_matrix(std::move(sum), 1e-9);
}

}  // namespace

TEST_CASE("assemble_vd shapes and documented columns") {
  const VdSystem v3 = assemble_vd(3);
  REQUIRE(v3.matrix.size() == 4);
  REQUIRE(v3.matrix[0].size() == 5);
  // Column for {{1,2},{3}} is (1,0,0,1) in row order r12, r13, r23, ones.
  REQUIRE(v3.partitions[1].blocks ==
          std::vector<std::vector<int>>{{1, 2}, {3}});
  CHECK(v3.matrix[0][1] == 1.0);
  CHECK(v3.matrix[1][1] == 0.0);
  CHECK(v3.matrix[2][1] == 0.0);
  CHECK(v3.matrix[3][1] == 1.0);

  const VdSystem v2 = assemble_vd(2);
  REQUIRE(v2.matrix.size() == 2);
  REQUIRE(v2.matrix[0].size() == 2);
  CHECK(v2.matrix[0][0] == 1.0);  // {{1,2}}
  CHECK(v2.matrix[1][0] == 1.0);
  CHECK(v2.matrix[0][1] == 0.0);  // {{1},{2}}
  CHECK(v2.matrix[1][1] == 1.0);

  const VdSystem v4 = assemble_vd(4);
  CHECK(v4.matrix.size() == 7);
  CHECK(v4.matrix[0].size() == 15);

  CHECK_THROWS_AS(assemble_vd(1), Error);
  CHECK_THROWS_AS(assemble_vd(13), Error);
}

TEST_CASE("row order of the vectorization is r12, r13, r23, ..., r(d-1)d") {
  const auto pairs = upper_triangle_pairs(4);
  REQUIRE(pairs.size() == 6);
  CHECK(pairs[0] == std::make_pair(1, 2));
  CHECK(pairs[1] == std::make_pair(1, 3));
  CHECK(pairs[2] == std::make_pair(2, 3));
  CHECK(pairs[3] == std::make_pair(1, 4));
  CHECK(pairs[4] == std::make_pair(2, 4));
  CHECK(pairs[5] == std::make_pair(3, 4));
}

TEST_CASE("lp_solve basics") {
  // min z s.t. z = 1, z >= 0.
  auto r = lp_solve<double>({1.0}, {{1.0}}, {1.0}, 1e-11);
  CHECK(r.status == LpStatus::optimal);
  CHECK(r.objective == doctest::Approx(1.0));

  // Infeasible: x = -1 with x >= 0.
  auto infeasible = lp_solve<double>({0.0}, {{1.0}}, {-1.0}, 1e-11);
  CHECK(infeasible.status == LpStatus::infeasible);

  // Unbounded: min -x1 s.t. x1 - x2 = 0.
  auto unbounded = lp_solve<double>({-1.0, 0.0}, {{1.0, -1.0}}, {0.0}, 1e-11);
  CHECK(unbounded.status == LpStatus::unbounded);
}

TEST_CASE("membership accepts vertices and simple mixtures") {
  const MembershipCert ones = membership(corr3(1, 1, 1));
  CHECK(ones.member);
  REQUIRE(ones.weights.size() == 1);
  CHECK(ones.weights[0].first.blocks ==
        std::vector<std::vector<int>>{{1, 2, 3}});
  CHECK(ones.weights[0].second == doctest::Approx(1.0));

  const MembershipCert eye =
      membership(make_corr_matrix(Eigen::MatrixXd::Identity(4, 4)));
  CHECK(eye.member);
  REQUIRE(eye.weights.size() == 1);
  CHECK(eye.weights[0].first.blocks.size() == 4);

  const MembershipCert half = membership(corr3(0.5, 0.5, 0.5));
  CHECK(half.member);
  CHECK(half.residual <= 1e-9);
  CHECK(half.reconstruction_error <= 1e-8);
}

TEST_CASE("the paper's d=3 outside point is rejected at every tolerance") {
  for (double tol : {1e-6, 1e-9, 1e-12}) {
    const MembershipCert cert = membership(corr3(0.8, 0.5, 0.2), tol);
    CHECK_FALSE(cert.member);
    CHECK(cert.residual > 1e-6);
  }
}

TEST_CASE("negative off-diagonal entries are rejected without an LP solve") {
  Eigen::MatrixXd m(3, 3);
  m << 1, -0.2, 0.1, -0.2, 1, 0.3, 0.1, 0.3, 1;
  const MembershipCert cert = membership(make_corr_matrix(std::move(m)));
  CHECK_FALSE(cert.member);
  CHECK(cert.fast_rejected);
  CHECK(cert.reason.find("negative entry fast-reject") != std::string::npos);
  CHECK(cert.weights.empty());
}

TEST_CASE("every clique point of d <= 6 is classified member") {
  for (int d = 2; d <= 6; ++d) {
    for (const auto& partition : enumerate_partitions(d)) {
      const CorrMatrix vertex =
          make_corr_matrix(clique_point(partition).entries);
      CHECK(membership(vertex).member);
    }
  }
}

TEST_CASE("soundness on random convex combinations") {
  CounterRng rng(2024, 7);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + static_cast<int>(rng.next_index(5));
    const CorrMatrix R = random_member(d, rng, nullptr);
    const MembershipCert cert = membership(R);
    REQUIRE(cert.member);
    CHECK(cert.residual <= 1e-9);
    const CorrMatrix rebuilt = reconstruct(cert.weights);
    CHECK((rebuilt.entries - R.entries).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("reconstruct examples and validation") {
  const CorrMatrix eye =
      reconstruct({{make_partition(4, {{1}, {2}, {3}, {4}}), 1.0}});
  CHECK(eye.entries.isApprox(Eigen::MatrixXd::Identity(4, 4)));

  const CorrMatrix mix = reconstruct({
      {make_partition(3, {{1, 2, 3}}), 0.3},
      {make_partition(3, {{1}, {2}, {3}}), 0.7},
  });
  CHECK(mix.entries(0, 1) == doctest::Approx(0.3));
  CHECK(mix.entries(0, 2) == doctest::Approx(0.3));

  CHECK_THROWS_AS(reconstruct({{make_partition(2, {{1, 2}}), 0.5}}), Error);
  CHECK_THROWS_AS(reconstruct({{make_partition(2, {{1, 2}}), -0.1},
                               {make_partition(2, {{1}, {2}}), 1.1}}),
                  Error);
}

TEST_CASE("certificates are bit-identical across runs") {
  const CorrMatrix R = corr3(0.4, 0.25, 0.15);
  const std::string a = to_json(membership(R)).dump();
  const std::string b = to_json(membership(R)).dump();
  CHECK(a == b);
}

TEST_CASE("exact rational membership") {
  const ExactMembershipCert outside = membership_exact(corr3(0.8, 0.5, 0.2));
  CHECK_FALSE(outside.member);
  CHECK(outside.residual > 0);

  const ExactMembershipCert inside = membership_exact(corr3(0.5, 0.5, 0.5));
  CHECK(inside.member);
  CHECK(inside.residual == 0);
  mpq_class total(0);
  Eigen::MatrixXd rebuilt = Eigen::MatrixXd::Zero(3, 3);
  for (const auto& [partition, alpha] : inside.weights) {
    total += alpha;
    rebuilt += alpha.get_d() * clique_point(partition).entries;
  }
  CHECK(total == 1);
  CHECK((rebuilt - corr3(0.5, 0.5, 0.5).entries).cwiseAbs().maxCoeff() <= 1e-15);

  CHECK_THROWS_AS(
      membership_exact(make_corr_matrix(Eigen::MatrixXd::Identity(6, 6))),
      Error);  // above the exact-mode cap
}

TEST_CASE("double and exact-rational membership agree") {
  // Dual-route check: the floating LP with tolerance and the rational LP
  // with exact zero must classify the same way on clear instances.
  CounterRng rng(606, 3);
  int members = 0, outsiders = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int d = 2 + static_cast<int>(rng.next_index(3));  // d <= 4
    CorrMatrix R = random_member(d, rng, nullptr);
    if (trial % 2 == 1) {
      // Push one off-diagonal pair past the polytope boundary.
      Eigen::MatrixXd m = R.entries;
      m(0, 1) = m(1, 0) = std::min(1.0, m(0, 1) + 0.4 * (1.0 - m(0, 1)) + 0.05);
      for (int k = 2; k < d; ++k) {
        m(0, k) = m(k, 0) = std::max(0.0, m(0, k) - 0.4 * m(0, k));
      }
      R = make_corr_matrix(std::move(m));
    }
    const MembershipCert approx = membership(R);
    const ExactMembershipCert exact = membership_exact(R);
    if (approx.member != exact.member) {
      // Only tolerable in a razor-thin band around the boundary.
      CHECK(approx.residual <= 1e-7);
      continue;
    }
    if (approx.member) ++members;
    else ++outsiders;
    CHECK(approx.member == exact.member);
  }
  CHECK(members >= 15);
  CHECK(outsiders >= 5);
}

TEST_CASE("corr matrix validation lists violations") {
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 0.5, 0.4, 1.0;  // asymmetric
  CHECK_THROWS_AS(make_corr_matrix(std::move(bad)), Error);

  Eigen::MatrixXd bad_diag(2, 2);
  bad_diag << 0.9, 0.1, 0.1, 1.0;
  CHECK_THROWS_AS(make_corr_matrix(std::move(bad_diag)), Error);

  Eigen::MatrixXd bad_range(2, 2);
  bad_range << 1.0, 1.5, 1.5, 1.0;
  CHECK_THROWS_AS(make_corr_matrix(std::move(bad_range)), Error);
}

TEST_CASE("membership validates tolerance and matrix") {
  CHECK_THROWS_AS(membership(corr3(0.5, 0.5, 0.5), 0.0), Error);
  CHECK_THROWS_AS(membership(corr3(0.5, 0.5, 0.5), -1.0), Error);
}
