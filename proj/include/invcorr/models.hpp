#pragma once

#include <gmpxx.h>

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "invcorr/polytope.hpp"
#include "invcorr/samples.hpp"

namespace invcorr {

// Law of the random partition Gamma as weighted set partitions; the row
// X = Gamma U shares one uniform per block.
struct GammaModel {
  int d = 0;
  std::vector<std::pair<SetPartition, double>> components;
};

GammaModel make_gamma_model(int d,
                            std::vector<std::pair<SetPartition, double>> components,
                            double tol = 1e-12);

// Sum of weight * clique point; always a polytope member.
CorrMatrix expected_corr(const GammaModel& model);

// One row per replicate: draw a partition by weight, one uniform per block,
// assign each coordinate its block's uniform. Stream = row index, so the
// parallel and serial fills are bit-identical.
SampleMatrix sample_gamma_model(const GammaModel& model, std::int64_t count,
                                std::uint64_t seed);
SampleMatrix sample_gamma_model_serial(const GammaModel& model,
                                       std::int64_t count, std::uint64_t seed);

GammaModel model_from_membership(const MembershipCert& cert);

// Shared-column categorical rows: row i picks its own column with
// probability 1 - share_probs[i], else the common extra column. The induced
// partition law has one block of sharers plus singletons.
GammaModel gamma_model_from_shared_column(std::span<const double> share_probs);

// Markov chain X_1 = U_1, X_i = X_{i-1} w.p. stay_probs[i-2+1], else a fresh
// uniform. Pairwise correlation r_ij = prod of the stay probabilities
// between i and j; the induced partition law lives on interval partitions.
struct MarkovModel {
  SampleMatrix samples;
  GammaModel model;
};

MarkovModel sample_markov_model(std::span<const double> stay_probs,
                                std::int64_t count, std::uint64_t seed);
GammaModel markov_gamma_model(std::span<const double> stay_probs);

// C(u,v) = r M + s W + (1 - r - s) Pi.
double frechet_copula_cdf(double u, double v, double r, double s);

// H(x,y) = r min(F(x), F(y)) + (1 - r) F(x) F(y).
double r_frechet_cdf(double x, double y, const std::function<double(double)>& F,
                     double r);

// Checkerboard quasi-Frechet sampler: with probability r emit (u, u),
// otherwise pick a 3x3 cell by P3 and fill it uniformly. Requires P3 row and
// column sums 1/3 and (P3 + P3')/2 = (1/9) ones.
SampleMatrix sample_checkerboard_quasi_frechet(const Eigen::Matrix3d& P3,
                                               double r, std::int64_t count,
                                               std::uint64_t seed);
SampleMatrix sample_checkerboard_quasi_frechet_serial(const Eigen::Matrix3d& P3,
                                                      double r,
                                                      std::int64_t count,
                                                      std::uint64_t seed);

struct ConformalSpec {
  int n = 0;  // training size
  int m = 0;  // number of null test points
};

inline constexpr int kConformalExactCap = 30;  // n + m cap for the exact path

// P(P_i = j_i/(n+1), i in [m]) as an exact rational; indices are 1-based
// values in {1..n+1}.
mpq_class conformal_joint_pmf(const ConformalSpec& spec,
                              std::span<const int> indices);

// Invariant correlation of a null conformal pair: 1/(n+2).
mpq_class conformal_corr(int n);

// Per replicate: n + m iid uniform scores, p-values on the grid
// {1..n+1}/(n+1).
SampleMatrix sample_conformal(const ConformalSpec& spec, std::int64_t count,
                              std::uint64_t seed);
SampleMatrix sample_conformal_serial(const ConformalSpec& spec,
                                     std::int64_t count, std::uint64_t seed);

// Elementwise marginal transform of a sample block.
void apply_marginal_transform(SampleMatrix& samples,
                              const std::function<double(double)>& g);

// g(x) = ceil(n x) / n, the discretizing transform.
std::function<double(double)> ceiling_grid_transform(int n);

}  // namespace invcorr
