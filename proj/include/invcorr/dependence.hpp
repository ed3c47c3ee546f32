#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "invcorr/bivariate.hpp"
#include "invcorr/samples.hpp"

namespace invcorr {

// Finite law on a product grid; probs is dense row-major over the grid
// (last coordinate fastest). Every per-coordinate level carries positive
// marginal mass.
struct GridPMF {
  int d = 0;
  std::vector<std::vector<double>> levels;
  std::vector<double> probs;
};

GridPMF make_grid_pmf(std::vector<std::vector<double>> levels,
                      std::vector<double> probs, double tol = 1e-12);

// Bivariate pmf viewed as a 2-dimensional grid law.
GridPMF grid_from_joint(const JointPMF& pmf);

// Quadrant dependence: joint CDF dominates / is dominated by the product of
// the marginals at every grid point (1e-12 slack).
bool is_pqd(const JointPMF& pmf, double tol = 1e-12);
bool is_nqd(const JointPMF& pmf, double tol = 1e-12);

// Conditioning convention for the regression-dependence check: on the event
// {X_i = x} (the definition) or on {X_i <= x} (the weaker variant used by
// the FGM counterexample).
enum class PrdConditioning { point, tail };

struct PrdOptions {
  std::int64_t max_cells = 4096;
  std::int64_t max_upsets = 1'000'000;
  double tol = 1e-12;
  PrdConditioning conditioning = PrdConditioning::point;
};

struct PrdWitness {
  int index = 0;                                  // conditioning coordinate, 1-based
  std::vector<std::vector<int>> upset_cells;      // each cell as 1-based level indices
  double x = 0.0;
  double x_prime = 0.0;
  double p_x = 0.0;
  double p_x_prime = 0.0;
};

struct PrdResult {
  bool prd = false;
  std::optional<PrdWitness> witness;
  std::int64_t upsets_checked = 0;
};

// Exhaustive check over every increasing set (up-set) of the grid poset.
// Throws a capacity error (suggesting is_prd_sampled) when the enumeration
// would exceed the caps.
PrdResult is_prd(const GridPMF& pmf, std::span<const int> subset = {},
                 const PrdOptions& options = {});

// Randomized fallback: checks n_sets seeded random up-sets plus all upper
// orthants. A failure is conclusive; a pass is evidence only.
PrdResult is_prd_sampled(const GridPMF& pmf, std::span<const int> subset,
                         int n_sets, std::uint64_t seed,
                         const PrdOptions& options = {});

// Up-sets of the product grid poset as cell masks, for the enumeration
// sanity checks.
std::vector<std::vector<std::uint64_t>> enumerate_upsets(
    std::span<const int> shape, std::int64_t max_upsets = 1'000'000);

// Trivariate FGM copula  u1 u2 u3 (1 + theta (1-u1)(1-u2)(1-u3)).
double fgm_copula3(double theta, double u1, double u2, double u3);

// P(U2 > t2, U3 > t3 | U1 <= s) for the FGM model, the conditional whose
// derivative in s is constant.
double fgm_conditional_prob(double theta, double s, double t2, double t3);

// d/ds P(U2 > t2, U3 > t3 | U1 <= s) = -theta t2 t3 (1-t2)(1-t3).
double fgm_conditional_derivative(double theta, double t2, double t3);

struct TailDependenceEstimate {
  double lambda_hat = 0.0;
  std::int64_t tail_count = 0;
  bool stable = false;  // u * count >= 100
};

// Empirical P(both <= u) / u for bivariate samples on uniform margins.
TailDependenceEstimate tail_dependence_estimate(const SampleMatrix& samples,
                                                double u);

}  // namespace invcorr
