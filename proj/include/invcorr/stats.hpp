#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "invcorr/samples.hpp"

namespace invcorr {

// Deterministic reductions: inputs are cut into fixed 8192-element chunks,
// chunk sums run in parallel, and the chunk partials are accumulated in
// order. Results do not depend on the thread count.
inline constexpr std::int64_t kReductionChunk = 8192;

double chunked_sum(std::span<const double> values);

struct PairMoments {
  double mean_x = 0.0;
  double mean_y = 0.0;
  double var_x = 0.0;
  double var_y = 0.0;
  double cov = 0.0;
  std::int64_t n = 0;
};

// One-pass chunked moments of (f(x_i), h(y_i)); identity maps by default.
PairMoments pair_moments(ColumnView x, ColumnView y);
PairMoments pair_moments(ColumnView x, ColumnView y,
                         const std::function<double(double)>& g);

// Pearson correlation over the deterministic chunked path (production) and a
// plain serial loop (reference for the parallel-consistency tests).
double pearson(ColumnView x, ColumnView y);
double pearson_serial(ColumnView x, ColumnView y);

// Two-sided Kolmogorov-Smirnov statistic against the standard uniform CDF.
double ks_uniform_statistic(ColumnView values);

// Pr[Chi2_dof > stat].
double chi_square_tail(double stat, int dof);

// Standard normal quantile.
double normal_quantile(double p);

// Fraction of rows with both coordinates exactly equal (ties are bit-exact
// for block-sharing samplers).
double exact_tie_frequency(const SampleMatrix& samples, int col_a, int col_b);

// Fraction of rows with both coordinates <= u.
double lower_orthant_frequency(const SampleMatrix& samples, int col_a,
                               int col_b, double u);

}  // namespace invcorr
