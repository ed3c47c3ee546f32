#include "invcorr/verify.hpp"

#include <algorithm>
#include <cmath>

#include "invcorr/rng.hpp"
#include "invcorr/stats.hpp"

namespace invcorr {

const char* to_string(VerifyMode mode) {
  return mode == VerifyMode::all ? "all" : "increasing";
}

VerifyMode verify_mode_from_string(const std::string& name) {
  if (name == "all") return VerifyMode::all;
  if (name == "increasing") return VerifyMode::increasing;
  fail(ErrorCode::parameter, "unknown mode '" + name + "'");
}

namespace {

TransformSpec canonical_identity() {
  return {"identity", TransformKind::polynomial, {0.0, 1.0}, true};
}

TransformSpec canonical_square() {
  // (2u - 1)^2 in unit coordinates: the parabola centered mid-domain, so the
  // map is genuinely non-monotone on every domain.
  return {"square", TransformKind::polynomial, {1.0, -4.0, 4.0}, false};
}

TransformSpec canonical_abs() {
  // |2u - 1| in unit coordinates.
  return {"abs", TransformKind::piecewise_linear, {0.0, 0.5, 1.0, 1.0, 0.0, 1.0},
          false};
}

TransformSpec canonical_clipped_exp() {
  return {"clipped-exp", TransformKind::clipped_exp, {4.0, 1e8}, true};
}

TransformSpec canonical_midpoints() {
  return {"atom-midpoints", TransformKind::atom_midpoint_indicators, {}, true};
}

TransformSpec random_spec(VerifyMode mode, int index, CounterRng& rng) {
  TransformSpec spec;
  spec.id = "rand-" + std::string(to_string(mode)) + "-" + std::to_string(index);
  if (mode == VerifyMode::all) {
    switch (index % 3) {
      case 0: {
        spec.kind = TransformKind::indicator_combination;
        for (int k = 0; k < 3; ++k) {
          spec.params.push_back(rng.next_uniform());
          spec.params.push_back(rng.next_normal());
        }
        spec.monotone = false;
        break;
      }
      case 1: {
        spec.kind = TransformKind::polynomial;
        const int degree = 2 + static_cast<int>(rng.next_index(3));
        for (int k = 0; k <= degree; ++k) spec.params.push_back(rng.next_normal());
        spec.monotone = false;
        break;
      }
      default: {
        spec.kind = TransformKind::piecewise_linear;
        std::vector<double> knots{0.0, 0.0, 0.0, 1.0};
        knots[1] = rng.next_uniform();
        knots[2] = rng.next_uniform();
        std::sort(knots.begin(), knots.end());
        spec.params = knots;
        for (std::size_t k = 0; k < knots.size(); ++k) {
          spec.params.push_back(rng.next_normal());
        }
        spec.monotone = false;
        break;
      }
    }
    return spec;
  }
  switch (index % 3) {
    case 0: {
      spec.kind = TransformKind::sorted_step;
      std::vector<double> thresholds{rng.next_uniform(), rng.next_uniform(),
                                     rng.next_uniform()};
      std::sort(thresholds.begin(), thresholds.end());
      std::vector<double> values{rng.next_normal(), rng.next_normal(),
                                 rng.next_normal(), rng.next_normal()};
      std::sort(values.begin(), values.end());
      spec.params = thresholds;
      spec.params.insert(spec.params.end(), values.begin(), values.end());
      break;
    }
    case 1: {
      spec.kind = TransformKind::piecewise_linear;
      std::vector<double> knots{0.0, 0.0, 0.0, 1.0};
      knots[1] = rng.next_uniform();
      knots[2] = rng.next_uniform();
      std::sort(knots.begin(), knots.end());
      std::vector<double> values{rng.next_normal(), rng.next_normal(),
                                 rng.next_normal(), rng.next_normal()};
      std::sort(values.begin(), values.end());
      spec.params = knots;
      spec.params.insert(spec.params.end(), values.begin(), values.end());
      break;
    }
    default: {
      // Odd power on a shifted domain: (x - c)^3, expanded coefficients.
      const double c = rng.next_uniform();
      spec.kind = TransformKind::polynomial;
      spec.params = {-c * c * c, 3.0 * c * c, -3.0 * c, 1.0};
      break;
    }
  }
  spec.monotone = true;
  return spec;
}

}  // namespace

std::vector<TransformSpec> transform_library(VerifyMode mode, int count,
                                             std::uint64_t seed) {
  if (count < 1) fail(ErrorCode::parameter, "transform count must be >= 1");
  std::vector<TransformSpec> specs;
  if (mode == VerifyMode::all) {
    specs = {canonical_identity(), canonical_square(), canonical_abs(),
             canonical_clipped_exp(), canonical_midpoints()};
  } else {
    specs = {canonical_identity(), canonical_clipped_exp(),
             canonical_midpoints()};
  }
  if (static_cast<int>(specs.size()) > count) {
    specs.resize(static_cast<std::size_t>(count));
    return specs;
  }
  CounterRng rng(seed, /*stream=*/0x7261'6e64ULL);
  int index = 0;
  while (static_cast<int>(specs.size()) < count) {
    specs.push_back(random_spec(mode, index++, rng));
  }
  return specs;
}

namespace {

double eval_polynomial(std::span<const double> coeffs, double x) {
  double value = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 0;) {
    value = value * x + coeffs[k];
  }
  return value;
}

double eval_piecewise_linear(std::span<const double> params, double x) {
  const std::size_t k = params.size() / 2;
  const auto knots = params.first(k);
  const auto values = params.subspan(k);
  if (x <= knots[0]) {
    const double slope =
        k > 1 ? (values[1] - values[0]) / (knots[1] - knots[0]) : 0.0;
    return values[0] + slope * (x - knots[0]);
  }
  for (std::size_t i = 1; i < k; ++i) {
    if (x <= knots[i] || i + 1 == k) {
      const double width = knots[i] - knots[i - 1];
      if (width <= 0.0) return values[i];
      const double t = (x - knots[i - 1]) / width;
      return values[i - 1] + t * (values[i] - values[i - 1]);
    }
  }
  return values[k - 1];
}

double eval_sorted_step(std::span<const double> params, double x) {
  const std::size_t k = params.size() / 2;  // k thresholds, k+1 values
  const auto thresholds = params.first(k);
  const auto values = params.subspan(k);
  std::size_t level = 0;
  while (level < k && x > thresholds[level]) ++level;
  return values[level];
}

double eval_indicators(std::span<const double> params, double x) {
  double value = 0.0;
  for (std::size_t i = 0; i + 1 < params.size(); i += 2) {
    if (x > params[i]) value += params[i + 1];
  }
  return value;
}

// Affine map from unit-interval parameter coordinates onto [lo, hi].
struct DomainMap {
  double lo = 0.0;
  double hi = 1.0;
  double to_domain(double t) const { return lo + t * (hi - lo); }
  double to_unit(double x) const { return hi > lo ? (x - lo) / (hi - lo) : x; }
};

RealizedTransform realize_one(const TransformSpec& spec, const DomainMap& map) {
  RealizedTransform realized;
  realized.id = spec.id;
  realized.monotone = spec.monotone;
  switch (spec.kind) {
    case TransformKind::polynomial: {
      auto params = spec.params;
      realized.eval = [params, map](double x) {
        return eval_polynomial(params, map.to_unit(x));
      };
      break;
    }
    case TransformKind::piecewise_linear: {
      auto params = spec.params;
      realized.eval = [params, map](double x) {
        return eval_piecewise_linear(params, map.to_unit(x));
      };
      break;
    }
    case TransformKind::indicator_combination: {
      auto params = spec.params;
      realized.eval = [params, map](double x) {
        return eval_indicators(params, map.to_unit(x));
      };
      break;
    }
    case TransformKind::sorted_step: {
      auto params = spec.params;
      realized.eval = [params, map](double x) {
        return eval_sorted_step(params, map.to_unit(x));
      };
      break;
    }
    case TransformKind::clipped_exp: {
      const double scale = spec.params.at(0);
      const double cap = spec.params.at(1);
      realized.eval = [scale, cap, map](double x) {
        return std::min(std::exp(scale * map.to_unit(x)), cap);
      };
      break;
    }
    case TransformKind::atom_midpoint_indicators:
      fail(ErrorCode::parameter,
           "marker spec must be expanded by the realizer");
  }
  return realized;
}

std::vector<RealizedTransform> expand_midpoints(std::span<const double> cuts) {
  std::vector<RealizedTransform> realized;
  int index = 0;
  for (double cut : cuts) {
    RealizedTransform t;
    t.id = "midpoint-" + std::to_string(++index);
    t.monotone = true;
    t.eval = [cut](double x) { return x > cut ? 1.0 : 0.0; };
    realized.push_back(std::move(t));
  }
  return realized;
}

}  // namespace

std::vector<RealizedTransform> realize_for_atoms(
    std::span<const TransformSpec> specs, std::span<const double> atoms,
    VerifyMode mode, int extra_atom_maps, std::uint64_t seed) {
  if (atoms.size() < 2) {
    fail(ErrorCode::admissibility, "need at least two atoms to verify");
  }
  DomainMap map{atoms.front(), atoms.back()};
  std::vector<RealizedTransform> realized;
  for (const auto& spec : specs) {
    if (spec.kind == TransformKind::atom_midpoint_indicators) {
      std::vector<double> cuts;
      for (std::size_t i = 1; i < atoms.size(); ++i) {
        cuts.push_back(0.5 * (atoms[i - 1] + atoms[i]));
      }
      auto expanded = expand_midpoints(cuts);
      realized.insert(realized.end(), expanded.begin(), expanded.end());
    } else {
      realized.push_back(realize_one(spec, map));
    }
  }
  // Value-per-atom maps: iid standard normals, sorted when the mode demands
  // monotone transforms. On a finite support these are the generic
  // discriminators.
  for (int k = 0; k < extra_atom_maps; ++k) {
    CounterRng rng(seed, 0x61746f6dULL + static_cast<std::uint64_t>(k));
    std::vector<double> values(atoms.size());
    for (auto& value : values) value = rng.next_normal();
    if (mode == VerifyMode::increasing) {
      std::sort(values.begin(), values.end());
    }
    RealizedTransform t;
    t.id = "atom-map-" + std::to_string(k);
    t.monotone = mode == VerifyMode::increasing;
    std::vector<double> grid(atoms.begin(), atoms.end());
    t.eval = [grid = std::move(grid), values = std::move(values)](double x) {
      const auto it = std::lower_bound(grid.begin(), grid.end(), x);
      if (it == grid.end()) return values.back();
      return values[static_cast<std::size_t>(it - grid.begin())];
    };
    realized.push_back(std::move(t));
  }
  return realized;
}

std::vector<RealizedTransform> realize_for_unit_interval(
    std::span<const TransformSpec> specs) {
  DomainMap map{0.0, 1.0};
  std::vector<RealizedTransform> realized;
  for (const auto& spec : specs) {
    if (spec.kind == TransformKind::atom_midpoint_indicators) {
      const double cuts[] = {0.25, 0.5, 0.75};
      auto expanded = expand_midpoints(cuts);
      realized.insert(realized.end(), expanded.begin(), expanded.end());
    } else {
      realized.push_back(realize_one(spec, map));
    }
  }
  return realized;
}

std::optional<double> structural_invariance(const JointPMF& pmf, VerifyMode mode,
                                            double tol) {
  if (pmf.identical_marginals) {
    return quasi_frechet_fit(pmf, tol);
  }
  const bool both_biatomic = pmf.x_atoms.size() == 2 && pmf.y_atoms.size() == 2;
  if (both_biatomic) {
    if (pmf.x_atoms == pmf.y_atoms) {
      // Same two-point support: every transform acts affinely on both
      // marginals, so any correlation is invariant.
      return correlation(pmf);
    }
    if (mode == VerifyMode::increasing) {
      // Increasing maps stay increasing-affine on each two-point support.
      return correlation(pmf);
    }
    return is_quasi_independent(pmf, tol) ? std::optional<double>(0.0)
                                          : std::nullopt;
  }
  return is_quasi_independent(pmf, tol) ? std::optional<double>(0.0)
                                        : std::nullopt;
}

namespace {

std::vector<double> union_atoms(const JointPMF& pmf) {
  std::vector<double> atoms = pmf.x_atoms;
  atoms.insert(atoms.end(), pmf.y_atoms.begin(), pmf.y_atoms.end());
  std::sort(atoms.begin(), atoms.end());
  atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
  return atoms;
}

void finish_report(InvarianceReport& report, std::size_t tests) {
  report.inconclusive =
      tests > 0 && report.skipped_count * 2 > static_cast<int>(tests);
  if (report.inconclusive) report.pass = false;
}

}  // namespace

InvarianceReport verify_exact(const JointPMF& pmf, VerifyMode mode,
                              int n_transforms, std::uint64_t seed, double tol) {
  InvarianceReport report;
  report.mode = mode;
  report.target_r = correlation(pmf);
  const std::vector<TransformSpec> specs =
      transform_library(mode, n_transforms, seed);
  const std::vector<double> atoms = union_atoms(pmf);
  const std::vector<RealizedTransform> transforms =
      realize_for_atoms(specs, atoms, mode, n_transforms, seed);
  report.pass = true;
  for (const auto& transform : transforms) {
    TransformRecord record;
    record.id = transform.id;
    try {
      record.estimate = transform_correlation(pmf, transform.eval);
      record.deviation = std::abs(record.estimate - report.target_r);
      record.passed = record.deviation <= tol;
      report.max_abs_deviation =
          std::max(report.max_abs_deviation, record.deviation);
    } catch (const Error& error) {
      if (error.code() != ErrorCode::admissibility) throw;
      record.skipped = true;
      ++report.skipped_count;
    }
    if (!record.skipped && !record.passed) {
      report.pass = false;
      report.failing_ids.push_back(record.id);
    }
    report.records.push_back(std::move(record));
  }
  finish_report(report, transforms.size());
  report.structural_r = structural_invariance(pmf, mode, tol);
  report.structural_invariant = report.structural_r.has_value();
  report.oracle_structural_agree =
      report.structural_invariant == report.pass;
  return report;
}

InvarianceReport verify_mc(const SamplerFn& sampler, const CorrMatrix& target,
                           VerifyMode mode, int n_transforms,
                           std::int64_t n_samples, std::uint64_t seed,
                           double alpha) {
  if (n_samples < 10'000) {
    fail(ErrorCode::parameter, "verify_mc needs n_samples >= 10^4");
  }
  if (alpha <= 0.0 || alpha >= 1.0) {
    fail(ErrorCode::parameter, "alpha must lie in (0,1)");
  }
  InvarianceReport report;
  report.mode = mode;
  report.target_matrix = target.entries;
  const SampleMatrix samples = sampler(n_samples, seed);
  if (samples.cols != target.d) {
    fail(ErrorCode::dimension, "sampler output does not match the target d");
  }
  if (samples.cols == 2) report.target_r = target.entries(0, 1);
  const std::vector<TransformSpec> specs =
      transform_library(mode, n_transforms, seed);
  const std::vector<RealizedTransform> transforms =
      realize_for_unit_interval(specs);
  const std::size_t npairs =
      static_cast<std::size_t>(target.d) * (target.d - 1) / 2;
  const std::size_t tests = npairs * transforms.size();
  const double z =
      normal_quantile(1.0 - alpha / (2.0 * static_cast<double>(tests)));
  report.pass = true;
  const double sqrt_n = std::sqrt(static_cast<double>(n_samples));
  for (int i = 0; i < target.d; ++i) {
    for (int j = i + 1; j < target.d; ++j) {
      for (const auto& transform : transforms) {
        TransformRecord record;
        record.id = transform.id + ":pair(" + std::to_string(i + 1) + "," +
                    std::to_string(j + 1) + ")";
        const PairMoments m =
            pair_moments(column(samples, i), column(samples, j), transform.eval);
        // Variance at rounding-noise scale means the transformed column is
        // constant; correlations computed from it would be garbage.
        const double floor_x = 1e-12 * (1.0 + m.mean_x * m.mean_x);
        const double floor_y = 1e-12 * (1.0 + m.mean_y * m.mean_y);
        if (m.var_x <= floor_x || m.var_y <= floor_y) {
          record.skipped = true;
          ++report.skipped_count;
          report.records.push_back(std::move(record));
          continue;
        }
        record.estimate = m.cov / std::sqrt(m.var_x * m.var_y);
        record.se = (1.0 - record.estimate * record.estimate) / sqrt_n;
        // A spot-on estimate can produce se == 0 (comonotone pairs); give it
        // the binomial-scale floor so the band is never empty.
        record.se = std::max(record.se, 1.0 / static_cast<double>(n_samples));
        record.deviation = std::abs(record.estimate - target.entries(i, j));
        record.passed = record.deviation <= z * record.se;
        report.max_abs_deviation =
            std::max(report.max_abs_deviation, record.deviation);
        if (!record.passed) {
          report.pass = false;
          report.failing_ids.push_back(record.id);
        }
        report.records.push_back(std::move(record));
      }
    }
  }
  finish_report(report, tests);
  return report;
}

CopulaIdentityResult copula_identity_check(const SampleMatrix& samples, double r,
                                           int grid_size, double alpha) {
  if (samples.cols != 2) {
    fail(ErrorCode::dimension, "copula identity check expects bivariate samples");
  }
  if (grid_size < 2) fail(ErrorCode::parameter, "grid_size must be >= 2");
  const std::int64_t n = samples.rows;
  // Histogram on the grid, then prefix sums give the empirical CDF at the
  // grid corners in O(n + g^2).
  const int g = grid_size;
  std::vector<std::int64_t> hist(static_cast<std::size_t>(g) * g, 0);
  for (std::int64_t row = 0; row < n; ++row) {
    const double u = samples(row, 0);
    const double v = samples(row, 1);
    int iu = static_cast<int>(std::ceil(u * g)) - 1;
    int iv = static_cast<int>(std::ceil(v * g)) - 1;
    iu = std::clamp(iu, 0, g - 1);
    iv = std::clamp(iv, 0, g - 1);
    ++hist[static_cast<std::size_t>(iu) * g + iv];
  }
  std::vector<std::int64_t> cdf(static_cast<std::size_t>(g) * g, 0);
  for (int a = 0; a < g; ++a) {
    for (int b = 0; b < g; ++b) {
      std::int64_t sum = hist[static_cast<std::size_t>(a) * g + b];
      if (a > 0) sum += cdf[static_cast<std::size_t>(a - 1) * g + b];
      if (b > 0) sum += cdf[static_cast<std::size_t>(a) * g + b - 1];
      if (a > 0 && b > 0) sum -= cdf[static_cast<std::size_t>(a - 1) * g + b - 1];
      cdf[static_cast<std::size_t>(a) * g + b] = sum;
    }
  }
  CopulaIdentityResult result;
  for (int a = 0; a < g; ++a) {
    for (int b = 0; b < g; ++b) {
      const double u = static_cast<double>(a + 1) / g;
      const double v = static_cast<double>(b + 1) / g;
      const double c_uv =
          static_cast<double>(cdf[static_cast<std::size_t>(a) * g + b]) /
          static_cast<double>(n);
      const double c_vu =
          static_cast<double>(cdf[static_cast<std::size_t>(b) * g + a]) /
          static_cast<double>(n);
      const double model = r * std::min(u, v) + (1.0 - r) * u * v;
      result.max_deviation = std::max(
          result.max_deviation, std::abs(0.5 * (c_uv + c_vu) - model));
    }
  }
  // One-dimensional DKW constant with a factor-2 margin for the bivariate
  // empirical process.
  result.bound = 2.0 * std::sqrt(std::log(2.0 / alpha) /
                                 (2.0 * static_cast<double>(n)));
  result.pass = result.max_deviation <= result.bound;
  return result;
}

}  // namespace invcorr
