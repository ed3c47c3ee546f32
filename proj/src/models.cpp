#include "invcorr/models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "invcorr/rng.hpp"

namespace invcorr {

GammaModel make_gamma_model(int d,
                            std::vector<std::pair<SetPartition, double>> components,
                            double tol) {
  if (components.empty()) {
    fail(ErrorCode::validation, "gamma model needs at least one component");
  }
  double total = 0.0;
  for (const auto& [partition, weight] : components) {
    validate_partition(partition);
    if (partition.d != d) {
      fail(ErrorCode::dimension, "component partition has wrong d");
    }
    if (weight < -tol) {
      fail(ErrorCode::validation, "component weight must be nonnegative");
    }
    total += weight;
  }
  if (std::abs(total - 1.0) > tol) {
    fail(ErrorCode::weight_sum, "component weights sum to " +
                                    std::to_string(total) + ", expected 1");
  }
  GammaModel model;
  model.d = d;
  model.components = std::move(components);
  return model;
}

CorrMatrix expected_corr(const GammaModel& model) {
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(model.d, model.d);
  for (const auto& [partition, weight] : model.components) {
    sum += weight * clique_point(partition).entries;
  }
  return make_corr_matrix(std::move(sum), 1e-9);
}

namespace {

// Fills one row: partition choice, then one uniform per block.
void fill_gamma_row(const GammaModel& model, std::uint64_t seed,
                    std::int64_t row, double* out) {
  CounterRng rng(seed, static_cast<std::uint64_t>(row));
  const double pick = rng.next_uniform();
  double cumulative = 0.0;
  const SetPartition* chosen = &model.components.back().first;
  for (const auto& [partition, weight] : model.components) {
    cumulative += weight;
    if (pick < cumulative) {
      chosen = &partition;
      break;
    }
  }
  for (const auto& block : chosen->blocks) {
    const double shared = rng.next_uniform();
    for (int index : block) {
      out[index - 1] = shared;
    }
  }
}

}  // namespace

SampleMatrix sample_gamma_model(const GammaModel& model, std::int64_t count,
                                std::uint64_t seed) {
  if (count < 1) fail(ErrorCode::parameter, "count must be >= 1");
  SampleMatrix samples = make_sample_matrix(count, model.d);
#pragma omp parallel for schedule(static)
  for (std::int64_t row = 0; row < count; ++row) {
    fill_gamma_row(model, seed, row,
                   samples.data.data() +
                       static_cast<std::size_t>(row) *
                           static_cast<std::size_t>(model.d));
  }
  return samples;
}

SampleMatrix sample_gamma_model_serial(const GammaModel& model,
                                       std::int64_t count, std::uint64_t seed) {
  if (count < 1) fail(ErrorCode::parameter, "count must be >= 1");
  SampleMatrix samples = make_sample_matrix(count, model.d);
  for (std::int64_t row = 0; row < count; ++row) {
    fill_gamma_row(model, seed, row,
                   samples.data.data() +
                       static_cast<std::size_t>(row) *
                           static_cast<std::size_t>(model.d));
  }
  return samples;
}

GammaModel model_from_membership(const MembershipCert& cert) {
  if (!cert.member) {
    fail(ErrorCode::structure,
         "cannot build a model from a non-member certificate");
  }
  if (cert.weights.empty()) {
    fail(ErrorCode::structure, "member certificate carries no weights");
  }
  return make_gamma_model(cert.weights.front().first.d, cert.weights, 1e-9);
}

GammaModel gamma_model_from_shared_column(std::span<const double> share_probs) {
  const int d = static_cast<int>(share_probs.size());
  if (d < 1 || d > 20) {
    fail(ErrorCode::dimension, "shared-column model supports 1 <= d <= 20");
  }
  for (double prob : share_probs) {
    if (prob < 0.0 || prob > 1.0) {
      fail(ErrorCode::parameter, "share probabilities must lie in [0,1]");
    }
  }
  std::vector<std::pair<SetPartition, double>> components;
  const std::uint32_t limit = 1u << d;
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    double weight = 1.0;
    std::vector<int> sharers;
    for (int i = 0; i < d; ++i) {
      if (mask & (1u << i)) {
        weight *= share_probs[static_cast<std::size_t>(i)];
        sharers.push_back(i + 1);
      } else {
        weight *= 1.0 - share_probs[static_cast<std::size_t>(i)];
      }
    }
    if (weight == 0.0) continue;
    std::vector<std::vector<int>> blocks;
    if (sharers.size() > 1) blocks.push_back(sharers);
    for (int i = 1; i <= d; ++i) {
      if (sharers.size() > 1 &&
          std::find(sharers.begin(), sharers.end(), i) != sharers.end()) {
        continue;
      }
      blocks.push_back({i});
    }
    components.emplace_back(make_partition(d, std::move(blocks)), weight);
  }
  // Masks with zero or one sharer all induce the singleton partition; merge
  // duplicates so weights stay a proper distribution over partitions.
  std::vector<std::pair<SetPartition, double>> merged;
  for (auto& [partition, weight] : components) {
    auto it = std::find_if(merged.begin(), merged.end(), [&](const auto& entry) {
      return entry.first == partition;
    });
    if (it == merged.end()) {
      merged.emplace_back(std::move(partition), weight);
    } else {
      it->second += weight;
    }
  }
  return make_gamma_model(d, std::move(merged), 1e-9);
}

GammaModel markov_gamma_model(std::span<const double> stay_probs) {
  const int d = static_cast<int>(stay_probs.size()) + 1;
  if (d < 2 || d > 20) {
    fail(ErrorCode::dimension, "markov model supports 2 <= d <= 20");
  }
  for (double prob : stay_probs) {
    if (prob < 0.0 || prob > 1.0) {
      fail(ErrorCode::parameter, "stay probabilities must lie in [0,1]");
    }
  }
  std::vector<std::pair<SetPartition, double>> components;
  const std::uint32_t limit = 1u << (d - 1);
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    // Bit l set: coordinates l+1 and l+2 share a block (the chain stayed).
    double weight = 1.0;
    for (int l = 0; l < d - 1; ++l) {
      const double p = stay_probs[static_cast<std::size_t>(l)];
      weight *= (mask & (1u << l)) ? p : 1.0 - p;
    }
    if (weight == 0.0) continue;
    std::vector<std::vector<int>> blocks;
    std::vector<int> current{1};
    for (int i = 2; i <= d; ++i) {
      if (mask & (1u << (i - 2))) {
        current.push_back(i);
      } else {
        blocks.push_back(std::move(current));
        current = {i};
      }
    }
    blocks.push_back(std::move(current));
    components.emplace_back(make_partition(d, std::move(blocks)), weight);
  }
  return make_gamma_model(d, std::move(components), 1e-9);
}

namespace {

void fill_markov_row(std::span<const double> stay_probs, std::uint64_t seed,
                     std::int64_t row, double* out) {
  const int d = static_cast<int>(stay_probs.size()) + 1;
  CounterRng rng(seed, static_cast<std::uint64_t>(row));
  out[0] = rng.next_uniform();
  for (int i = 1; i < d; ++i) {
    const double stay = rng.next_uniform();
    const double fresh = rng.next_uniform();
    out[i] = stay < stay_probs[static_cast<std::size_t>(i - 1)] ? out[i - 1]
                                                                : fresh;
  }
}

}  // namespace

MarkovModel sample_markov_model(std::span<const double> stay_probs,
                                std::int64_t count, std::uint64_t seed) {
  MarkovModel result;
  result.model = markov_gamma_model(stay_probs);
  if (count < 1) fail(ErrorCode::parameter, "count must be >= 1");
  const int d = result.model.d;
  result.samples = make_sample_matrix(count, d);
#pragma omp parallel for schedule(static)
  for (std::int64_t row = 0; row < count; ++row) {
    fill_markov_row(stay_probs, seed, row,
                    result.samples.data.data() +
                        static_cast<std::size_t>(row) *
                            static_cast<std::size_t>(d));
  }
  return result;
}

double frechet_copula_cdf(double u, double v, double r, double s) {
  if (r < 0.0 || s < 0.0 || r + s > 1.0) {
    fail(ErrorCode::parameter, "frechet copula needs r, s >= 0 and r + s <= 1");
  }
  if (u < 0.0 || u > 1.0 || v < 0.0 || v > 1.0) {
    fail(ErrorCode::parameter, "copula arguments must lie in [0,1]");
  }
  const double m = std::min(u, v);
  const double w = std::max(u + v - 1.0, 0.0);
  return r * m + s * w + (1.0 - r - s) * u * v;
}

double r_frechet_cdf(double x, double y, const std::function<double(double)>& F,
                     double r) {
  if (r < 0.0 || r > 1.0) {
    fail(ErrorCode::parameter, "r must lie in [0,1]");
  }
  const double fx = F(x);
  const double fy = F(y);
  return r * std::min(fx, fy) + (1.0 - r) * fx * fy;
}

namespace {

void validate_checkerboard(const Eigen::Matrix3d& P3, double r) {
  if (r < 0.0 || r > 1.0) {
    fail(ErrorCode::parameter, "checkerboard r must lie in [0,1]");
  }
  constexpr double tol = 1e-12;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(P3.row(i).sum() - 1.0 / 3.0) > tol ||
        std::abs(P3.col(i).sum() - 1.0 / 3.0) > tol) {
      fail(ErrorCode::validation,
           "checkerboard matrix must have row and column sums 1/3");
    }
  }
  const Eigen::Matrix3d sym = 0.5 * (P3 + P3.transpose());
  if ((sym.array() - 1.0 / 9.0).abs().maxCoeff() > tol) {
    fail(ErrorCode::validation,
         "(P3 + P3')/2 must equal the constant matrix 1/9");
  }
  if (P3.minCoeff() < -tol) {
    fail(ErrorCode::validation, "checkerboard matrix has a negative entry");
  }
}

void fill_checkerboard_row(const Eigen::Matrix3d& P3, double r,
                           std::uint64_t seed, std::int64_t row, double* out) {
  CounterRng rng(seed, static_cast<std::uint64_t>(row));
  if (rng.next_uniform() < r) {
    const double u = rng.next_uniform();
    out[0] = u;
    out[1] = u;
    return;
  }
  const double pick = rng.next_uniform();
  double cumulative = 0.0;
  int cell = 8;
  for (int k = 0; k < 9; ++k) {
    cumulative += P3(k / 3, k % 3);
    if (pick < cumulative) {
      cell = k;
      break;
    }
  }
  out[0] = (static_cast<double>(cell / 3) + rng.next_uniform()) / 3.0;
  out[1] = (static_cast<double>(cell % 3) + rng.next_uniform()) / 3.0;
}

}  // namespace

SampleMatrix sample_checkerboard_quasi_frechet(const Eigen::Matrix3d& P3,
                                               double r, std::int64_t count,
                                               std::uint64_t seed) {
  validate_checkerboard(P3, r);
  if (count < 1) fail(ErrorCode::parameter, "count must be >= 1");
  SampleMatrix samples = make_sample_matrix(count, 2);
#pragma omp parallel for schedule(static)
  for (std::int64_t row = 0; row < count; ++row) {
    fill_checkerboard_row(P3, r, seed, row,
                          samples.data.data() + static_cast<std::size_t>(row) * 2);
  }
  return samples;
}

SampleMatrix sample_checkerboard_quasi_frechet_serial(const Eigen::Matrix3d& P3,
                                                      double r,
                                                      std::int64_t count,
                                                      std::uint64_t seed) {
  validate_checkerboard(P3, r);
  if (count < 1) fail(ErrorCode::parameter, "count must be >= 1");
  SampleMatrix samples = make_sample_matrix(count, 2);
  for (std::int64_t row = 0; row < count; ++row) {
    fill_checkerboard_row(P3, r, seed, row,
                          samples.data.data() + static_cast<std::size_t>(row) * 2);
  }
  return samples;
}

namespace {

void validate_conformal(const ConformalSpec& spec, bool exact_path) {
  if (spec.n < 1 || spec.m < 1) {
    fail(ErrorCode::validation, "conformal spec needs n >= 1 and m >= 1");
  }
  if (exact_path && spec.n + spec.m > kConformalExactCap) {
    fail(ErrorCode::dimension,
         "exact conformal path requires n + m <= " +
             std::to_string(kConformalExactCap));
  }
}

}  // namespace

mpq_class conformal_joint_pmf(const ConformalSpec& spec,
                              std::span<const int> indices) {
  validate_conformal(spec, /*exact_path=*/true);
  if (static_cast<int>(indices.size()) != spec.m) {
    fail(ErrorCode::dimension, "expected one index per test point");
  }
  std::vector<int> counts(static_cast<std::size_t>(spec.n + 1), 0);
  for (int j : indices) {
    if (j < 1 || j > spec.n + 1) {
      fail(ErrorCode::validation, "index " + std::to_string(j) +
                                      " outside {1.." +
                                      std::to_string(spec.n + 1) + "}");
    }
    ++counts[static_cast<std::size_t>(j - 1)];
  }
  mpz_class numerator = 1;
  for (int c : counts) {
    mpz_class factorial;
    mpz_fac_ui(factorial.get_mpz_t(), static_cast<unsigned long>(c));
    numerator *= factorial;
  }
  mpz_class denominator = 1;
  for (int k = spec.n + 1; k <= spec.n + spec.m; ++k) {
    denominator *= k;
  }
  mpq_class result(numerator, denominator);
  result.canonicalize();
  return result;
}

mpq_class conformal_corr(int n) {
  if (n < 1) fail(ErrorCode::validation, "conformal_corr needs n >= 1");
  mpq_class result(1, n + 2);
  result.canonicalize();
  return result;
}

namespace {

void fill_conformal_row(const ConformalSpec& spec, std::uint64_t seed,
                        std::int64_t row, double* out) {
  CounterRng rng(seed, static_cast<std::uint64_t>(row));
  std::vector<double> train(static_cast<std::size_t>(spec.n));
  for (auto& score : train) score = rng.next_uniform();
  for (int i = 0; i < spec.m; ++i) {
    const double test = rng.next_uniform();
    int below = 0;
    for (double score : train) {
      if (score <= test) ++below;
    }
    out[i] = static_cast<double>(1 + below) / static_cast<double>(spec.n + 1);
  }
}

}  // namespace

SampleMatrix sample_conformal(const ConformalSpec& spec, std::int64_t count,
                              std::uint64_t seed) {
  validate_conformal(spec, /*exact_path=*/false);
  if (count < 1) fail(ErrorCode::parameter, "count must be >= 1");
  SampleMatrix samples = make_sample_matrix(count, spec.m);
#pragma omp parallel for schedule(static)
  for (std::int64_t row = 0; row < count; ++row) {
    fill_conformal_row(spec, seed, row,
                       samples.data.data() +
                           static_cast<std::size_t>(row) *
                               static_cast<std::size_t>(spec.m));
  }
  return samples;
}

SampleMatrix sample_conformal_serial(const ConformalSpec& spec,
                                     std::int64_t count, std::uint64_t seed) {
  validate_conformal(spec, /*exact_path=*/false);
  if (count < 1) fail(ErrorCode::parameter, "count must be >= 1");
  SampleMatrix samples = make_sample_matrix(count, spec.m);
  for (std::int64_t row = 0; row < count; ++row) {
    fill_conformal_row(spec, seed, row,
                       samples.data.data() +
                           static_cast<std::size_t>(row) *
                               static_cast<std::size_t>(spec.m));
  }
  return samples;
}

void apply_marginal_transform(SampleMatrix& samples,
                              const std::function<double(double)>& g) {
  const std::int64_t total = static_cast<std::int64_t>(samples.data.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < total; ++i) {
    samples.data[static_cast<std::size_t>(i)] =
        g(samples.data[static_cast<std::size_t>(i)]);
  }
}

std::function<double(double)> ceiling_grid_transform(int n) {
  if (n < 1) fail(ErrorCode::parameter, "grid transform needs n >= 1");
  return [n](double x) {
    return std::ceil(static_cast<double>(n) * x) / static_cast<double>(n);
  };
}

}  // namespace invcorr
