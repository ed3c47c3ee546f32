#include "invcorr/dependence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "invcorr/rng.hpp"

namespace invcorr {

GridPMF make_grid_pmf(std::vector<std::vector<double>> levels,
                      std::vector<double> probs, double tol) {
  GridPMF pmf;
  pmf.d = static_cast<int>(levels.size());
  if (pmf.d < 1) fail(ErrorCode::dimension, "grid pmf needs d >= 1");
  std::size_t cells = 1;
  for (const auto& axis : levels) {
    if (axis.empty()) fail(ErrorCode::validation, "empty level list");
    for (std::size_t i = 1; i < axis.size(); ++i) {
      if (!(axis[i] > axis[i - 1])) {
        fail(ErrorCode::validation, "levels must be strictly increasing");
      }
    }
    cells *= axis.size();
  }
  if (probs.size() != cells) {
    fail(ErrorCode::dimension, "probs size does not match the grid");
  }
  double mass = 0.0;
  for (double value : probs) {
    if (value < -tol) fail(ErrorCode::validation, "negative grid probability");
    mass += value;
  }
  if (std::abs(mass - 1.0) > std::max(tol, 1e-9)) {
    fail(ErrorCode::validation, "grid mass is " + std::to_string(mass));
  }
  pmf.levels = std::move(levels);
  pmf.probs = std::move(probs);
  // Positive marginal mass per level, enforced at construction so PRD never
  // conditions on a null atom.
  std::vector<std::size_t> strides(static_cast<std::size_t>(pmf.d), 1);
  for (int k = pmf.d - 2; k >= 0; --k) {
    strides[static_cast<std::size_t>(k)] =
        strides[static_cast<std::size_t>(k + 1)] *
        pmf.levels[static_cast<std::size_t>(k + 1)].size();
  }
  for (int k = 0; k < pmf.d; ++k) {
    const std::size_t nk = pmf.levels[static_cast<std::size_t>(k)].size();
    std::vector<double> marginal(nk, 0.0);
    for (std::size_t cell = 0; cell < cells; ++cell) {
      const std::size_t level =
          (cell / strides[static_cast<std::size_t>(k)]) % nk;
      marginal[level] += pmf.probs[cell];
    }
    for (std::size_t level = 0; level < nk; ++level) {
      if (marginal[level] <= tol) {
        fail(ErrorCode::validation,
             "level " + std::to_string(level + 1) + " of coordinate " +
                 std::to_string(k + 1) + " has no mass");
      }
    }
  }
  return pmf;
}

GridPMF grid_from_joint(const JointPMF& pmf) {
  std::vector<double> probs;
  probs.reserve(static_cast<std::size_t>(pmf.P.size()));
  for (Eigen::Index i = 0; i < pmf.P.rows(); ++i) {
    for (Eigen::Index j = 0; j < pmf.P.cols(); ++j) {
      probs.push_back(pmf.P(i, j));
    }
  }
  return make_grid_pmf({pmf.x_atoms, pmf.y_atoms}, std::move(probs));
}

namespace {

bool quadrant_dominates(const JointPMF& pmf, bool positive, double tol) {
  const auto m = pmf.P.rows();
  const auto n = pmf.P.cols();
  Eigen::MatrixXd cdf(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double sum = pmf.P(i, j);
      if (i > 0) sum += cdf(i - 1, j);
      if (j > 0) sum += cdf(i, j - 1);
      if (i > 0 && j > 0) sum -= cdf(i - 1, j - 1);
      cdf(i, j) = sum;
    }
  }
  Eigen::VectorXd F(m), G(n);
  std::partial_sum(pmf.p.data(), pmf.p.data() + m, F.data());
  std::partial_sum(pmf.q.data(), pmf.q.data() + n, G.data());
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double product = F(i) * G(j);
      if (positive && cdf(i, j) < product - tol) return false;
      if (!positive && cdf(i, j) > product + tol) return false;
    }
  }
  return true;
}

}  // namespace

bool is_pqd(const JointPMF& pmf, double tol) {
  return quadrant_dominates(pmf, /*positive=*/true, tol);
}

bool is_nqd(const JointPMF& pmf, double tol) {
  return quadrant_dominates(pmf, /*positive=*/false, tol);
}

namespace {

using Mask = std::vector<std::uint64_t>;

Mask empty_mask(std::size_t cells) { return Mask((cells + 63) / 64, 0); }

void set_bit(Mask& mask, std::size_t bit) {
  mask[bit / 64] |= (std::uint64_t{1} << (bit % 64));
}

bool test_bit(const Mask& mask, std::size_t bit) {
  return (mask[bit / 64] >> (bit % 64)) & 1u;
}

bool is_subset(const Mask& a, const Mask& b) {
  for (std::size_t w = 0; w < a.size(); ++w) {
    if (a[w] & ~b[w]) return false;
  }
  return true;
}

// Up-sets of the product poset by slicing along the first coordinate: the
// slices form a nested chain of up-sets of the remaining grid.
void upsets_recursive(std::span<const int> shape, std::int64_t max_upsets,
                      std::vector<Mask>& out) {
  if (shape.size() == 1) {
    const int n = shape[0];
    for (int t = n; t >= 0; --t) {
      Mask mask = empty_mask(static_cast<std::size_t>(n));
      for (int i = t; i < n; ++i) set_bit(mask, static_cast<std::size_t>(i));
      out.push_back(std::move(mask));
    }
    return;
  }
  std::vector<Mask> subs;
  upsets_recursive(shape.subspan(1), max_upsets, subs);
  std::size_t sub_cells = 1;
  for (std::size_t k = 1; k < shape.size(); ++k) {
    sub_cells *= static_cast<std::size_t>(shape[k]);
  }
  const int n1 = shape[0];
  std::vector<std::size_t> chain;
  Mask scratch;

  // DFS over chains U_1 subset ... subset U_{n1}.
  auto emit = [&]() {
    Mask mask = empty_mask(static_cast<std::size_t>(n1) * sub_cells);
    for (int slice = 0; slice < n1; ++slice) {
      const Mask& sub = subs[chain[static_cast<std::size_t>(slice)]];
      for (std::size_t bit = 0; bit < sub_cells; ++bit) {
        if (test_bit(sub, bit)) {
          set_bit(mask, static_cast<std::size_t>(slice) * sub_cells + bit);
        }
      }
    }
    out.push_back(std::move(mask));
    if (static_cast<std::int64_t>(out.size()) > max_upsets) {
      fail(ErrorCode::capacity,
           "up-set enumeration exceeded " + std::to_string(max_upsets) +
               " sets; use the sampled PRD variant");
    }
  };

  std::function<void(int)> dfs = [&](int slice) {
    if (slice == n1) {
      emit();
      return;
    }
    for (std::size_t s = 0; s < subs.size(); ++s) {
      if (slice > 0 && !is_subset(subs[chain[static_cast<std::size_t>(slice - 1)]],
                                  subs[s])) {
        continue;
      }
      chain.push_back(s);
      dfs(slice + 1);
      chain.pop_back();
    }
  };
  dfs(0);
}

}  // namespace

std::vector<Mask> enumerate_upsets(std::span<const int> shape,
                                   std::int64_t max_upsets) {
  if (shape.empty()) fail(ErrorCode::dimension, "empty grid shape");
  std::vector<Mask> out;
  upsets_recursive(shape, max_upsets, out);
  return out;
}

namespace {

struct GridGeometry {
  std::size_t cells = 1;
  std::vector<std::size_t> strides;
  std::vector<std::size_t> sizes;

  explicit GridGeometry(const GridPMF& pmf) {
    const auto d = static_cast<std::size_t>(pmf.d);
    strides.assign(d, 1);
    sizes.resize(d);
    for (std::size_t k = 0; k < d; ++k) sizes[k] = pmf.levels[k].size();
    for (std::size_t k = d - 1; k-- > 0;) {
      strides[k] = strides[k + 1] * sizes[k + 1];
    }
    for (std::size_t k = 0; k < d; ++k) cells *= sizes[k];
  }

  std::size_t level_of(std::size_t cell, std::size_t coord) const {
    return (cell / strides[coord]) % sizes[coord];
  }
};

std::vector<std::vector<int>> cells_of_mask(const Mask& mask,
                                            const GridGeometry& geom, int d) {
  std::vector<std::vector<int>> cells;
  for (std::size_t cell = 0; cell < geom.cells; ++cell) {
    if (!test_bit(mask, cell)) continue;
    std::vector<int> coords(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
      coords[static_cast<std::size_t>(k)] =
          static_cast<int>(geom.level_of(cell, static_cast<std::size_t>(k))) + 1;
    }
    cells.push_back(std::move(coords));
  }
  return cells;
}

// Checks one up-set against one conditioning coordinate; fills the witness
// and returns false on the first violation.
bool check_upset(const GridPMF& pmf, const GridGeometry& geom, const Mask& mask,
                 int coord, const PrdOptions& options, PrdWitness& witness) {
  const std::size_t k = static_cast<std::size_t>(coord);
  const std::size_t nk = geom.sizes[k];
  std::vector<double> in_set(nk, 0.0);
  std::vector<double> marginal(nk, 0.0);
  for (std::size_t cell = 0; cell < geom.cells; ++cell) {
    const std::size_t level = geom.level_of(cell, k);
    marginal[level] += pmf.probs[cell];
    if (test_bit(mask, cell)) in_set[level] += pmf.probs[cell];
  }
  std::vector<double> conditional(nk, 0.0);
  if (options.conditioning == PrdConditioning::point) {
    for (std::size_t level = 0; level < nk; ++level) {
      conditional[level] = in_set[level] / marginal[level];
    }
  } else {
    double cum_set = 0.0, cum_marg = 0.0;
    for (std::size_t level = 0; level < nk; ++level) {
      cum_set += in_set[level];
      cum_marg += marginal[level];
      conditional[level] = cum_set / cum_marg;
    }
  }
  for (std::size_t level = 1; level < nk; ++level) {
    if (conditional[level] < conditional[level - 1] - options.tol) {
      witness.index = coord + 1;
      witness.upset_cells = cells_of_mask(mask, geom, pmf.d);
      witness.x = pmf.levels[k][level - 1];
      witness.x_prime = pmf.levels[k][level];
      witness.p_x = conditional[level - 1];
      witness.p_x_prime = conditional[level];
      return false;
    }
  }
  return true;
}

std::vector<int> resolve_subset(const GridPMF& pmf, std::span<const int> subset) {
  std::vector<int> coords;
  if (subset.empty()) {
    coords.resize(static_cast<std::size_t>(pmf.d));
    std::iota(coords.begin(), coords.end(), 0);
  } else {
    for (int index : subset) {
      if (index < 1 || index > pmf.d) {
        fail(ErrorCode::validation, "subset index out of range");
      }
      coords.push_back(index - 1);
    }
  }
  return coords;
}

PrdResult run_prd(const GridPMF& pmf, const std::vector<Mask>& masks,
                  std::span<const int> subset, const PrdOptions& options) {
  const GridGeometry geom(pmf);
  const std::vector<int> coords = resolve_subset(pmf, subset);
  PrdResult result;
  result.prd = true;
  for (const Mask& mask : masks) {
    ++result.upsets_checked;
    for (int coord : coords) {
      PrdWitness witness;
      if (!check_upset(pmf, geom, mask, coord, options, witness)) {
        result.prd = false;
        result.witness = std::move(witness);
        return result;
      }
    }
  }
  return result;
}

}  // namespace

PrdResult is_prd(const GridPMF& pmf, std::span<const int> subset,
                 const PrdOptions& options) {
  const GridGeometry geom(pmf);
  if (static_cast<std::int64_t>(geom.cells) > options.max_cells) {
    fail(ErrorCode::capacity,
         "grid has " + std::to_string(geom.cells) + " cells, above the cap of " +
             std::to_string(options.max_cells) +
             "; use the sampled PRD variant");
  }
  std::vector<int> shape;
  for (std::size_t size : geom.sizes) shape.push_back(static_cast<int>(size));
  const std::vector<Mask> masks = enumerate_upsets(shape, options.max_upsets);
  return run_prd(pmf, masks, subset, options);
}

PrdResult is_prd_sampled(const GridPMF& pmf, std::span<const int> subset,
                         int n_sets, std::uint64_t seed,
                         const PrdOptions& options) {
  const GridGeometry geom(pmf);
  std::vector<Mask> masks;
  // All upper orthants {cell >= corner} first; they are the geometrically
  // meaningful increasing sets.
  for (std::size_t corner = 0; corner < geom.cells; ++corner) {
    Mask mask = empty_mask(geom.cells);
    for (std::size_t cell = 0; cell < geom.cells; ++cell) {
      bool geq = true;
      for (std::size_t k = 0; k < geom.sizes.size(); ++k) {
        if (geom.level_of(cell, k) < geom.level_of(corner, k)) {
          geq = false;
          break;
        }
      }
      if (geq) set_bit(mask, cell);
    }
    masks.push_back(std::move(mask));
  }
  // Random up-sets: the up-closure of a few random cells.
  CounterRng rng(seed, 0);
  for (int s = 0; s < n_sets; ++s) {
    Mask mask = empty_mask(geom.cells);
    const int generators = 1 + static_cast<int>(rng.next_index(3));
    for (int gen = 0; gen < generators; ++gen) {
      const std::size_t corner =
          static_cast<std::size_t>(rng.next_index(geom.cells));
      for (std::size_t cell = 0; cell < geom.cells; ++cell) {
        bool geq = true;
        for (std::size_t k = 0; k < geom.sizes.size(); ++k) {
          if (geom.level_of(cell, k) < geom.level_of(corner, k)) {
            geq = false;
            break;
          }
        }
        if (geq) set_bit(mask, cell);
      }
    }
    masks.push_back(std::move(mask));
  }
  return run_prd(pmf, masks, subset, options);
}

double fgm_copula3(double theta, double u1, double u2, double u3) {
  if (theta < -1.0 || theta > 1.0) {
    fail(ErrorCode::parameter, "FGM theta must lie in [-1,1]");
  }
  return u1 * u2 * u3 *
         (1.0 + theta * (1.0 - u1) * (1.0 - u2) * (1.0 - u3));
}

double fgm_conditional_prob(double theta, double s, double t2, double t3) {
  if (s <= 0.0 || s > 1.0) {
    fail(ErrorCode::parameter, "conditioning level s must lie in (0,1]");
  }
  return 1.0 - t2 - t3 + fgm_copula3(theta, s, t2, t3) / s;
}

double fgm_conditional_derivative(double theta, double t2, double t3) {
  if (theta < -1.0 || theta > 1.0) {
    fail(ErrorCode::parameter, "FGM theta must lie in [-1,1]");
  }
  if (t2 < 0.0 || t2 > 1.0 || t3 < 0.0 || t3 > 1.0) {
    fail(ErrorCode::parameter, "thresholds must lie in [0,1]");
  }
  return -theta * t2 * t3 * (1.0 - t2) * (1.0 - t3);
}

TailDependenceEstimate tail_dependence_estimate(const SampleMatrix& samples,
                                                double u) {
  if (samples.cols != 2) {
    fail(ErrorCode::dimension, "tail dependence expects bivariate samples");
  }
  if (u <= 0.0 || u >= 1.0) {
    fail(ErrorCode::parameter, "threshold u must lie in (0,1)");
  }
  TailDependenceEstimate estimate;
  std::int64_t hits = 0;
#pragma omp parallel for schedule(static) reduction(+ : hits)
  for (std::int64_t i = 0; i < samples.rows; ++i) {
    if (samples(i, 0) <= u && samples(i, 1) <= u) ++hits;
  }
  estimate.tail_count = hits;
  estimate.lambda_hat =
      static_cast<double>(hits) / (static_cast<double>(samples.rows) * u);
  estimate.stable = u * static_cast<double>(samples.rows) >= 100.0;
  return estimate;
}

}  // namespace invcorr
