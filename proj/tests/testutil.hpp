#pragma once

// Shared generators and independent oracles for the test suites. Oracles
// here recompute expected values from first principles (plain loops over
// events) so the library paths they check stay independent.

#include <algorithm>
#include <cmath>
#include <vector>

#include "invcorr/bivariate.hpp"
#include "invcorr/rng.hpp"

namespace testutil {

using invcorr::CounterRng;
using invcorr::JointPMF;

// Random strictly positive probability vector.
inline std::vector<double> random_simplex(int n, CounterRng& rng) {
  std::vector<double> p(static_cast<std::size_t>(n));
  double total = 0.0;
  for (auto& value : p) {
    value = 0.05 + rng.next_uniform();
    total += value;
  }
  for (auto& value : p) value /= total;
  return p;
}

// Random antisymmetric matrix with zero row and column sums, scaled so that
// base + scale * S stays entrywise nonnegative (scale <= fraction of the
// largest feasible multiplier).
inline Eigen::MatrixXd random_compatible_antisymmetric(
    const Eigen::MatrixXd& base, double fraction, CounterRng& rng) {
  const auto n = base.rows();
  Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double value = rng.next_normal();
      raw(i, j) = value;
      raw(j, i) = -value;
    }
  }
  // Project onto zero row sums, staying antisymmetric.
  const Eigen::VectorXd sums = raw.rowwise().sum();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  raw -= (sums * ones.transpose() - ones * sums.transpose()) /
         static_cast<double>(n);
  double limit = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (raw(i, j) < 0.0) {
        limit = std::min(limit, base(i, j) / -raw(i, j));
      }
    }
  }
  if (!std::isfinite(limit)) limit = 1.0;
  return fraction * limit * raw;
}

// Random atoms: sorted distinct values in roughly [-2, 2].
inline std::vector<double> random_atoms(int n, CounterRng& rng) {
  std::vector<double> atoms(static_cast<std::size_t>(n));
  for (auto& atom : atoms) atom = 4.0 * rng.next_uniform() - 2.0;
  std::sort(atoms.begin(), atoms.end());
  for (std::size_t i = 1; i < atoms.size(); ++i) {
    if (atoms[i] - atoms[i - 1] < 1e-3) atoms[i] = atoms[i - 1] + 1e-3;
  }
  return atoms;
}

// Oracle: correlation of (g(X), g(Y)) by plain event sums, no shared code
// with the library path.
inline double oracle_transform_corr(const JointPMF& pmf,
                                    const std::vector<double>& zx,
                                    const std::vector<double>& zy) {
  double ex = 0, ey = 0, exx = 0, eyy = 0, exy = 0;
  for (Eigen::Index i = 0; i < pmf.P.rows(); ++i) {
    for (Eigen::Index j = 0; j < pmf.P.cols(); ++j) {
      const double mass = pmf.P(i, j);
      const double gx = zx[static_cast<std::size_t>(i)];
      const double gy = zy[static_cast<std::size_t>(j)];
      ex += mass * gx;
      ey += mass * gy;
      exx += mass * gx * gx;
      eyy += mass * gy * gy;
      exy += mass * gx * gy;
    }
  }
  return (exy - ex * ey) /
         std::sqrt((exx - ex * ex) * (eyy - ey * ey));
}

// Oracle: the event identity of quasi-independence checked over every pair
// of atom subsets of the union grid (exponential; grids <= 5).
inline bool oracle_quasi_independent_events(const JointPMF& pmf, double tol) {
  const invcorr::UnionEmbedding e = invcorr::embed_on_union_grid(pmf);
  const int n = static_cast<int>(e.atoms.size());
  const std::uint32_t limit = 1u << n;
  for (std::uint32_t a = 0; a < limit; ++a) {
    for (std::uint32_t b = 0; b < limit; ++b) {
      double joint_ab = 0, joint_ba = 0, px_a = 0, px_b = 0, qy_a = 0, qy_b = 0;
      for (int i = 0; i < n; ++i) {
        if (a & (1u << i)) {
          px_a += e.p(i);
          qy_a += e.q(i);
        }
        if (b & (1u << i)) {
          px_b += e.p(i);
          qy_b += e.q(i);
        }
        for (int j = 0; j < n; ++j) {
          if ((a & (1u << i)) && (b & (1u << j))) joint_ab += e.P(i, j);
          if ((b & (1u << i)) && (a & (1u << j))) joint_ba += e.P(i, j);
        }
      }
      if (std::abs(joint_ab + joint_ba - (px_a * qy_b + px_b * qy_a)) > tol) {
        return false;
      }
    }
  }
  return true;
}

// Oracle: the CDF identity of quasi-independence checked at every pair of
// real thresholds that matter (atom values).
inline bool oracle_quasi_independent_cdf(const JointPMF& pmf, double tol) {
  const invcorr::UnionEmbedding e = invcorr::embed_on_union_grid(pmf);
  const int n = static_cast<int>(e.atoms.size());
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      double h_ab = 0, h_ba = 0, fx_a = 0, fx_b = 0, gy_a = 0, gy_b = 0;
      for (int i = 0; i <= a; ++i) fx_a += e.p(i);
      for (int i = 0; i <= b; ++i) fx_b += e.p(i);
      for (int j = 0; j <= a; ++j) gy_a += e.q(j);
      for (int j = 0; j <= b; ++j) gy_b += e.q(j);
      for (int i = 0; i <= a; ++i) {
        for (int j = 0; j <= b; ++j) h_ab += e.P(i, j);
      }
      for (int i = 0; i <= b; ++i) {
        for (int j = 0; j <= a; ++j) h_ba += e.P(i, j);
      }
      if (std::abs(0.5 * (h_ab + h_ba) -
                   0.5 * (fx_a * gy_b + fx_b * gy_a)) > tol) {
        return false;
      }
    }
  }
  return true;
}

// Pushforward of a pmf under an atom map h (merging allowed).
inline JointPMF pushforward(const JointPMF& pmf,
                            const std::function<double(double)>& h) {
  std::vector<double> xs, ys;
  for (double atom : pmf.x_atoms) xs.push_back(h(atom));
  for (double atom : pmf.y_atoms) ys.push_back(h(atom));
  std::vector<double> ux = xs, uy = ys;
  std::sort(ux.begin(), ux.end());
  ux.erase(std::unique(ux.begin(), ux.end()), ux.end());
  std::sort(uy.begin(), uy.end());
  uy.erase(std::unique(uy.begin(), uy.end()), uy.end());
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(ux.size()), static_cast<Eigen::Index>(uy.size()));
  auto find = [](const std::vector<double>& grid, double value) {
    return static_cast<Eigen::Index>(
        std::lower_bound(grid.begin(), grid.end(), value) - grid.begin());
  };
  for (Eigen::Index i = 0; i < pmf.P.rows(); ++i) {
    for (Eigen::Index j = 0; j < pmf.P.cols(); ++j) {
      P(find(ux, xs[static_cast<std::size_t>(i)]),
        find(uy, ys[static_cast<std::size_t>(j)])) += pmf.P(i, j);
    }
  }
  return invcorr::make_joint_pmf(std::move(ux), std::move(uy), std::move(P));
}

// The tri-atomic uniform model with the cyclic antisymmetric perturbation:
// P = p q' + S, s_12 = s_23 = s_31 = epsilon.
inline JointPMF cyclic_triatomic(double epsilon) {
  Eigen::MatrixXd S(3, 3);
  S << 0, epsilon, -epsilon, -epsilon, 0, epsilon, epsilon, -epsilon, 0;
  const std::vector<double> p{1.0 / 3, 1.0 / 3, 1.0 / 3};
  return invcorr::make_quasi_independent(p, p, S);
}

}  // namespace testutil
