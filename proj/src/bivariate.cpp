#include "invcorr/bivariate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace invcorr {

namespace {

void require_strictly_increasing(std::span<const double> atoms,
                                 const char* which) {
  for (std::size_t i = 1; i < atoms.size(); ++i) {
    if (!(atoms[i] > atoms[i - 1])) {
      fail(ErrorCode::validation,
           std::string(which) + " atoms must be strictly increasing");
    }
  }
}

std::vector<double> default_atoms(std::size_t n) {
  std::vector<double> atoms(n);
  for (std::size_t i = 0; i < n; ++i) atoms[i] = static_cast<double>(i + 1);
  return atoms;
}

// Correlation of (Z_x, Z_y) where Z_x = z_x(X), Z_y = z_y(Y), from the joint
// matrix. Values are centered before the moment pass: the uncentered
// E[XY] - EX EY form cancels catastrophically when a transform maps atoms to
// nearly equal values, and the structural tolerances sit at 1e-12.
double moments_correlation(const Eigen::MatrixXd& P,
                           std::span<const double> zx,
                           std::span<const double> zy) {
  const auto m = static_cast<std::size_t>(P.rows());
  const auto n = static_cast<std::size_t>(P.cols());
  long double ex = 0.0L, ey = 0.0L;
  std::vector<long double> row_mass(m, 0.0L), col_mass(n, 0.0L);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const long double pij = P(static_cast<Eigen::Index>(i),
                                static_cast<Eigen::Index>(j));
      row_mass[i] += pij;
      col_mass[j] += pij;
    }
  }
  for (std::size_t i = 0; i < m; ++i) ex += row_mass[i] * zx[i];
  for (std::size_t j = 0; j < n; ++j) ey += col_mass[j] * zy[j];
  long double var_x = 0.0L, var_y = 0.0L, cov = 0.0L;
  for (std::size_t i = 0; i < m; ++i) {
    const long double cx = zx[i] - ex;
    var_x += row_mass[i] * cx * cx;
    for (std::size_t j = 0; j < n; ++j) {
      cov += static_cast<long double>(P(static_cast<Eigen::Index>(i),
                                        static_cast<Eigen::Index>(j))) *
             cx * (zy[j] - ey);
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    const long double cy = zy[j] - ey;
    var_y += col_mass[j] * cy * cy;
  }
  if (var_x <= 0.0L || var_y <= 0.0L) {
    fail(ErrorCode::admissibility,
         "transform is degenerate (zero variance) on a support");
  }
  return static_cast<double>(cov / std::sqrt(var_x * var_y));
}

bool all_equal(std::span<const double> values) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] != values[0]) return false;
  }
  return true;
}

}  // namespace

JointPMF make_joint_pmf(std::vector<double> x_atoms, std::vector<double> y_atoms,
                        Eigen::MatrixXd P, double tol) {
  JointPMF pmf;
  if (x_atoms.empty() || y_atoms.empty()) {
    fail(ErrorCode::dimension, "pmf needs at least one atom per marginal");
  }
  require_strictly_increasing(x_atoms, "x");
  require_strictly_increasing(y_atoms, "y");
  if (P.rows() != static_cast<Eigen::Index>(x_atoms.size()) ||
      P.cols() != static_cast<Eigen::Index>(y_atoms.size())) {
    fail(ErrorCode::dimension, "P shape does not match atom counts");
  }
  if ((P.array() < -tol).any()) {
    fail(ErrorCode::validation, "probability matrix has a negative entry");
  }
  const double mass = P.sum();
  if (std::abs(mass - 1.0) > tol) {
    fail(ErrorCode::validation,
         "probability matrix mass is " + std::to_string(mass) + ", expected 1");
  }
  pmf.P = std::move(P);
  pmf.p = pmf.P.rowwise().sum();
  pmf.q = pmf.P.colwise().sum().transpose();
  if ((pmf.p.array() <= 0.0).any()) {
    fail(ErrorCode::validation, "every x atom must carry positive mass");
  }
  if ((pmf.q.array() <= 0.0).any()) {
    fail(ErrorCode::validation, "every y atom must carry positive mass");
  }
  pmf.x_atoms = std::move(x_atoms);
  pmf.y_atoms = std::move(y_atoms);
  pmf.identical_marginals = false;
  if (pmf.x_atoms.size() == pmf.y_atoms.size()) {
    bool same = true;
    for (std::size_t i = 0; i < pmf.x_atoms.size(); ++i) {
      if (pmf.x_atoms[i] != pmf.y_atoms[i] ||
          std::abs(pmf.p(static_cast<Eigen::Index>(i)) -
                   pmf.q(static_cast<Eigen::Index>(i))) > tol) {
        same = false;
        break;
      }
    }
    pmf.identical_marginals = same;
  }
  return pmf;
}

UnionEmbedding embed_on_union_grid(const JointPMF& pmf) {
  UnionEmbedding embedding;
  embedding.atoms = pmf.x_atoms;
  embedding.atoms.insert(embedding.atoms.end(), pmf.y_atoms.begin(),
                         pmf.y_atoms.end());
  std::sort(embedding.atoms.begin(), embedding.atoms.end());
  embedding.atoms.erase(
      std::unique(embedding.atoms.begin(), embedding.atoms.end()),
      embedding.atoms.end());
  const auto n = static_cast<Eigen::Index>(embedding.atoms.size());
  auto position = [&](double atom) {
    return static_cast<Eigen::Index>(
        std::lower_bound(embedding.atoms.begin(), embedding.atoms.end(), atom) -
        embedding.atoms.begin());
  };
  embedding.P = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < pmf.x_atoms.size(); ++i) {
    for (std::size_t j = 0; j < pmf.y_atoms.size(); ++j) {
      embedding.P(position(pmf.x_atoms[i]), position(pmf.y_atoms[j])) =
          pmf.P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  embedding.p = embedding.P.rowwise().sum();
  embedding.q = embedding.P.colwise().sum().transpose();
  return embedding;
}

double correlation(const JointPMF& pmf) {
  if (pmf.x_atoms.size() < 2 || pmf.y_atoms.size() < 2) {
    fail(ErrorCode::admissibility,
         "correlation needs at least two atoms per marginal");
  }
  return moments_correlation(pmf.P, pmf.x_atoms, pmf.y_atoms);
}

double transform_correlation(const JointPMF& pmf,
                             const std::function<double(double)>& g) {
  std::vector<double> zx(pmf.x_atoms.size());
  std::vector<double> zy(pmf.y_atoms.size());
  for (std::size_t i = 0; i < zx.size(); ++i) zx[i] = g(pmf.x_atoms[i]);
  for (std::size_t j = 0; j < zy.size(); ++j) zy[j] = g(pmf.y_atoms[j]);
  if (all_equal(zx) || all_equal(zy)) {
    fail(ErrorCode::admissibility, "transform is constant on a support");
  }
  return moments_correlation(pmf.P, zx, zy);
}

double transform_correlation_values(const JointPMF& pmf,
                                    std::span<const double> g_on_union) {
  const UnionEmbedding embedding = embed_on_union_grid(pmf);
  if (g_on_union.size() != embedding.atoms.size()) {
    fail(ErrorCode::dimension, "transform values do not match the union grid");
  }
  auto lookup = [&](double atom) {
    const auto it = std::lower_bound(embedding.atoms.begin(),
                                     embedding.atoms.end(), atom);
    return g_on_union[static_cast<std::size_t>(it - embedding.atoms.begin())];
  };
  return transform_correlation(pmf, lookup);
}

bool is_quasi_independent(const JointPMF& pmf, double tol) {
  const UnionEmbedding e = embed_on_union_grid(pmf);
  const Eigen::MatrixXd lhs = e.P + e.P.transpose();
  const Eigen::MatrixXd rhs =
      e.p * e.q.transpose() + e.q * e.p.transpose();
  return ((lhs - rhs).cwiseAbs().maxCoeff() <= tol);
}

std::optional<double> quasi_frechet_fit(const JointPMF& pmf, double tol) {
  if (!pmf.identical_marginals) {
    fail(ErrorCode::structure,
         "quasi_frechet_fit requires identical marginals");
  }
  if (pmf.x_atoms.size() < 2) {
    fail(ErrorCode::admissibility,
         "quasi_frechet_fit needs at least two atoms");
  }
  const Eigen::MatrixXd sym = 0.5 * (pmf.P + pmf.P.transpose());
  const Eigen::MatrixXd outer = pmf.p * pmf.p.transpose();
  const Eigen::MatrixXd target = sym - outer;                  // r * (D - pp')
  Eigen::MatrixXd basis = -outer;
  basis.diagonal() += pmf.p;                                   // D - pp'
  const double denom = (basis.array() * basis.array()).sum();
  if (denom <= 0.0) {
    fail(ErrorCode::structure, "degenerate marginal in quasi_frechet_fit");
  }
  const double r = (target.array() * basis.array()).sum() / denom;
  const double residual = (target - r * basis).norm();
  if (residual > tol) return std::nullopt;
  const RBounds bounds = r_bounds(
      std::span<const double>(pmf.p.data(), static_cast<std::size_t>(pmf.p.size())));
  if (r < bounds.lower - tol || r > bounds.upper + tol) return std::nullopt;
  return r;
}

RBounds r_bounds(std::span<const double> p) {
  if (p.size() < 2) {
    fail(ErrorCode::validation, "r_bounds requires at least two atoms");
  }
  double sum = 0.0;
  for (double value : p) {
    if (value <= 0.0) {
      fail(ErrorCode::validation, "probability vector must be strictly positive");
    }
    sum += value;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    fail(ErrorCode::validation, "probability vector must sum to 1");
  }
  double term_single = -1.0;
  for (double value : p) {
    term_single = std::max(term_single, -value / (1.0 - value));
  }
  double term_pair = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (i == j) continue;
      term_pair = std::max(term_pair, 1.0 - 1.0 / (p[i] * p[j]));
    }
  }
  RBounds bounds;
  bounds.lower = std::max(term_single, term_pair);
  bounds.upper = 1.0;
  return bounds;
}

namespace {

void check_antisymmetric_zero_sums(const Eigen::MatrixXd& S, double tol) {
  if (S.rows() != S.cols()) {
    fail(ErrorCode::construction, "S must be square");
  }
  if (((S + S.transpose()).cwiseAbs().maxCoeff()) > tol) {
    fail(ErrorCode::construction, "S must be antisymmetric");
  }
  const Eigen::VectorXd row_sums = S.rowwise().sum();
  if (row_sums.cwiseAbs().maxCoeff() > tol) {
    fail(ErrorCode::construction, "S must have zero row sums");
  }
  const Eigen::VectorXd col_sums = S.colwise().sum().transpose();
  if (col_sums.cwiseAbs().maxCoeff() > tol) {
    fail(ErrorCode::construction, "S must have zero column sums");
  }
}

// Drops zero-mass rows/columns (padded grid atoms) and builds the pmf.
JointPMF compress_and_build(const Eigen::MatrixXd& P,
                            std::span<const double> atoms, double tol) {
  const auto n = P.rows();
  const Eigen::VectorXd p = P.rowwise().sum();
  const Eigen::VectorXd q = P.colwise().sum().transpose();
  std::vector<Eigen::Index> rows, cols;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (p(i) > tol) rows.push_back(i);
    if (q(i) > tol) cols.push_back(i);
  }
  if (rows.empty() || cols.empty()) {
    fail(ErrorCode::construction, "construction left an empty support");
  }
  Eigen::MatrixXd Pc(static_cast<Eigen::Index>(rows.size()),
                     static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      Pc(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          std::max(0.0, P(rows[i], cols[j]));
    }
  }
  std::vector<double> x_atoms, y_atoms;
  for (Eigen::Index i : rows) x_atoms.push_back(atoms[static_cast<std::size_t>(i)]);
  for (Eigen::Index j : cols) y_atoms.push_back(atoms[static_cast<std::size_t>(j)]);
  return make_joint_pmf(std::move(x_atoms), std::move(y_atoms), std::move(Pc),
                        std::max(tol, 1e-9));
}

}  // namespace

JointPMF make_quasi_independent(std::span<const double> p,
                                std::span<const double> q,
                                const Eigen::MatrixXd& S,
                                std::span<const double> atoms, double tol) {
  const std::size_t n = q.size();
  if (p.size() != n || static_cast<std::size_t>(S.rows()) != n) {
    fail(ErrorCode::construction,
         "p, q and S must live on one common atom grid");
  }
  check_antisymmetric_zero_sums(S, tol);
  Eigen::VectorXd pv(n), qv(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (p[i] < 0.0 || q[i] < 0.0) {
      fail(ErrorCode::construction, "marginals must be nonnegative");
    }
    pv(static_cast<Eigen::Index>(i)) = p[i];
    qv(static_cast<Eigen::Index>(i)) = q[i];
  }
  Eigen::MatrixXd P = pv * qv.transpose() + S;
  if (P.minCoeff() < -tol) {
    fail(ErrorCode::construction,
         "p_i q_j + s_ij must be nonnegative entrywise");
  }
  const std::vector<double> grid =
      atoms.empty() ? default_atoms(n)
                    : std::vector<double>(atoms.begin(), atoms.end());
  if (grid.size() != n) {
    fail(ErrorCode::construction, "atom grid size does not match p");
  }
  return compress_and_build(P, grid, tol);
}

JointPMF make_quasi_frechet(std::span<const double> p, double r,
                            const Eigen::MatrixXd& S,
                            std::span<const double> atoms, double tol) {
  const std::size_t n = p.size();
  if (static_cast<std::size_t>(S.rows()) != n) {
    fail(ErrorCode::construction, "p and S must live on one common atom grid");
  }
  const RBounds bounds = r_bounds(p);
  if (r < bounds.lower - tol || r > bounds.upper + tol) {
    fail(ErrorCode::construction,
         "r = " + std::to_string(r) + " outside the admissible range [" +
             std::to_string(bounds.lower) + ", 1]");
  }
  check_antisymmetric_zero_sums(S, tol);
  Eigen::VectorXd pv(n);
  for (std::size_t i = 0; i < n; ++i) pv(static_cast<Eigen::Index>(i)) = p[i];
  Eigen::MatrixXd P = (1.0 - r) * (pv * pv.transpose()) + S;
  P.diagonal() += r * pv;
  if (P.minCoeff() < -tol) {
    fail(ErrorCode::construction,
         "r D + (1-r) p p' + S has a negative entry");
  }
  const std::vector<double> grid =
      atoms.empty() ? default_atoms(n)
                    : std::vector<double>(atoms.begin(), atoms.end());
  if (grid.size() != n) {
    fail(ErrorCode::construction, "atom grid size does not match p");
  }
  return compress_and_build(P, grid, tol);
}

JointPMF random_rearrangement(const JointPMF& pmf) {
  const UnionEmbedding e = embed_on_union_grid(pmf);
  Eigen::MatrixXd mixed = 0.5 * (e.P + e.P.transpose());
  return make_joint_pmf(e.atoms, e.atoms, std::move(mixed));
}

}  // namespace invcorr
