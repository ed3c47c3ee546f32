#include "invcorr/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace invcorr {

CorrMatrix make_corr_matrix(Eigen::MatrixXd entries, double tol) {
  CorrMatrix matrix;
  matrix.d = static_cast<int>(entries.rows());
  matrix.entries = std::move(entries);
  validate_corr_matrix(matrix, tol);
  return matrix;
}

void validate_corr_matrix(const CorrMatrix& matrix, double tol) {
  const auto& m = matrix.entries;
  if (matrix.d < 1 || m.rows() != matrix.d || m.cols() != matrix.d) {
    fail(ErrorCode::dimension, "correlation matrix must be square and nonempty");
  }
  std::string violations;
  for (int i = 0; i < matrix.d; ++i) {
    if (std::abs(m(i, i) - 1.0) > tol) {
      violations += "diagonal entry (" + std::to_string(i + 1) + "," +
                    std::to_string(i + 1) + ") != 1; ";
    }
    for (int j = i + 1; j < matrix.d; ++j) {
      if (std::abs(m(i, j) - m(j, i)) > tol) {
        violations += "asymmetric at (" + std::to_string(i + 1) + "," +
                      std::to_string(j + 1) + "); ";
      }
      if (m(i, j) < -1.0 - tol || m(i, j) > 1.0 + tol) {
        violations += "entry (" + std::to_string(i + 1) + "," +
                      std::to_string(j + 1) + ") outside [-1,1]; ";
      }
    }
  }
  if (!violations.empty()) {
    fail(ErrorCode::validation, "invalid correlation matrix: " + violations);
  }
}

std::vector<std::pair<int, int>> upper_triangle_pairs(int d) {
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(d) * (d - 1) / 2);
  for (int j = 2; j <= d; ++j) {
    for (int i = 1; i < j; ++i) {
      pairs.emplace_back(i, j);
    }
  }
  return pairs;
}

VdSystem assemble_vd(int d, int cap) {
  if (d < 2 || d > cap) {
    fail(ErrorCode::dimension, "assemble_vd requires 2 <= d <= " +
                                   std::to_string(cap) + ", got " +
                                   std::to_string(d));
  }
  VdSystem system;
  system.d = d;
  system.row_pairs = upper_triangle_pairs(d);
  system.partitions = enumerate_partitions(d, cap);
  const std::size_t rows = system.row_pairs.size() + 1;
  const std::size_t cols = system.partitions.size();
  system.matrix.assign(rows, std::vector<double>(cols, 0.0));
  for (std::size_t c = 0; c < cols; ++c) {
    const CliquePoint point = clique_point(system.partitions[c]);
    for (std::size_t r = 0; r < system.row_pairs.size(); ++r) {
      const auto [i, j] = system.row_pairs[r];
      system.matrix[r][c] = point.entries(i - 1, j - 1);
    }
    system.matrix[rows - 1][c] = 1.0;
  }
  return system;
}

namespace {

// Shared LP assembly: variables x = [alpha | z], constraints Vd a + z = r~.
template <typename T>
void build_lp(const VdSystem& system, const CorrMatrix& matrix,
              std::vector<T>& cost, std::vector<std::vector<T>>& lhs,
              std::vector<T>& rhs) {
  const std::size_t rows = system.matrix.size();
  const std::size_t ncols = system.partitions.size();
  cost.assign(ncols + rows, T(0));
  for (std::size_t i = 0; i < rows; ++i) cost[ncols + i] = T(1);
  lhs.assign(rows, std::vector<T>(ncols + rows, T(0)));
  rhs.assign(rows, T(0));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < ncols; ++c) {
      lhs[r][c] = T(system.matrix[r][c]);
    }
    lhs[r][ncols + r] = T(1);
  }
  for (std::size_t r = 0; r + 1 < rows; ++r) {
    const auto [i, j] = system.row_pairs[r];
    rhs[r] = T(matrix.entries(i - 1, j - 1));
  }
  rhs[rows - 1] = T(1);
}

std::optional<std::pair<int, int>> first_negative_entry(const CorrMatrix& matrix) {
  for (int i = 0; i < matrix.d; ++i) {
    for (int j = i + 1; j < matrix.d; ++j) {
      if (matrix.entries(i, j) < 0.0) return std::make_pair(i + 1, j + 1);
    }
  }
  return std::nullopt;
}

}  // namespace

MembershipCert membership(const CorrMatrix& matrix, double tol, int cap) {
  validate_corr_matrix(matrix);
  if (tol <= 0.0) {
    fail(ErrorCode::parameter, "membership tolerance must be positive");
  }
  MembershipCert cert;
  if (auto neg = first_negative_entry(matrix)) {
    cert.member = false;
    cert.fast_rejected = true;
    cert.residual = -matrix.entries(neg->first - 1, neg->second - 1);
    cert.reason = "negative entry fast-reject at (" +
                  std::to_string(neg->first) + "," +
                  std::to_string(neg->second) + ")";
    return cert;
  }
  if (matrix.d == 1) {
    cert.member = true;
    cert.weights.emplace_back(make_partition(1, {{1}}), 1.0);
    return cert;
  }
  const VdSystem system = assemble_vd(matrix.d, cap);
  std::vector<double> cost, rhs;
  std::vector<std::vector<double>> lhs;
  build_lp(system, matrix, cost, lhs, rhs);
  const LpResult<double> lp = lp_solve(std::move(cost), std::move(lhs),
                                       std::move(rhs), 1e-11);
  if (lp.status != LpStatus::optimal) {
    fail(ErrorCode::numerical,
         std::string("membership LP did not reach an optimum: ") +
             to_string(lp.status));
  }
  cert.residual = std::max(0.0, lp.objective);
  cert.member = lp.objective <= tol;
  if (cert.member) {
    double total = 0.0;
    for (std::size_t c = 0; c < system.partitions.size(); ++c) {
      if (lp.solution[c] > tol) total += lp.solution[c];
    }
    for (std::size_t c = 0; c < system.partitions.size(); ++c) {
      if (lp.solution[c] > tol) {
        cert.weights.emplace_back(system.partitions[c], lp.solution[c] / total);
      }
    }
    const CorrMatrix rebuilt = reconstruct(cert.weights);
    cert.reconstruction_error =
        (rebuilt.entries - matrix.entries).cwiseAbs().maxCoeff();
  } else {
    cert.reason = "LP residual " + std::to_string(lp.objective) +
                  " above tolerance";
  }
  return cert;
}

ExactMembershipCert membership_exact(const CorrMatrix& matrix, int cap) {
  validate_corr_matrix(matrix);
  if (matrix.d > cap) {
    fail(ErrorCode::dimension, "membership_exact supports d <= " +
                                   std::to_string(cap) + ", got " +
                                   std::to_string(matrix.d));
  }
  ExactMembershipCert cert;
  if (auto neg = first_negative_entry(matrix)) {
    cert.member = false;
    cert.fast_rejected = true;
    cert.residual = mpq_class(-matrix.entries(neg->first - 1, neg->second - 1));
    cert.reason = "negative entry fast-reject at (" +
                  std::to_string(neg->first) + "," +
                  std::to_string(neg->second) + ")";
    return cert;
  }
  const VdSystem system = assemble_vd(matrix.d, cap);
  std::vector<mpq_class> cost, rhs;
  std::vector<std::vector<mpq_class>> lhs;
  build_lp(system, matrix, cost, lhs, rhs);
  const LpResult<mpq_class> lp =
      lp_solve(std::move(cost), std::move(lhs), std::move(rhs), mpq_class(0));
  if (lp.status != LpStatus::optimal) {
    fail(ErrorCode::numerical,
         std::string("exact membership LP did not reach an optimum: ") +
             to_string(lp.status));
  }
  cert.residual = lp.objective;
  cert.member = lp.objective == 0;
  if (cert.member) {
    for (std::size_t c = 0; c < system.partitions.size(); ++c) {
      if (lp.solution[c] > 0) {
        cert.weights.emplace_back(system.partitions[c], lp.solution[c]);
      }
    }
  } else {
    cert.reason = "exact LP residual is positive";
  }
  return cert;
}

CorrMatrix reconstruct(const std::vector<std::pair<SetPartition, double>>& weights,
                       double weight_tol) {
  if (weights.empty()) {
    fail(ErrorCode::weight_sum, "reconstruct requires at least one weight");
  }
  const int d = weights.front().first.d;
  double total = 0.0;
  for (const auto& [partition, alpha] : weights) {
    if (partition.d != d) {
      fail(ErrorCode::dimension, "reconstruct: partitions disagree on d");
    }
    if (alpha < -weight_tol) {
      fail(ErrorCode::weight_sum, "reconstruct: negative weight");
    }
    total += alpha;
  }
  if (std::abs(total - 1.0) > weight_tol) {
    fail(ErrorCode::weight_sum, "reconstruct: weights sum to " +
                                    std::to_string(total) + ", expected 1");
  }
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(d, d);
  for (const auto& [partition, alpha] : weights) {
    sum += alpha * clique_point(partition).entries;
  }
  return make_corr_matrix(std::move(sum), 1e-9);
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::numerical_error: return "numerical_error";
  }
  return "unknown";
}

}  // namespace invcorr
