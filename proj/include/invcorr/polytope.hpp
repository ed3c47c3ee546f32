#pragma once

#include <gmpxx.h>

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "invcorr/partitions.hpp"
#include "invcorr/simplex.hpp"

namespace invcorr {

inline constexpr double kCorrMatrixTol = 1e-12;
inline constexpr double kMembershipTol = 1e-9;

// d x d candidate correlation matrix: symmetric within 1e-12, unit diagonal,
// off-diagonal entries in [-1, 1].
struct CorrMatrix {
  int d = 0;
  Eigen::MatrixXd entries;
};

CorrMatrix make_corr_matrix(Eigen::MatrixXd entries, double tol = kCorrMatrixTol);

void validate_corr_matrix(const CorrMatrix& matrix, double tol = kCorrMatrixTol);

// Upper-triangle pair order (1,2),(1,3),(2,3),...,(d-1,d); this is the row
// order of the constraint system and of vectorized matrices everywhere.
std::vector<std::pair<int, int>> upper_triangle_pairs(int d);

// Constraint matrix with one column per partition (enumeration order) holding
// the vectorized upper triangle of its clique point plus a final all-ones row.
struct VdSystem {
  int d = 0;
  std::vector<std::pair<int, int>> row_pairs;       // 1-based pairs, minus the ones row
  std::vector<SetPartition> partitions;             // column index -> partition
  std::vector<std::vector<double>> matrix;          // (1 + d(d-1)/2) x Bell(d)
};

VdSystem assemble_vd(int d, int cap = kPartitionCap);

struct MembershipCert {
  bool member = false;
  double residual = 0.0;
  std::vector<std::pair<SetPartition, double>> weights;  // only alphas > tol, renormalized
  double reconstruction_error = 0.0;
  bool fast_rejected = false;
  std::string reason;
};

// Decides R in Conv({clique points}) by linear programming. Matrices with a
// negative off-diagonal entry are rejected without a solve.
MembershipCert membership(const CorrMatrix& matrix, double tol = kMembershipTol,
                          int cap = kPartitionCap);

// Exact-rational variant: inputs converted to rationals (exact for doubles),
// simplex run over mpq, so non-membership carries no floating tolerance.
struct ExactMembershipCert {
  bool member = false;
  mpq_class residual;
  std::vector<std::pair<SetPartition, mpq_class>> weights;
  bool fast_rejected = false;
  std::string reason;
};

inline constexpr int kExactMembershipCap = 5;

ExactMembershipCert membership_exact(const CorrMatrix& matrix,
                                     int cap = kExactMembershipCap);

// Convex combination of clique points.
CorrMatrix reconstruct(const std::vector<std::pair<SetPartition, double>>& weights,
                       double weight_tol = 1e-12);

}  // namespace invcorr
