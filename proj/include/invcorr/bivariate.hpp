#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "invcorr/error.hpp"

namespace invcorr {

inline constexpr double kStructTol = 1e-12;

// Finite bivariate law on ordered real atoms. P(i, j) = P(X = x_i, Y = y_j);
// marginals p (rows) and q (columns) are derived and strictly positive.
struct JointPMF {
  std::vector<double> x_atoms;
  std::vector<double> y_atoms;
  Eigen::MatrixXd P;
  Eigen::VectorXd p;
  Eigen::VectorXd q;
  bool identical_marginals = false;
};

JointPMF make_joint_pmf(std::vector<double> x_atoms, std::vector<double> y_atoms,
                        Eigen::MatrixXd P, double tol = kStructTol);

// Both supports embedded on the sorted union of atoms, rows/columns of P
// zero-padded where an atom is missing from one side.
struct UnionEmbedding {
  std::vector<double> atoms;
  Eigen::MatrixXd P;
  Eigen::VectorXd p;
  Eigen::VectorXd q;
};

UnionEmbedding embed_on_union_grid(const JointPMF& pmf);

// Pearson correlation of (X, Y).
double correlation(const JointPMF& pmf);

// Pearson correlation of (g(X), g(Y)) computed exactly from P. Throws an
// admissibility error if g is constant on either support.
double transform_correlation(const JointPMF& pmf,
                             const std::function<double(double)>& g);

// Same, with g given by its values on the union grid of atoms.
double transform_correlation_values(const JointPMF& pmf,
                                    std::span<const double> g_on_union);

// P + P' == p q' + q p' on the union grid, entrywise within tol.
bool is_quasi_independent(const JointPMF& pmf, double tol = kStructTol);

// Least-squares r for (P + P')/2 == r D + (1 - r) p p'; requires identical
// marginals. Present iff the Frobenius residual is within tol and r is inside
// the admissible range for p.
std::optional<double> quasi_frechet_fit(const JointPMF& pmf,
                                        double tol = kStructTol);

struct RBounds {
  double lower = 0.0;
  double upper = 1.0;
};

// Admissible invariant-correlation range for an n-atomic marginal p:
// lower = max( max_j -p_j/(1-p_j), max_{i != j} 1 - 1/(p_i p_j) ).
RBounds r_bounds(std::span<const double> p);

// P = p q' + S on a common atom grid, with S antisymmetric and zero row and
// column sums. Entries of p or q may be zero (padded grid); zero-mass atoms
// are dropped from the returned support.
JointPMF make_quasi_independent(std::span<const double> p,
                                std::span<const double> q,
                                const Eigen::MatrixXd& S,
                                std::span<const double> atoms = {},
                                double tol = kStructTol);

// P = r D + (1 - r) p p' + S with identical marginals p on a common grid.
JointPMF make_quasi_frechet(std::span<const double> p, double r,
                            const Eigen::MatrixXd& S,
                            std::span<const double> atoms = {},
                            double tol = kStructTol);

// Law of the equal mixture of (X, Y) and (Y, X): probability matrix
// (P + P')/2 on the union grid.
JointPMF random_rearrangement(const JointPMF& pmf);

}  // namespace invcorr
