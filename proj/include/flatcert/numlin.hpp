#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "flatcert/smooth_map.hpp"

namespace flatcert {

struct RankResult {
    int rank = 0;
    VectorXd singular_values;  // descending
    double threshold = 0.0;    // tol_rel * sigma_max
};

struct SolveResult {
    VectorXd solution;
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

inline constexpr double kDefaultRankTol = 1e-8;

// Numerical rank with a relative threshold tol_rel * sigma_max. A singular
// value exactly equal to the threshold counts as above it.
RankResult svd_rank(const MatrixXd& M, double tol_rel = kDefaultRankTol);

// Orthonormal basis of the column space of M at numerical rank.
MatrixXd orthonormal_basis(const MatrixXd& M, double tol_rel = kDefaultRankTol);

// Tests Im M subset span K: residual = ||(I - QQ^T)M||_F / max(1, ||M||_F).
std::pair<bool, double> subspace_contains(const MatrixXd& K, const MatrixXd& M,
                                          double tol = 1e-8);

// Minimum-norm least-squares solve via SVD with a relative threshold.
VectorXd pinv_solve(const MatrixXd& A, const VectorXd& b, double tol_rel = kDefaultRankTol);

struct GaussNewtonOpts {
    int max_iter = 50;
    double tol = 1e-10;
    int max_damping_halvings = 25;
};

SolveResult gauss_newton_solve(const SmoothMap& map, const VectorXd& target,
                               const VectorXd& init, const GaussNewtonOpts& opts = {});

// Same iteration for a residual/Jacobian given as callables (used where the
// map is not a single parsed expression, e.g. inverting Phi).
SolveResult gauss_newton_solve_fn(const std::function<VectorXd(const VectorXd&)>& fn,
                                  const std::function<MatrixXd(const VectorXd&)>& jac,
                                  const VectorXd& target, const VectorXd& init,
                                  const GaussNewtonOpts& opts = {});

// Dense square solve; throws SingularMatrixError when A is rank-deficient.
VectorXd solve_linear(const MatrixXd& A, const VectorXd& b);

}  // namespace flatcert
