#pragma once

#include <optional>
#include <vector>

#include "flatcert/numlin.hpp"
#include "flatcert/smooth_map.hpp"

namespace flatcert {

// Implicit control system F(x, xdot) = 0 with an explicit parameterization
// xdot = f(x, u). F maps (x1..xn, p1..pn) to R^{n-m}; f maps (x1..xn,
// u1..um) to R^n.
struct ImplicitSystem {
    int n = 0;
    int m = 0;
    SmoothMap F;
    std::optional<SmoothMap> f;

    ImplicitSystem() = default;
    ImplicitSystem(int n_, int m_, SmoothMap F_, std::optional<SmoothMap> f_);

    VectorXd eval_F(const VectorXd& x, const VectorXd& p) const;
    VectorXd eval_f(const VectorXd& x, const VectorXd& u) const;

    // Jacobian blocks of F at (x, p): dF/dx is (n-m) x n, dF/dp is (n-m) x n.
    std::pair<MatrixXd, MatrixXd> F_jacobian_blocks(const VectorXd& x, const VectorXd& p) const;
    // Jacobian blocks of f at (x, u): df/dx is n x n, df/du is n x m.
    std::pair<MatrixXd, MatrixXd> f_jacobian_blocks(const VectorXd& x, const VectorXd& u) const;
};

struct EquilibriumPoint {
    VectorXd x0;
    VectorXd u0;
    double residual_norm = 0.0;
};

struct VarietyTriple {
    VectorXd x;
    VectorXd p;
    VectorXd u;
};

using VarietySample = std::vector<VarietyTriple>;

struct ConsistencyReport {
    int samples = 0;
    double max_F_residual = 0.0;
    double max_kernel_image_residual = 0.0;
    bool rank_dFdp_ok = true;   // rank dF/dp == n-m at every sample
    bool rank_dfdu_ok = true;   // rank df/du == m at every sample
    bool pass = false;
    int first_failed_sample = -1;
    std::string failed_check;
};

// Checks, at seeded Gaussian (x, u) samples: ||F(x, f(x,u))|| <= tol,
// rank dF/dp = n-m, and Im df/du = Ker dF/dp (containment both ways plus
// rank df/du = m).
ConsistencyReport check_consistency(const ImplicitSystem& sys, int n_samples,
                                    std::uint64_t seed, double tol = 1e-9);

// Gauss-Newton solve of f(x, u) = 0 over the joint (x, u) vector.
EquilibriumPoint find_equilibrium(const ImplicitSystem& sys, const VectorXd& x_guess,
                                  const VectorXd& u_guess);

VarietySample sample_variety(const ImplicitSystem& sys, int n_samples, std::uint64_t seed,
                             double scale = 1.0);

}  // namespace flatcert
