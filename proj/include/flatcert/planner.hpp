#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flatcert/jetflat.hpp"
#include "flatcert/system.hpp"

namespace flatcert {

// One polynomial per flat channel over t in [0, T].
struct PolyPath {
    int m = 0;
    int r = 0;
    double T = 0.0;
    // coeffs[j](i) is the t^i coefficient of channel j.
    std::vector<VectorXd> coeffs;
};

struct TrajectoryNode {
    double t = 0.0;
    JetPoint jet;        // flat jet, orders 0..r+1
    VectorXd x;          // phi(jet)
    VectorXd xdot;       // L_tau phi(jet)
    VectorXd u;          // recovered input (filled by recover_inputs)
    double residual = 0.0;  // ||F(x, xdot)||
    bool domain_error = false;
    bool input_converged = true;
    double input_residual = 0.0;
};

struct Trajectory {
    std::vector<TrajectoryNode> nodes;
    double max_residual = 0.0;
    int domain_errors = 0;
};

struct OutOfHorizon : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientGrid : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Interpolates derivative orders 0..r+1 at t=0 and t=T per channel; square
// solve when d = 2r+3, minimum-norm otherwise.
PolyPath fit_flat_path(const std::vector<VectorXd>& start_jet,
                       const std::vector<VectorXd>& end_jet, double T, int degree);

// Exact polynomial derivatives, orders 0..r+1, by Horner evaluation of the
// derivative coefficient arrays.
JetPoint eval_flat_jet(const PolyPath& path, double t);

Trajectory synthesize_trajectory(const ImplicitSystem& sys, const ParameterFunction& pf,
                                 const PolyPath& path, int grid_n);

// Per-node Gauss-Newton solve of f(x, u) = xdot for u, warm-started from
// the previous node.
void recover_inputs(const ImplicitSystem& sys, Trajectory& traj, double tol = 1e-9);

struct RoundtripReport {
    int interior_nodes = 0;
    double max_error = 0.0;
    double tol = 1e-4;
    bool pass = false;
};

// Checks psi(x, xdot, .., x^(s)) == y along the trajectory; x-jets of order
// >= 1 come from central finite differences on the grid.
RoundtripReport roundtrip_check(const SmoothMap& psi, int psi_order, const Trajectory& traj,
                                const PolyPath& path, double tol = 1e-4);

}  // namespace flatcert
