#include "flatcert/planner.hpp"

#include "flatcert/errors.hpp"
#include "flatcert/numlin.hpp"

namespace flatcert {

namespace {

// Row of derivative order `order` of (1, t, t^2, .., t^d).
VectorXd derivative_row(int order, double t, int degree) {
    VectorXd row = VectorXd::Zero(degree + 1);
    for (int i = order; i <= degree; ++i) {
        double c = 1.0;
        for (int k = 0; k < order; ++k) c *= static_cast<double>(i - k);
        row(i) = c * std::pow(t, i - order);
    }
    return row;
}

}  // namespace

PolyPath fit_flat_path(const std::vector<VectorXd>& start_jet,
                       const std::vector<VectorXd>& end_jet, double T, int degree) {
    if (start_jet.empty() || start_jet.size() != end_jet.size())
        throw DimensionError("fit_flat_path: boundary jets must have equal level counts");
    const int levels = static_cast<int>(start_jet.size());  // r + 2
    const int r = levels - 2;
    if (r < 0) throw DimensionError("fit_flat_path: jets need at least 2 levels");
    const int m = static_cast<int>(start_jet[0].size());
    if (!(T > 0)) throw SingularMatrixError("fit_flat_path: horizon must be positive");
    if (degree < 2 * r + 3)
        throw DimensionError("fit_flat_path: degree must be at least 2r+3");

    const int rows = 2 * levels;
    MatrixXd A(rows, degree + 1);
    for (int order = 0; order < levels; ++order) {
        A.row(order) = derivative_row(order, 0.0, degree);
        A.row(levels + order) = derivative_row(order, T, degree);
    }

    PolyPath path;
    path.m = m;
    path.r = r;
    path.T = T;
    for (int j = 0; j < m; ++j) {
        VectorXd b(rows);
        for (int order = 0; order < levels; ++order) {
            b(order) = start_jet[static_cast<std::size_t>(order)](j);
            b(levels + order) = end_jet[static_cast<std::size_t>(order)](j);
        }
        VectorXd c = (rows == degree + 1) ? solve_linear(A, b) : pinv_solve(A, b, 1e-12);
        double check = (A * c - b).lpNorm<Eigen::Infinity>();
        if (check > 1e-9)
            throw SingularMatrixError("fit_flat_path: boundary interpolation residual " +
                                      std::to_string(check));
        path.coeffs.push_back(std::move(c));
    }
    return path;
}

JetPoint eval_flat_jet(const PolyPath& path, double t) {
    if (t < 0.0 || t > path.T) throw OutOfHorizon("eval_flat_jet: t outside [0, T]");
    JetPoint jet;
    for (int order = 0; order <= path.r + 1; ++order) jet.levels.emplace_back(path.m);
    for (int j = 0; j < path.m; ++j) {
        VectorXd c = path.coeffs[static_cast<std::size_t>(j)];
        for (int order = 0; order <= path.r + 1; ++order) {
            // Horner on the current coefficient array.
            double v = 0.0;
            for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) v = v * t + c(i);
            jet.levels[static_cast<std::size_t>(order)](j) = v;
            // Differentiate coefficients for the next order.
            if (c.size() <= 1) {
                c = VectorXd::Zero(1);
            } else {
                VectorXd d(c.size() - 1);
                for (int i = 1; i < c.size(); ++i) d(i - 1) = c(i) * i;
                c = d;
            }
        }
    }
    return jet;
}

Trajectory synthesize_trajectory(const ImplicitSystem& sys, const ParameterFunction& pf,
                                 const PolyPath& path, int grid_n) {
    if (grid_n < 1) throw DimensionError("synthesize_trajectory: grid_n must be >= 1");
    Trajectory traj;
    traj.nodes.reserve(static_cast<std::size_t>(grid_n + 1));
    for (int k = 0; k <= grid_n; ++k) {
        TrajectoryNode node;
        node.t = path.T * static_cast<double>(k) / grid_n;
        node.jet = eval_flat_jet(path, node.t);
        try {
            node.x = eval_map(pf.phi, node.jet.flatten(pf.r));
            node.xdot = total_derivative(pf, node.jet);
            node.residual = sys.eval_F(node.x, node.xdot).norm();
            traj.max_residual = std::max(traj.max_residual, node.residual);
        } catch (const DomainError&) {
            node.domain_error = true;
            ++traj.domain_errors;
        }
        traj.nodes.push_back(std::move(node));
    }
    return traj;
}

void recover_inputs(const ImplicitSystem& sys, Trajectory& traj, double tol) {
    if (!sys.f) throw DimensionError("recover_inputs requires the explicit parameterization f");
    VectorXd warm = VectorXd::Zero(sys.m);
    GaussNewtonOpts opts;
    opts.tol = tol;
    for (auto& node : traj.nodes) {
        if (node.domain_error) {
            node.input_converged = false;
            continue;
        }
        auto value = [&](const VectorXd& u) { return sys.eval_f(node.x, u); };
        auto jac = [&](const VectorXd& u) {
            return MatrixXd(sys.f_jacobian_blocks(node.x, u).second);
        };
        SolveResult sol = gauss_newton_solve_fn(value, jac, node.xdot, warm, opts);
        node.u = sol.solution;
        node.input_residual = sol.residual_norm;
        node.input_converged = sol.converged;
        if (sol.converged) warm = sol.solution;
    }
}

RoundtripReport roundtrip_check(const SmoothMap& psi, int psi_order, const Trajectory& traj,
                                const PolyPath& path, double tol) {
    RoundtripReport rep;
    rep.tol = tol;
    const int N = static_cast<int>(traj.nodes.size()) - 1;
    if (N < 50 * std::max(psi_order, 1) && psi_order > 0)
        throw InsufficientGrid("roundtrip_check: grid too coarse for FD order " +
                               std::to_string(psi_order));
    if (N < 1) throw InsufficientGrid("roundtrip_check: empty trajectory");
    const double dt = path.T / N;
    const int n = static_cast<int>(traj.nodes.front().x.size());

    // x-jets by repeated central differences; interior shrinks by psi_order
    // nodes on each side.
    std::vector<std::vector<VectorXd>> xjets(traj.nodes.size());
    for (std::size_t k = 0; k < traj.nodes.size(); ++k) xjets[k].push_back(traj.nodes[k].x);
    for (int order = 1; order <= psi_order; ++order) {
        for (std::size_t k = 0; k < traj.nodes.size(); ++k) {
            if (k < static_cast<std::size_t>(order) ||
                k + static_cast<std::size_t>(order) >= traj.nodes.size())
                continue;
            VectorXd d = (xjets[k + 1][static_cast<std::size_t>(order - 1)] -
                          xjets[k - 1][static_cast<std::size_t>(order - 1)]) /
                         (2.0 * dt);
            xjets[k].push_back(d);
        }
    }

    for (std::size_t k = static_cast<std::size_t>(psi_order);
         k + static_cast<std::size_t>(psi_order) < traj.nodes.size(); ++k) {
        if (traj.nodes[k].domain_error) continue;
        VectorXd input(n * (psi_order + 1));
        for (int order = 0; order <= psi_order; ++order)
            input.segment(order * n, n) = xjets[k][static_cast<std::size_t>(order)];
        VectorXd y_pred = eval_map(psi, input);
        VectorXd y_true = traj.nodes[k].jet.levels[0];
        rep.max_error = std::max(rep.max_error, (y_pred - y_true).lpNorm<Eigen::Infinity>());
        ++rep.interior_nodes;
    }
    rep.pass = rep.interior_nodes > 0 && rep.max_error <= tol;
    return rep;
}

}  // namespace flatcert
