#include "flatcert/system.hpp"

#include "flatcert/errors.hpp"
#include "flatcert/rng.hpp"

namespace flatcert {

ImplicitSystem::ImplicitSystem(int n_, int m_, SmoothMap F_, std::optional<SmoothMap> f_)
    : n(n_), m(m_), F(std::move(F_)), f(std::move(f_)) {
    if (m <= 0 || n <= m) throw DimensionError("ImplicitSystem requires 0 < m < n");
    if (F.input_dim() != 2 * n || F.output_dim() != n - m)
        throw DimensionError("F must map R^n x R^n to R^{n-m}");
    if (f && (f->input_dim() != n + m || f->output_dim() != n))
        throw DimensionError("f must map R^n x R^m to R^n");
}

namespace {

VectorXd concat(const VectorXd& a, const VectorXd& b) {
    VectorXd out(a.size() + b.size());
    out << a, b;
    return out;
}

const SmoothMap& require_f(const ImplicitSystem& sys) {
    if (!sys.f) throw DimensionError("operation requires the explicit parameterization f");
    return *sys.f;
}

}  // namespace

VectorXd ImplicitSystem::eval_F(const VectorXd& x, const VectorXd& p) const {
    return eval_map(F, concat(x, p));
}

VectorXd ImplicitSystem::eval_f(const VectorXd& x, const VectorXd& u) const {
    return eval_map(require_f(*this), concat(x, u));
}

std::pair<MatrixXd, MatrixXd> ImplicitSystem::F_jacobian_blocks(const VectorXd& x,
                                                                const VectorXd& p) const {
    MatrixXd J = eval_jacobian(F, concat(x, p));
    return {J.leftCols(n), J.rightCols(n)};
}

std::pair<MatrixXd, MatrixXd> ImplicitSystem::f_jacobian_blocks(const VectorXd& x,
                                                                const VectorXd& u) const {
    MatrixXd J = eval_jacobian(require_f(*this), concat(x, u));
    return {J.leftCols(n), J.rightCols(m)};
}

ConsistencyReport check_consistency(const ImplicitSystem& sys, int n_samples,
                                    std::uint64_t seed, double tol) {
    require_f(sys);
    GaussianRng rng(seed);
    ConsistencyReport rep;
    rep.samples = n_samples;
    for (int s = 0; s < n_samples; ++s) {
        VectorXd x = rng.gaussian_vector(sys.n);
        VectorXd u = rng.gaussian_vector(sys.m);
        VectorXd p = sys.eval_f(x, u);

        double fres = sys.eval_F(x, p).norm();
        rep.max_F_residual = std::max(rep.max_F_residual, fres);
        if (fres > tol && rep.first_failed_sample < 0) {
            rep.first_failed_sample = s;
            rep.failed_check = "F(x, f(x,u)) residual";
        }

        auto [Fx, Fp] = sys.F_jacobian_blocks(x, p);
        if (svd_rank(Fp).rank != sys.n - sys.m) {
            rep.rank_dFdp_ok = false;
            if (rep.first_failed_sample < 0) {
                rep.first_failed_sample = s;
                rep.failed_check = "rank dF/dp";
            }
        }

        auto [fx, fu] = sys.f_jacobian_blocks(x, u);
        if (svd_rank(fu).rank != sys.m) {
            rep.rank_dfdu_ok = false;
            if (rep.first_failed_sample < 0) {
                rep.first_failed_sample = s;
                rep.failed_check = "rank df/du";
            }
        }

        // Im df/du = Ker dF/dp, tested as containment both ways.
        MatrixXd kernel = Eigen::FullPivLU<MatrixXd>(Fp).kernel();
        auto [fwd_ok, fwd_res] = subspace_contains(kernel, fu);
        auto [bwd_ok, bwd_res] = subspace_contains(fu, kernel);
        double worst = std::max(fwd_res, bwd_res);
        rep.max_kernel_image_residual = std::max(rep.max_kernel_image_residual, worst);
        if ((!fwd_ok || !bwd_ok) && rep.first_failed_sample < 0) {
            rep.first_failed_sample = s;
            rep.failed_check = "Im df/du = Ker dF/dp";
        }
    }
    rep.pass = rep.first_failed_sample < 0;
    return rep;
}

EquilibriumPoint find_equilibrium(const ImplicitSystem& sys, const VectorXd& x_guess,
                                  const VectorXd& u_guess) {
    const SmoothMap& f = require_f(sys);
    VectorXd init(sys.n + sys.m);
    init << x_guess, u_guess;
    GaussNewtonOpts opts;
    SolveResult sol = gauss_newton_solve(f, VectorXd::Zero(sys.n), init, opts);
    EquilibriumPoint eq;
    eq.x0 = sol.solution.head(sys.n);
    eq.u0 = sol.solution.tail(sys.m);
    eq.residual_norm = sol.residual_norm;
    return eq;
}

VarietySample sample_variety(const ImplicitSystem& sys, int n_samples, std::uint64_t seed,
                             double scale) {
    require_f(sys);
    GaussianRng rng(seed);
    VarietySample out;
    out.reserve(static_cast<std::size_t>(n_samples));
    for (int s = 0; s < n_samples; ++s) {
        VarietyTriple t;
        t.x = rng.gaussian_vector(sys.n, scale);
        t.u = rng.gaussian_vector(sys.m, scale);
        t.p = sys.eval_f(t.x, t.u);
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace flatcert
