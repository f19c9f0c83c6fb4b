#include "flatcert/controllability.hpp"

#include "flatcert/errors.hpp"

namespace flatcert {

Linearization linearize(const ImplicitSystem& sys, const EquilibriumPoint& eq, double tol) {
    if (eq.residual_norm > 1e-8)
        throw MismatchedEquilibrium("linearize: equilibrium residual too large");
    Linearization lin;
    lin.eq = eq;
    auto [fx, fu] = sys.f_jacobian_blocks(eq.x0, eq.u0);
    lin.A = fx;
    lin.B = fu;
    VectorXd p0 = sys.eval_f(eq.x0, eq.u0);
    auto [Fx, Fp] = sys.F_jacobian_blocks(eq.x0, p0);
    lin.identity_residual = (Fx + Fp * lin.A).norm();
    MatrixXd kernel = Eigen::FullPivLU<MatrixXd>(Fp).kernel();
    auto [fwd_ok, fwd] = subspace_contains(kernel, lin.B);
    auto [bwd_ok, bwd] = subspace_contains(lin.B, kernel);
    lin.kernel_image_residual = std::max(fwd, bwd);
    if (lin.identity_residual > tol)
        throw InvariantViolation("linearize: dF/dx + dF/dp A != 0 (inconsistent F/f pair)");
    if (lin.kernel_image_residual > tol)
        throw InvariantViolation("linearize: Im df/du != Ker dF/dp");
    return lin;
}

MatrixXd controllability_matrix(const Linearization& lin) {
    const int n = static_cast<int>(lin.A.rows());
    const int m = static_cast<int>(lin.B.cols());
    MatrixXd K(n, n * m);
    MatrixXd block = lin.B;
    for (int i = 0; i < n; ++i) {
        K.middleCols(i * m, m) = block;
        block = lin.A * block;
    }
    return K;
}

RankResult kalman_rank(const Linearization& lin, double tol_rel) {
    return svd_rank(controllability_matrix(lin), tol_rel);
}

namespace {

struct IdentityContext {
    MatrixXd Fx, Fp;                  // (n-m) x n blocks of dF at Phi(jet)
    std::vector<MatrixXd> phi_cols;   // dphi/dy_i, n x m, i = 0..r
    std::vector<MatrixXd> lie_cols;   // L_tau dphi/dy_i, n x m (zero at equilibria)
};

IdentityContext identity_context(const ImplicitSystem& sys, const ParameterFunction& pf,
                                 const JetPoint& jet, bool with_lie) {
    IdentityContext ctx;
    auto [x, p] = phi_big(pf, jet);
    std::tie(ctx.Fx, ctx.Fp) = sys.F_jacobian_blocks(x, p);
    MatrixXd J = eval_jacobian(pf.phi, jet.flatten(pf.r));
    MatrixXd L = with_lie ? lie_of_jacobian(pf.phi, pf.m, pf.r, jet)
                          : MatrixXd::Zero(pf.n, pf.m * (pf.r + 1));
    for (int i = 0; i <= pf.r; ++i) {
        ctx.phi_cols.push_back(J.middleCols(i * pf.m, pf.m));
        ctx.lie_cols.push_back(L.middleCols(i * pf.m, pf.m));
    }
    return ctx;
}

StructureIdentityReport identity_residuals(const ImplicitSystem& sys,
                                           const ParameterFunction& pf, const JetPoint& jet,
                                           bool with_lie, double tol) {
    IdentityContext ctx = identity_context(sys, pf, jet, with_lie);
    StructureIdentityReport rep;
    rep.tol = tol;
    // y_0 identity.
    double res = (ctx.Fx * ctx.phi_cols[0] + ctx.Fp * ctx.lie_cols[0]).norm();
    rep.max_residual = res;
    // y_i identities, 1 <= i <= r.
    for (int i = 1; i <= pf.r; ++i) {
        res = (ctx.Fx * ctx.phi_cols[static_cast<std::size_t>(i)] +
               ctx.Fp * ctx.lie_cols[static_cast<std::size_t>(i)] +
               ctx.Fp * ctx.phi_cols[static_cast<std::size_t>(i - 1)])
                  .norm();
        rep.max_residual = std::max(rep.max_residual, res);
    }
    // y_{r+1} identity.
    res = (ctx.Fp * ctx.phi_cols[static_cast<std::size_t>(pf.r)]).norm();
    rep.max_residual = std::max(rep.max_residual, res);
    rep.pass = rep.max_residual <= tol;
    return rep;
}

}  // namespace

StructureIdentityReport check_structure_identities(const ImplicitSystem& sys,
                                                   const ParameterFunction& pf,
                                                   const JetPoint& jet, double tol) {
    return identity_residuals(sys, pf, jet, /*with_lie=*/true, tol);
}

StructureIdentityReport check_equilibrium_identities(const ImplicitSystem& sys,
                                                     const ParameterFunction& pf,
                                                     const VectorXd& y0, double tol) {
    JetPoint jet;
    jet.levels.push_back(y0);
    for (int i = 1; i <= pf.r + 1; ++i) jet.levels.push_back(VectorXd::Zero(pf.m));
    return identity_residuals(sys, pf, jet, /*with_lie=*/false, tol);
}

ChainReport check_chain_inclusions(const ImplicitSystem& sys, const ParameterFunction& pf,
                                   const EquilibriumPoint& eq, const VectorXd& y0, double tol) {
    JetPoint jet;
    jet.levels.push_back(y0);
    for (int i = 1; i <= pf.r + 1; ++i) jet.levels.push_back(VectorXd::Zero(pf.m));
    VectorXd x = eval_map(pf.phi, jet.flatten(pf.r));
    if ((x - eq.x0).norm() > tol)
        throw MismatchedEquilibrium("check_chain_inclusions: phi(y0,0..0) does not match x0");

    Linearization lin = linearize(sys, eq);
    ChainReport rep;
    rep.n = sys.n;

    MatrixXd J = eval_jacobian(pf.phi, jet.flatten(pf.r));
    const int n = sys.n;
    const int m = sys.m;

    bool inclusions_ok = true;
    for (int i = pf.r; i >= 0; --i) {
        // Krylov span {B, AB, .., A^{r-i}B}, truncated at A^{n-1}B.
        int depth = std::min(pf.r - i, n - 1);
        MatrixXd K(n, (depth + 1) * m);
        MatrixXd block = lin.B;
        for (int d = 0; d <= depth; ++d) {
            K.middleCols(d * m, m) = block;
            block = lin.A * block;
        }
        auto [ok, residual] = subspace_contains(K, J.middleCols(i * m, m), tol);
        rep.inclusion_residuals.push_back(residual);
        inclusions_ok = inclusions_ok && ok;
    }

    rep.stacked_rank = svd_rank(J).rank;
    rep.kalman = kalman_rank(lin).rank;
    rep.pass = inclusions_ok && rep.stacked_rank == n;
    return rep;
}

}  // namespace flatcert
