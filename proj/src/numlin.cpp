#include "flatcert/numlin.hpp"

#include "flatcert/errors.hpp"

namespace flatcert {

namespace {

void require_finite(const MatrixXd& M, const char* who) {
    if (!M.allFinite()) throw NonFiniteError(std::string(who) + ": non-finite input");
}

}  // namespace

RankResult svd_rank(const MatrixXd& M, double tol_rel) {
    require_finite(M, "svd_rank");
    if (!(tol_rel > 0.0 && tol_rel < 1.0))
        throw DimensionError("svd_rank: tol_rel must be in (0, 1)");
    RankResult res;
    if (M.size() == 0) {
        res.singular_values = VectorXd(0);
        return res;
    }
    Eigen::JacobiSVD<MatrixXd> svd(M);
    res.singular_values = svd.singularValues();
    double sigma_max = res.singular_values.size() > 0 ? res.singular_values(0) : 0.0;
    res.threshold = tol_rel * sigma_max;
    if (sigma_max == 0.0) {
        res.rank = 0;
        return res;
    }
    for (int i = 0; i < res.singular_values.size(); ++i)
        if (res.singular_values(i) >= res.threshold) res.rank = i + 1;
    return res;
}

MatrixXd orthonormal_basis(const MatrixXd& M, double tol_rel) {
    require_finite(M, "orthonormal_basis");
    if (M.size() == 0) return MatrixXd(M.rows(), 0);
    Eigen::JacobiSVD<MatrixXd> svd(M, Eigen::ComputeThinU);
    const VectorXd& sv = svd.singularValues();
    double sigma_max = sv.size() > 0 ? sv(0) : 0.0;
    double threshold = tol_rel * sigma_max;
    int rank = 0;
    if (sigma_max > 0.0)
        for (int i = 0; i < sv.size(); ++i)
            if (sv(i) >= threshold) rank = i + 1;
    return svd.matrixU().leftCols(rank);
}

std::pair<bool, double> subspace_contains(const MatrixXd& K, const MatrixXd& M, double tol) {
    if (K.rows() != M.rows())
        throw DimensionError("subspace_contains: row count mismatch");
    require_finite(K, "subspace_contains");
    require_finite(M, "subspace_contains");
    MatrixXd Q = orthonormal_basis(K);
    MatrixXd R = M - Q * (Q.transpose() * M);
    double residual = R.norm() / std::max(1.0, M.norm());
    return {residual <= tol, residual};
}

VectorXd pinv_solve(const MatrixXd& A, const VectorXd& b, double tol_rel) {
    Eigen::JacobiSVD<MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VectorXd& sv = svd.singularValues();
    double sigma_max = sv.size() > 0 ? sv(0) : 0.0;
    double threshold = tol_rel * sigma_max;
    VectorXd c = svd.matrixU().transpose() * b;
    for (int i = 0; i < sv.size(); ++i)
        c(i) = (sigma_max > 0.0 && sv(i) >= threshold) ? c(i) / sv(i) : 0.0;
    return svd.matrixV() * c;
}

SolveResult gauss_newton_solve_fn(const std::function<VectorXd(const VectorXd&)>& fn,
                                  const std::function<MatrixXd(const VectorXd&)>& jac,
                                  const VectorXd& target, const VectorXd& init,
                                  const GaussNewtonOpts& opts) {
    SolveResult res;
    VectorXd x = init;
    VectorXd r = target - fn(x);
    double rnorm = r.norm();
    for (int iter = 0; iter < opts.max_iter; ++iter) {
        if (rnorm <= opts.tol) break;
        MatrixXd J = jac(x);
        VectorXd step = pinv_solve(J, r);
        double lambda = 1.0;
        bool accepted = false;
        for (int k = 0; k <= opts.max_damping_halvings; ++k) {
            VectorXd x_try = x + lambda * step;
            VectorXd r_try;
            try {
                r_try = target - fn(x_try);
            } catch (const DomainError&) {
                lambda *= 0.5;
                continue;
            }
            double rnorm_try = r_try.norm();
            if (rnorm_try < rnorm || rnorm_try <= opts.tol) {
                x = x_try;
                r = std::move(r_try);
                rnorm = rnorm_try;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        res.iterations = iter + 1;
        if (!accepted) break;
    }
    res.solution = x;
    res.residual_norm = rnorm;
    res.converged = rnorm <= opts.tol;
    return res;
}

SolveResult gauss_newton_solve(const SmoothMap& map, const VectorXd& target,
                               const VectorXd& init, const GaussNewtonOpts& opts) {
    return gauss_newton_solve_fn(
        [&map](const VectorXd& x) { return eval_map(map, x); },
        [&map](const VectorXd& x) { return eval_jacobian(map, x); }, target, init, opts);
}

VectorXd solve_linear(const MatrixXd& A, const VectorXd& b) {
    if (A.rows() != A.cols()) throw DimensionError("solve_linear: matrix not square");
    if (A.rows() != b.size()) throw DimensionError("solve_linear: size mismatch");
    require_finite(A, "solve_linear");
    Eigen::FullPivLU<MatrixXd> lu(A);
    if (!lu.isInvertible()) throw SingularMatrixError("solve_linear: singular matrix");
    return lu.solve(b);
}

}  // namespace flatcert
