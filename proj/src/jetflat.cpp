#include "flatcert/jetflat.hpp"

#include <algorithm>
#include <limits>

#include "flatcert/errors.hpp"
#include "flatcert/rng.hpp"

namespace flatcert {

ParameterFunction::ParameterFunction(int m_, int n_, int r_, SmoothMap phi_)
    : m(m_), n(n_), r(r_), phi(std::move(phi_)) {
    if (m <= 0 || n <= 0 || r < 0) throw DimensionError("ParameterFunction: bad dimensions");
    if (phi.input_dim() != m * (r + 1))
        throw DimensionError("phi must depend on y0..yr, i.e. m*(r+1) variables");
    if (phi.output_dim() != n) throw DimensionError("phi must have n components");
}

VectorXd JetPoint::flatten(int upto) const {
    if (upto >= order_count()) throw DimensionError("JetPoint::flatten: level out of range");
    Eigen::Index m = levels.empty() ? 0 : levels[0].size();
    VectorXd out(m * (upto + 1));
    for (int i = 0; i <= upto; ++i) out.segment(i * m, m) = levels[static_cast<std::size_t>(i)];
    return out;
}

JetPoint JetPoint::from_flat(const VectorXd& v, int m, int levels) {
    if (v.size() != m * levels) throw DimensionError("JetPoint::from_flat: size mismatch");
    JetPoint jet;
    jet.levels.reserve(static_cast<std::size_t>(levels));
    for (int i = 0; i < levels; ++i) jet.levels.push_back(v.segment(i * m, m));
    return jet;
}

DomainGuard DomainGuard::parse(const std::string& text, int m, int r) {
    static const std::pair<const char*, Cmp> ops[] = {
        {">=", Cmp::Ge}, {"<=", Cmp::Le}, {">", Cmp::Gt}, {"<", Cmp::Lt}};
    VarContext ctx = VarContext::jet(m, r + 1);
    for (auto [op, cmp] : ops) {
        auto pos = text.find(op);
        if (pos == std::string::npos) continue;
        DomainGuard g;
        g.lhs = SmoothMap::parse(ctx, {text.substr(0, pos)});
        g.rhs = SmoothMap::parse(ctx, {text.substr(pos + std::string(op).size())});
        g.cmp = cmp;
        g.text = text;
        return g;
    }
    throw SyntaxError("guard must contain one of >=, <=, >, <", 0);
}

bool DomainGuard::accepts(const JetPoint& jet) const {
    VectorXd v = jet.flatten(jet.order_count() - 1);
    double l = eval_map(lhs, v)(0);
    double r = eval_map(rhs, v)(0);
    switch (cmp) {
        case Cmp::Ge: return l >= r;
        case Cmp::Gt: return l > r;
        case Cmp::Le: return l <= r;
        case Cmp::Lt: return l < r;
    }
    return false;
}

std::vector<JetPoint> sample_jets(const ParameterFunction& pf, const JetSampler& sampler,
                                  int* rejected) {
    GaussianRng rng(sampler.seed);
    std::vector<JetPoint> out;
    out.reserve(static_cast<std::size_t>(sampler.n_samples));
    int rej = 0;
    const int max_attempts = 100 * sampler.n_samples + 100;
    for (int attempt = 0; attempt < max_attempts && static_cast<int>(out.size()) < sampler.n_samples;
         ++attempt) {
        JetPoint jet;
        for (int i = 0; i <= pf.r + 1; ++i)
            jet.levels.push_back(rng.gaussian_vector(pf.m, sampler.scale));
        if (sampler.guard && !sampler.guard->accepts(jet)) {
            ++rej;
            continue;
        }
        out.push_back(std::move(jet));
    }
    if (rejected) *rejected = rej;
    return out;
}

namespace {

std::vector<double> full_jet_vec(const JetPoint& jet) {
    VectorXd v = jet.flatten(jet.order_count() - 1);
    return std::vector<double>(v.data(), v.data() + v.size());
}

VectorXd cartan_shift(const ParameterFunction& pf, const JetPoint& jet) {
    VectorXd dir(pf.m * (pf.r + 1));
    for (int i = 0; i <= pf.r; ++i)
        dir.segment(i * pf.m, pf.m) = jet.levels[static_cast<std::size_t>(i + 1)];
    return dir;
}

}  // namespace

VectorXd total_derivative(const ParameterFunction& pf, const JetPoint& jet) {
    if (jet.order_count() != pf.r + 2)
        throw DimensionError("total_derivative: jet must have r+2 levels");
    std::vector<double> full = full_jet_vec(jet);
    auto out = lie_apply_generic<double>(pf.phi, pf.m, pf.r, full);
    VectorXd v(pf.n);
    for (int i = 0; i < pf.n; ++i) v(i) = out[static_cast<std::size_t>(i)];
    return v;
}

VectorXd pde_residual(const ImplicitSystem& sys, const ParameterFunction& pf,
                      const JetPoint& jet) {
    if (pf.n != sys.n || pf.m != sys.m)
        throw DimensionError("pde_residual: system/parameter-function dimension mismatch");
    VectorXd x = eval_map(pf.phi, jet.flatten(pf.r));
    VectorXd p = total_derivative(pf, jet);
    return sys.eval_F(x, p);
}

std::pair<VectorXd, VectorXd> phi_big(const ParameterFunction& pf, const JetPoint& jet) {
    return {eval_map(pf.phi, jet.flatten(pf.r)), total_derivative(pf, jet)};
}

MatrixXd lie_jacobian(const SmoothMap& g, int m, int r, const JetPoint& jet) {
    const int k = m * (r + 2);
    std::vector<Dual<double>> x(static_cast<std::size_t>(k));
    VectorXd flat = jet.flatten(r + 1);
    for (int q = 0; q < k; ++q) x[static_cast<std::size_t>(q)] = Dual<double>(flat(q));
    MatrixXd jac(g.output_dim(), k);
    for (int q = 0; q < k; ++q) {
        x[static_cast<std::size_t>(q)].dot = 1.0;
        auto col = lie_apply_generic<Dual<double>>(g, m, r, x);
        for (int i = 0; i < g.output_dim(); ++i) jac(i, q) = col[static_cast<std::size_t>(i)].dot;
        x[static_cast<std::size_t>(q)].dot = 0.0;
    }
    return jac;
}

MatrixXd lie_of_jacobian(const SmoothMap& g, int m, int r, const JetPoint& jet) {
    VectorXd base = jet.flatten(r);
    VectorXd dir(m * (r + 1));
    for (int i = 0; i <= r; ++i) dir.segment(i * m, m) = jet.levels[static_cast<std::size_t>(i + 1)];
    return directional_second(g, base, dir);
}

MatrixXd phi_big_jacobian(const ParameterFunction& pf, const JetPoint& jet) {
    const int k = pf.m * (pf.r + 2);
    MatrixXd J(2 * pf.n, k);
    J.setZero();
    J.topLeftCorner(pf.n, pf.m * (pf.r + 1)) = eval_jacobian(pf.phi, jet.flatten(pf.r));
    J.bottomRows(pf.n) = lie_jacobian(pf.phi, pf.m, pf.r, jet);
    return J;
}

PdeReport check_parameter_function(const ImplicitSystem& sys, const ParameterFunction& pf,
                                   const JetSampler& sampler, double tol) {
    PdeReport rep;
    rep.tol = tol;
    rep.guarded = sampler.guard.has_value();
    auto jets = sample_jets(pf, sampler, &rep.rejected_by_guard);
    rep.samples = static_cast<int>(jets.size());
    for (const auto& jet : jets) {
        try {
            double res = pde_residual(sys, pf, jet).lpNorm<Eigen::Infinity>();
            rep.max_residual = std::max(rep.max_residual, res);
        } catch (const DomainError&) {
            ++rep.domain_errors;
        }
    }
    rep.pass = rep.samples > 0 && rep.domain_errors == 0 && rep.max_residual <= tol;
    return rep;
}

SubmersionReport check_submersion(const ImplicitSystem& sys, const ParameterFunction& pf,
                                  const JetSampler& sampler, double tol_res, double tol_rank) {
    SubmersionReport rep;
    rep.required_rank = sys.n + sys.m;
    rep.required_rank_dphi = sys.n;
    auto jets = sample_jets(pf, sampler, nullptr);
    rep.samples = static_cast<int>(jets.size());
    rep.min_rank_dPhi = rep.samples > 0 ? rep.required_rank : 0;
    rep.min_rank_dphi = rep.samples > 0 ? rep.required_rank_dphi : 0;
    bool first = true;
    for (const auto& jet : jets) {
        try {
            auto [x, p] = phi_big(pf, jet);
            double res = sys.eval_F(x, p).norm();
            rep.max_on_variety_residual = std::max(rep.max_on_variety_residual, res);
            int rank_dPhi = svd_rank(phi_big_jacobian(pf, jet), tol_rank).rank;
            int rank_dphi = svd_rank(eval_jacobian(pf.phi, jet.flatten(pf.r)), tol_rank).rank;
            if (first) {
                rep.min_rank_dPhi = rank_dPhi;
                rep.min_rank_dphi = rank_dphi;
                first = false;
            } else {
                rep.min_rank_dPhi = std::min(rep.min_rank_dPhi, rank_dPhi);
                rep.min_rank_dphi = std::min(rep.min_rank_dphi, rank_dphi);
            }
        } catch (const DomainError&) {
            ++rep.domain_errors;
        }
    }
    rep.pass = rep.samples > 0 && rep.domain_errors == 0 &&
               rep.max_on_variety_residual <= tol_res &&
               rep.min_rank_dPhi == rep.required_rank;
    return rep;
}

EquilibriumMapReport check_equilibrium_map(const ImplicitSystem& sys, const ParameterFunction& pf,
                                           const JetSampler& sampler_y0, double tol) {
    EquilibriumMapReport rep;
    rep.required_rank = pf.m;
    GaussianRng rng(sampler_y0.seed);

    std::vector<VectorXd> y0s;
    std::vector<VectorXd> images;
    rep.min_rank = pf.m;
    bool checks_ok = true;
    bool first_rank = true;
    for (int s = 0; s < sampler_y0.n_samples; ++s) {
        VectorXd y0 = rng.gaussian_vector(pf.m, sampler_y0.scale);
        JetPoint jet;
        jet.levels.push_back(y0);
        for (int i = 1; i <= pf.r + 1; ++i) jet.levels.push_back(VectorXd::Zero(pf.m));
        ++rep.samples;
        // The chart is evaluated at the equilibrium jet regardless of the
        // guard; a hard DomainError here is a criterion failure, while a
        // guard that merely excludes the jet makes the block inconclusive.
        VectorXd x;
        try {
            x = eval_map(pf.phi, jet.flatten(pf.r));
        } catch (const DomainError& e) {
            ++rep.domain_errors;
            if (rep.failure_cause.empty())
                rep.failure_cause = std::string("DomainError at equilibrium jet: ") + e.what();
            continue;
        }
        if (sampler_y0.guard && !sampler_y0.guard->accepts(jet)) {
            ++rep.guard_excluded;
            continue;
        }
        double fres = sys.eval_F(x, VectorXd::Zero(sys.n)).norm();
        rep.max_F_residual = std::max(rep.max_F_residual, fres);
        if (fres > tol) checks_ok = false;

        MatrixXd J = eval_jacobian(pf.phi, jet.flatten(pf.r)).leftCols(pf.m);
        int rank = svd_rank(J).rank;
        if (first_rank) {
            rep.min_rank = rank;
            first_rank = false;
        } else {
            rep.min_rank = std::min(rep.min_rank, rank);
        }
        y0s.push_back(y0);
        images.push_back(x);
    }

    if (rep.domain_errors > 0) {
        rep.status = EquilibriumMapReport::Status::Fail;
        return rep;
    }
    if (y0s.empty()) {
        rep.status = rep.guard_excluded > 0 ? EquilibriumMapReport::Status::Excluded
                                            : EquilibriumMapReport::Status::Fail;
        if (rep.failure_cause.empty())
            rep.failure_cause = rep.guard_excluded > 0
                                    ? "guard excludes all equilibrium jets"
                                    : "no equilibrium jets evaluated";
        return rep;
    }

    // Pairwise injectivity probe.
    const double delta = 1e-9;
    double min_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < y0s.size(); ++i) {
        for (std::size_t j = i + 1; j < y0s.size(); ++j) {
            double sep = (y0s[i] - y0s[j]).norm();
            if (sep < delta) continue;
            min_ratio = std::min(min_ratio, (images[i] - images[j]).norm() / sep);
        }
    }
    rep.min_separation_ratio = std::isfinite(min_ratio) ? min_ratio : 0.0;
    if (rep.min_separation_ratio <= 1e-12) checks_ok = false;

    // Local-surjectivity probe: invert y0 -> phi(y0, 0..0) onto equilibria
    // found from seeded guesses.
    const int n_targets = std::min(5, sampler_y0.n_samples);
    auto eqmap_value = [&](const VectorXd& y0) {
        JetPoint jet;
        jet.levels.push_back(y0);
        for (int i = 1; i <= pf.r + 1; ++i) jet.levels.push_back(VectorXd::Zero(pf.m));
        return eval_map(pf.phi, jet.flatten(pf.r));
    };
    auto eqmap_jac = [&](const VectorXd& y0) {
        JetPoint jet;
        jet.levels.push_back(y0);
        for (int i = 1; i <= pf.r + 1; ++i) jet.levels.push_back(VectorXd::Zero(pf.m));
        return MatrixXd(eval_jacobian(pf.phi, jet.flatten(pf.r)).leftCols(pf.m));
    };
    if (sys.f) {
        for (int t = 0; t < n_targets; ++t) {
            VectorXd xg = rng.gaussian_vector(sys.n, sampler_y0.scale);
            VectorXd ug = rng.gaussian_vector(sys.m, sampler_y0.scale);
            EquilibriumPoint eq = find_equilibrium(sys, xg, ug);
            if (eq.residual_norm > 1e-8) continue;
            ++rep.inversion_targets;
            GaussNewtonOpts opts;
            opts.tol = 1e-8;
            try {
                SolveResult sol = gauss_newton_solve_fn(eqmap_value, eqmap_jac, eq.x0,
                                                        y0s[static_cast<std::size_t>(t) % y0s.size()], opts);
                if (sol.converged) ++rep.inversion_successes;
            } catch (const DomainError&) {
            }
        }
        if (rep.inversion_targets > 0 && rep.inversion_successes < rep.inversion_targets)
            checks_ok = false;
    }

    bool rank_ok = rep.min_rank == rep.required_rank;
    bool residual_ok = rep.max_F_residual <= tol;
    if (checks_ok && rank_ok && residual_ok) {
        rep.status = rep.guard_excluded > 0 ? EquilibriumMapReport::Status::Excluded
                                            : EquilibriumMapReport::Status::Pass;
        if (rep.guard_excluded > 0 && rep.failure_cause.empty())
            rep.failure_cause = "guard excludes part of the equilibrium jets";
    } else {
        rep.status = EquilibriumMapReport::Status::Fail;
        if (rep.failure_cause.empty()) {
            if (!residual_ok) rep.failure_cause = "phi(y0,0..0) leaves the equilibrium variety";
            else if (!rank_ok) rep.failure_cause = "rank of the equilibrium map below m";
            else rep.failure_cause = "injectivity or inversion probe failed";
        }
    }
    return rep;
}

SurjectivityReport surjectivity_probe(const ImplicitSystem& sys, const ParameterFunction& pf,
                                      const VarietySample& targets, int restarts,
                                      std::uint64_t seed, double tol) {
    SurjectivityReport rep;
    rep.targets = static_cast<int>(targets.size());
    rep.restarts = restarts;
    GaussianRng rng(seed);
    const int jet_dim = pf.m * (pf.r + 2);
    for (const auto& t : targets) {
        VectorXd target(2 * sys.n);
        target << t.x, t.p;
        bool success = false;
        double best = std::numeric_limits<double>::infinity();
        for (int rs = 0; rs < restarts && !success; ++rs) {
            VectorXd init = rng.gaussian_vector(jet_dim);
            auto value = [&](const VectorXd& v) {
                auto [x, p] = phi_big(pf, JetPoint::from_flat(v, pf.m, pf.r + 2));
                VectorXd out(2 * pf.n);
                out << x, p;
                return out;
            };
            auto jac = [&](const VectorXd& v) {
                return phi_big_jacobian(pf, JetPoint::from_flat(v, pf.m, pf.r + 2));
            };
            GaussNewtonOpts opts;
            opts.tol = tol;
            opts.max_iter = 100;
            try {
                SolveResult sol = gauss_newton_solve_fn(value, jac, target, init, opts);
                best = std::min(best, sol.residual_norm);
                success = sol.converged;
            } catch (const DomainError&) {
            }
        }
        if (success) {
            ++rep.successes;
            rep.worst_success_residual = std::max(rep.worst_success_residual, best);
        }
    }
    rep.success_fraction = rep.targets > 0 ? static_cast<double>(rep.successes) / rep.targets : 0.0;
    return rep;
}

}  // namespace flatcert
