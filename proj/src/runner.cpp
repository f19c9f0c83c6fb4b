#include "flatcert/runner.hpp"

#include <sstream>

#include "flatcert/controllability.hpp"
#include "flatcert/rng.hpp"

namespace flatcert {

namespace {

using Status = CheckBlock::Status;

JetPoint equilibrium_jet(const ParameterFunction& pf, const VectorXd& y0) {
    JetPoint jet;
    jet.levels.push_back(y0);
    for (int i = 1; i <= pf.r + 1; ++i) jet.levels.push_back(VectorXd::Zero(pf.m));
    return jet;
}

CheckBlock consistency_block(const LoadedSpec& spec) {
    CheckBlock b;
    b.name = "consistency";
    const double tol = 1e-9;
    try {
        auto rep = check_consistency(spec.sys, spec.check.samples, spec.check.seed, tol);
        b.status = rep.pass ? Status::Pass : Status::Fail;
        b.data["samples"] = rep.samples;
        b.data["max_F_residual"] = rep.max_F_residual;
        b.data["max_kernel_image_residual"] = rep.max_kernel_image_residual;
        b.data["rank_dFdp_ok"] = rep.rank_dFdp_ok;
        b.data["rank_dfdu_ok"] = rep.rank_dfdu_ok;
        b.data["tol"] = tol;
        if (!rep.pass)
            b.verdict = "failed " + rep.failed_check + " at sample " +
                        std::to_string(rep.first_failed_sample);
    } catch (const std::exception& e) {
        b.status = Status::Fail;
        b.verdict = e.what();
    }
    return b;
}

CheckBlock pde_block(const LoadedSpec& spec, PdeReport& out) {
    CheckBlock b;
    b.name = "pde";
    JetSampler sampler{spec.check.samples, spec.check.seed + 1, spec.check.scale, spec.guard};
    out = check_parameter_function(spec.sys, spec.pf, sampler, spec.check.tol);
    b.status = out.pass ? Status::Pass : Status::Fail;
    b.data["samples"] = out.samples;
    b.data["rejected_by_guard"] = out.rejected_by_guard;
    b.data["domain_errors"] = out.domain_errors;
    b.data["max_residual"] = out.max_residual;
    b.data["tol"] = out.tol;
    b.data["guarded"] = out.guarded;
    if (out.guarded) b.verdict = "sampled on guard region " + spec.guard->text;
    if (out.domain_errors > 0) b.verdict = "DomainError at unguarded samples";
    return b;
}

void submersion_blocks(const LoadedSpec& spec, CheckReport& rep) {
    JetSampler sampler{spec.check.samples, spec.check.seed + 2, spec.check.scale, spec.guard};
    auto sub = check_submersion(spec.sys, spec.pf, sampler, spec.check.tol);

    CheckBlock b;
    b.name = "submersion";
    b.status = sub.pass ? Status::Pass : Status::Fail;
    b.data["samples"] = sub.samples;
    b.data["domain_errors"] = sub.domain_errors;
    b.data["max_on_variety_residual"] = sub.max_on_variety_residual;
    b.data["min_rank_dPhi"] = sub.min_rank_dPhi;
    b.data["required_rank"] = sub.required_rank;
    rep.blocks.push_back(std::move(b));

    CheckBlock d;
    d.name = "dphi-rank";
    d.status = (sub.samples > 0 && sub.domain_errors == 0 &&
                sub.min_rank_dphi == sub.required_rank_dphi)
                   ? Status::Pass
                   : Status::Fail;
    d.data["min_rank_dphi"] = sub.min_rank_dphi;
    d.data["required_rank"] = sub.required_rank_dphi;
    rep.blocks.push_back(std::move(d));
}

CheckBlock equilibrium_map_block(const LoadedSpec& spec) {
    CheckBlock b;
    b.name = "equilibrium-map";
    JetSampler sampler{20, spec.check.seed + 3, spec.check.scale, spec.guard};
    auto rep = check_equilibrium_map(spec.sys, spec.pf, sampler, spec.check.tol);
    switch (rep.status) {
        case EquilibriumMapReport::Status::Pass: b.status = Status::Pass; break;
        case EquilibriumMapReport::Status::Fail: b.status = Status::Fail; break;
        case EquilibriumMapReport::Status::Excluded: b.status = Status::Excluded; break;
    }
    b.data["samples"] = rep.samples;
    b.data["domain_errors"] = rep.domain_errors;
    b.data["guard_excluded"] = rep.guard_excluded;
    b.data["max_F_residual"] = rep.max_F_residual;
    b.data["min_rank"] = rep.min_rank;
    b.data["required_rank"] = rep.required_rank;
    b.data["min_separation_ratio"] = rep.min_separation_ratio;
    b.data["inversion_targets"] = rep.inversion_targets;
    b.data["inversion_successes"] = rep.inversion_successes;
    b.verdict = rep.failure_cause.empty() ? "local evidence (rank + probes), not a proof"
                                          : rep.failure_cause;
    return b;
}

CheckBlock equilibrium_identity_block(const LoadedSpec& spec) {
    CheckBlock b;
    b.name = "equilibrium-identities";
    GaussianRng rng(spec.check.seed + 4);
    const int samples = 5;
    double max_res = 0.0;
    bool ok = true;
    int done = 0;
    for (int s = 0; s < samples; ++s) {
        VectorXd y0 = rng.gaussian_vector(spec.pf.m, spec.check.scale);
        try {
            auto rep = check_equilibrium_identities(spec.sys, spec.pf, y0, spec.check.tol);
            max_res = std::max(max_res, rep.max_residual);
            ok = ok && rep.pass;
            ++done;
        } catch (const DomainError& e) {
            ok = false;
            if (b.verdict.empty())
                b.verdict = std::string("DomainError at equilibrium jet: ") + e.what();
        }
    }
    b.status = (ok && done > 0) ? Status::Pass : Status::Fail;
    b.data["samples"] = done;
    b.data["max_residual"] = max_res;
    b.data["tol"] = spec.check.tol;
    return b;
}

CheckBlock chain_block(const LoadedSpec& spec, std::optional<EquilibriumPoint>& eq_out) {
    CheckBlock b;
    b.name = "chain-inclusions";
    GaussianRng rng(spec.check.seed + 5);
    const int samples = 3;
    double max_incl = 0.0;
    int min_stacked = spec.sys.n;
    int kalman = 0;
    bool ok = true;
    int done = 0;
    for (int s = 0; s < samples; ++s) {
        VectorXd y0 = rng.gaussian_vector(spec.pf.m, spec.check.scale);
        try {
            VectorXd x0 = eval_map(spec.pf.phi, equilibrium_jet(spec.pf, y0).flatten(spec.pf.r));
            auto value = [&](const VectorXd& u) { return spec.sys.eval_f(x0, u); };
            auto jac = [&](const VectorXd& u) {
                return MatrixXd(spec.sys.f_jacobian_blocks(x0, u).second);
            };
            GaussNewtonOpts opts;
            SolveResult sol = gauss_newton_solve_fn(value, jac, VectorXd::Zero(spec.sys.n),
                                                    VectorXd::Zero(spec.sys.m), opts);
            EquilibriumPoint eq{x0, sol.solution, sol.residual_norm};
            if (sol.residual_norm > 1e-8) {
                ok = false;
                if (b.verdict.empty()) b.verdict = "phi(y0,0..0) is not an equilibrium state";
                continue;
            }
            auto rep = check_chain_inclusions(spec.sys, spec.pf, eq, y0, spec.check.tol);
            for (double res : rep.inclusion_residuals) max_incl = std::max(max_incl, res);
            min_stacked = done == 0 ? rep.stacked_rank : std::min(min_stacked, rep.stacked_rank);
            kalman = rep.kalman;
            ok = ok && rep.pass;
            if (!eq_out) eq_out = eq;
            ++done;
        } catch (const std::exception& e) {
            ok = false;
            if (b.verdict.empty()) b.verdict = e.what();
        }
    }
    b.status = (ok && done > 0) ? Status::Pass : Status::Fail;
    b.data["samples"] = done;
    b.data["max_inclusion_residual"] = max_incl;
    b.data["stacked_rank"] = done > 0 ? min_stacked : 0;
    b.data["required_rank"] = spec.sys.n;
    b.data["kalman_rank"] = kalman;
    b.data["tol"] = spec.check.tol;
    return b;
}

CheckBlock kalman_block(const LoadedSpec& spec, const std::optional<EquilibriumPoint>& chain_eq) {
    CheckBlock b;
    b.name = "kalman";
    try {
        EquilibriumPoint eq = chain_eq ? *chain_eq
                                       : find_equilibrium(spec.sys, VectorXd::Zero(spec.sys.n),
                                                          VectorXd::Zero(spec.sys.m));
        if (eq.residual_norm > 1e-8) {
            b.status = Status::Fail;
            b.verdict = "no equilibrium found for the linearization";
            return b;
        }
        Linearization lin = linearize(spec.sys, eq);
        auto rank = kalman_rank(lin);
        b.status = rank.rank == spec.sys.n ? Status::Pass : Status::Fail;
        b.data["rank"] = rank.rank;
        b.data["required_rank"] = spec.sys.n;
        b.data["controllable"] = rank.rank == spec.sys.n;
        b.data["identity_residual"] = lin.identity_residual;
    } catch (const std::exception& e) {
        b.status = Status::Fail;
        b.verdict = e.what();
    }
    return b;
}

CheckBlock structure_identity_block(const LoadedSpec& spec) {
    CheckBlock b;
    b.name = "structure-identities";
    b.mandatory = false;
    JetSampler sampler{5, spec.check.seed + 6, spec.check.scale, spec.guard};
    auto jets = sample_jets(spec.pf, sampler, nullptr);
    double max_res = 0.0;
    bool ok = !jets.empty();
    for (const auto& jet : jets) {
        try {
            auto rep = check_structure_identities(spec.sys, spec.pf, jet, spec.check.tol);
            max_res = std::max(max_res, rep.max_residual);
            ok = ok && rep.pass;
        } catch (const DomainError& e) {
            ok = false;
            if (b.verdict.empty()) b.verdict = e.what();
        }
    }
    b.status = ok ? Status::Pass : Status::Fail;
    b.data["samples"] = static_cast<int>(jets.size());
    b.data["max_residual"] = max_res;
    b.data["tol"] = spec.check.tol;
    return b;
}

CheckBlock surjectivity_block(const LoadedSpec& spec) {
    CheckBlock b;
    b.name = "surjectivity-probe";
    b.mandatory = false;
    try {
        int n_targets = std::min(50, spec.check.samples);
        auto targets = sample_variety(spec.sys, n_targets, spec.check.seed + 7, spec.check.scale);
        auto rep = surjectivity_probe(spec.sys, spec.pf, targets, 5, spec.check.seed + 8);
        b.status = rep.success_fraction == 1.0 ? Status::Pass : Status::Fail;
        b.data["targets"] = rep.targets;
        b.data["restarts"] = rep.restarts;
        b.data["successes"] = rep.successes;
        b.data["success_fraction"] = rep.success_fraction;
        b.data["worst_success_residual"] = rep.worst_success_residual;
    } catch (const std::exception& e) {
        b.status = Status::Fail;
        b.verdict = e.what();
    }
    if (b.verdict.empty()) b.verdict = "probe (local evidence, not a proof)";
    return b;
}

}  // namespace

CheckReport run_check(const LoadedSpec& spec) {
    CheckReport rep;
    rep.spec_hash = fnv1a_hex(spec.raw_text);
    rep.seed = spec.check.seed;
    rep.samples = spec.check.samples;
    rep.tolerance = spec.check.tol;
    rep.scale = spec.check.scale;

    rep.blocks.push_back(consistency_block(spec));
    PdeReport pde;
    rep.blocks.push_back(pde_block(spec, pde));
    submersion_blocks(spec, rep);
    rep.blocks.push_back(equilibrium_map_block(spec));
    rep.blocks.push_back(equilibrium_identity_block(spec));
    std::optional<EquilibriumPoint> chain_eq;
    rep.blocks.push_back(chain_block(spec, chain_eq));
    rep.blocks.push_back(kalman_block(spec, chain_eq));
    rep.blocks.push_back(structure_identity_block(spec));
    rep.blocks.push_back(surjectivity_block(spec));
    return rep;
}

PlanRunResult run_plan(const LoadedSpec& spec, double tol) {
    if (!spec.plan.present) throw SpecError("spec has no [plan] section");
    PlanRunResult out;
    int degree = spec.plan.degree >= 0 ? spec.plan.degree : 2 * spec.pf.r + 3;
    out.path = fit_flat_path(spec.plan.start_jet, spec.plan.end_jet, spec.plan.T, degree);
    out.traj = synthesize_trajectory(spec.sys, spec.pf, out.path, spec.plan.grid);
    recover_inputs(spec.sys, out.traj);
    out.max_residual = out.traj.max_residual;
    for (const auto& node : out.traj.nodes)
        out.inputs_converged = out.inputs_converged && node.input_converged;
    if (spec.psi)
        out.roundtrip = roundtrip_check(*spec.psi, spec.psi_order, out.traj, out.path);
    out.pass = out.traj.domain_errors == 0 && out.max_residual <= tol && out.inputs_converged &&
               (!out.roundtrip || out.roundtrip->pass);
    return out;
}

std::string trajectory_csv(const Trajectory& traj, int m, int r, int n) {
    std::ostringstream out;
    out.precision(17);
    out << "t";
    for (int order = 0; order <= r + 1; ++order)
        for (int j = 1; j <= m; ++j) out << ",y" << order << "_" << j;
    for (int i = 1; i <= n; ++i) out << ",x" << i;
    for (int i = 1; i <= n; ++i) out << ",xdot" << i;
    for (int j = 1; j <= m; ++j) out << ",u" << j;
    out << ",residual\n";
    for (const auto& node : traj.nodes) {
        out << node.t;
        for (int order = 0; order <= r + 1; ++order)
            for (int j = 0; j < m; ++j)
                out << "," << node.jet.levels[static_cast<std::size_t>(order)](j);
        for (int i = 0; i < n; ++i) out << "," << (node.domain_error ? 0.0 : node.x(i));
        for (int i = 0; i < n; ++i) out << "," << (node.domain_error ? 0.0 : node.xdot(i));
        for (int j = 0; j < m; ++j)
            out << "," << ((node.domain_error || node.u.size() == 0) ? 0.0 : node.u(j));
        out << "," << node.residual << "\n";
    }
    return out.str();
}

nlohmann::ordered_json plan_json(const LoadedSpec& spec, const PlanRunResult& result) {
    nlohmann::ordered_json j;
    j["schema_version"] = kReportSchemaVersion;
    j["tool_version"] = kToolVersion;
    j["spec_hash"] = fnv1a_hex(spec.raw_text);
    j["horizon"] = result.path.T;
    j["grid"] = static_cast<int>(result.traj.nodes.size()) - 1;
    j["max_residual"] = result.max_residual;
    j["inputs_converged"] = result.inputs_converged;
    j["domain_errors"] = result.traj.domain_errors;
    if (result.roundtrip) {
        j["roundtrip_max_error"] = result.roundtrip->max_error;
        j["roundtrip_pass"] = result.roundtrip->pass;
    }
    j["pass"] = result.pass;
    auto nodes = nlohmann::ordered_json::array();
    for (const auto& node : result.traj.nodes) {
        nlohmann::ordered_json jn;
        jn["t"] = node.t;
        auto jet = nlohmann::ordered_json::array();
        for (const auto& level : node.jet.levels)
            jet.push_back(std::vector<double>(level.data(), level.data() + level.size()));
        jn["jet"] = std::move(jet);
        if (!node.domain_error) {
            jn["x"] = std::vector<double>(node.x.data(), node.x.data() + node.x.size());
            jn["xdot"] = std::vector<double>(node.xdot.data(), node.xdot.data() + node.xdot.size());
            if (node.u.size() > 0)
                jn["u"] = std::vector<double>(node.u.data(), node.u.data() + node.u.size());
            jn["residual"] = node.residual;
        } else {
            jn["domain_error"] = true;
        }
        nodes.push_back(std::move(jn));
    }
    j["nodes"] = std::move(nodes);
    return j;
}

}  // namespace flatcert
