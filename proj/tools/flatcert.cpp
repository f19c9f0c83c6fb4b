#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "flatcert/runner.hpp"

namespace {

constexpr int kExitSatisfied = 0;
constexpr int kExitFailed = 1;
constexpr int kExitSpecError = 2;
constexpr int kExitInconclusive = 3;

int do_check(const std::string& spec_path, int samples, long long seed, double tol,
             const std::string& json_path) {
    flatcert::LoadedSpec spec;
    try {
        spec = flatcert::load_spec(spec_path);
    } catch (const std::exception& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return kExitSpecError;
    }
    if (samples > 0) spec.check.samples = samples;
    if (seed >= 0) spec.check.seed = static_cast<std::uint64_t>(seed);
    if (tol > 0) spec.check.tol = tol;

    flatcert::CheckReport report = flatcert::run_check(spec);
    std::cout << report.render_table();
    if (!json_path.empty()) {
        std::ofstream out(json_path);
        if (!out) {
            std::cerr << "cannot write JSON report to " << json_path << "\n";
            return kExitSpecError;
        }
        out << report.to_json().dump(2) << "\n";
    }
    std::string overall = report.overall();
    if (overall == "CRITERION SATISFIED") return kExitSatisfied;
    if (overall == "INCONCLUSIVE") return kExitInconclusive;
    return kExitFailed;
}

int do_plan(const std::string& spec_path, double T, int grid, const std::string& csv_path,
            const std::string& json_path) {
    flatcert::LoadedSpec spec;
    try {
        spec = flatcert::load_spec(spec_path);
    } catch (const std::exception& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return kExitSpecError;
    }
    if (T > 0) spec.plan.T = T;
    if (grid > 0) spec.plan.grid = grid;

    flatcert::PlanRunResult result;
    try {
        result = flatcert::run_plan(spec);
    } catch (const std::exception& e) {
        std::cerr << "plan error: " << e.what() << "\n";
        return kExitSpecError;
    }
    std::cout << "plan: T = " << result.path.T << ", nodes = " << result.traj.nodes.size()
              << ", max residual = " << result.max_residual
              << ", inputs converged = " << (result.inputs_converged ? "yes" : "no") << "\n";
    if (result.roundtrip)
        std::cout << "psi round-trip max error = " << result.roundtrip->max_error << "\n";
    std::cout << (result.pass ? "PLAN OK" : "PLAN FAILED") << "\n";
    if (!csv_path.empty()) {
        std::ofstream out(csv_path);
        out << flatcert::trajectory_csv(result.traj, spec.pf.m, spec.pf.r, spec.sys.n);
    }
    if (!json_path.empty()) {
        std::ofstream out(json_path);
        out << flatcert::plan_json(spec, result).dump(2) << "\n";
    }
    return result.pass ? kExitSatisfied : kExitFailed;
}

int do_catalog(const std::string& name) {
    if (name.empty()) {
        for (const auto& n : flatcert::catalog_names()) std::cout << n << "\n";
        return kExitSatisfied;
    }
    try {
        std::string text = flatcert::catalog_spec_text(name);
        std::string path = name + ".flat";
        std::ofstream out(path);
        if (!out) {
            std::cerr << "cannot write " << path << "\n";
            return kExitSpecError;
        }
        out << text;
        std::cout << "wrote " << path << "\n";
        return kExitSatisfied;
    } catch (const flatcert::UnknownCatalogEntry& e) {
        std::cerr << e.what() << "\n";
        return kExitSpecError;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"flatcert - numerical certification of differential flatness candidates"};
    app.require_subcommand(1);

    std::string spec_path, json_path, csv_path, catalog_name;
    int samples = -1, grid = -1;
    long long seed = -1;
    double tol = -1.0, T = -1.0;

    auto* check = app.add_subcommand("check", "run the flatness criterion checks on a spec file");
    check->add_option("spec", spec_path, "spec file path")->required();
    check->add_option("--samples", samples, "sample count override");
    check->add_option("--seed", seed, "RNG seed override");
    check->add_option("--tol", tol, "tolerance override");
    check->add_option("--json", json_path, "write the JSON report here");

    auto* plan = app.add_subcommand("plan", "plan and verify a flat trajectory");
    plan->add_option("spec", spec_path, "spec file path")->required();
    plan->add_option("--T", T, "horizon override");
    plan->add_option("--grid", grid, "grid node count override");
    plan->add_option("--csv", csv_path, "write the trajectory CSV here");
    plan->add_option("--json", json_path, "write the trajectory JSON here");

    auto* catalog = app.add_subcommand("catalog", "list built-in systems or emit one as a spec file");
    catalog->add_option("name", catalog_name, "catalog entry to emit");

    CLI11_PARSE(app, argc, argv);

    if (check->parsed()) return do_check(spec_path, samples, seed, tol, json_path);
    if (plan->parsed()) return do_plan(spec_path, T, grid, csv_path, json_path);
    return do_catalog(catalog_name);
}
