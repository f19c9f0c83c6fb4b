#pragma once

#include <optional>

#include "flatcert/planner.hpp"
#include "flatcert/report.hpp"
#include "flatcert/specfile.hpp"

namespace flatcert {

// Runs the full check sequence on a loaded spec and assembles the report.
CheckReport run_check(const LoadedSpec& spec);

struct PlanRunResult {
    PolyPath path;
    Trajectory traj;
    double max_residual = 0.0;
    bool inputs_converged = true;
    std::optional<RoundtripReport> roundtrip;
    bool pass = false;
};

PlanRunResult run_plan(const LoadedSpec& spec, double tol = 1e-8);

std::string trajectory_csv(const Trajectory& traj, int m, int r, int n);
nlohmann::ordered_json plan_json(const LoadedSpec& spec, const PlanRunResult& result);

}  // namespace flatcert
