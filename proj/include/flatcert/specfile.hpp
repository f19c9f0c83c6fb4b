#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flatcert/jetflat.hpp"
#include "flatcert/system.hpp"

namespace flatcert {

struct UnknownCatalogEntry : SpecError {
    using SpecError::SpecError;
};

struct CheckOptions {
    int samples = 100;
    std::uint64_t seed = 42;
    double scale = 1.0;
    double tol = 1e-8;
};

struct PlanOptions {
    bool present = false;
    std::vector<VectorXd> start_jet;  // r+2 levels
    std::vector<VectorXd> end_jet;
    double T = 1.0;
    int degree = -1;  // -1: default 2r+3
    int grid = 200;
};

struct LoadedSpec {
    ImplicitSystem sys;
    ParameterFunction pf;
    std::optional<DomainGuard> guard;
    std::optional<SmoothMap> psi;
    int psi_order = 0;
    CheckOptions check;
    PlanOptions plan;
    std::string raw_text;
};

// Variable context for psi over x-jets of the given order: x1..xn, then
// d1x1..d1xn, .. up to d{s}x{n}.
VarContext psi_context(int n, int order);

LoadedSpec parse_spec_text(const std::string& text);
LoadedSpec load_spec(const std::string& path);

std::vector<std::string> catalog_names();
// Throws UnknownCatalogEntry.
std::string catalog_spec_text(const std::string& name);

}  // namespace flatcert
