#include "flatcert/specfile.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "flatcert/errors.hpp"

namespace flatcert {

VarContext psi_context(int n, int order) {
    std::vector<std::string> names;
    for (int i = 1; i <= n; ++i) names.push_back("x" + std::to_string(i));
    for (int d = 1; d <= order; ++d)
        for (int i = 1; i <= n; ++i)
            names.push_back("d" + std::to_string(d) + "x" + std::to_string(i));
    return VarContext(std::move(names));
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

struct Entry {
    std::string value;
    int line;
};

struct Sections {
    // section -> key -> ordered values
    std::map<std::string, std::map<std::string, std::vector<Entry>>> data;

    bool has(const std::string& sec) const { return data.count(sec) > 0; }

    const std::vector<Entry>* find(const std::string& sec, const std::string& key) const {
        auto s = data.find(sec);
        if (s == data.end()) return nullptr;
        auto k = s->second.find(key);
        if (k == s->second.end()) return nullptr;
        return &k->second;
    }

    std::string single(const std::string& sec, const std::string& key) const {
        const auto* v = find(sec, key);
        if (!v)
            throw SpecError("missing required key '" + sec + "." + key + "'");
        if (v->size() != 1)
            throw SpecError("key '" + sec + "." + key + "' given " +
                            std::to_string(v->size()) + " times, expected once");
        return v->front().value;
    }

    std::optional<std::string> optional_single(const std::string& sec,
                                               const std::string& key) const {
        const auto* v = find(sec, key);
        if (!v) return std::nullopt;
        if (v->size() != 1)
            throw SpecError("key '" + sec + "." + key + "' given more than once");
        return v->front().value;
    }

    std::vector<std::string> list(const std::string& sec, const std::string& key) const {
        const auto* v = find(sec, key);
        std::vector<std::string> out;
        if (v)
            for (const auto& e : *v) out.push_back(e.value);
        return out;
    }
};

const std::map<std::string, std::vector<std::string>> kKnownKeys = {
    {"system", {"n", "m", "F", "f"}},
    {"flat", {"r", "phi", "guard", "psi", "psi_order"}},
    {"check", {"samples", "seed", "scale", "tol"}},
    {"plan", {"start", "end", "T", "degree", "grid"}},
};

Sections parse_sections(const std::string& text) {
    Sections out;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw SpecError("line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!kKnownKeys.count(section))
                throw SpecError("line " + std::to_string(lineno) + ": unknown section '" +
                                section + "'");
            out.data[section];
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw SpecError("line " + std::to_string(lineno) + ": expected 'key = value'");
        if (section.empty())
            throw SpecError("line " + std::to_string(lineno) + ": key outside any section");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        const auto& known = kKnownKeys.at(section);
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw SpecError("line " + std::to_string(lineno) + ": unknown key '" + section +
                            "." + key + "'");
        out.data[section][key].push_back({value, lineno});
    }
    return out;
}

int parse_int(const std::string& sec, const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        int out = std::stoi(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return out;
    } catch (const std::exception&) {
        throw SpecError("key '" + sec + "." + key + "': invalid integer '" + v + "'");
    }
}

double parse_double(const std::string& sec, const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        double out = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return out;
    } catch (const std::exception&) {
        throw SpecError("key '" + sec + "." + key + "': invalid number '" + v + "'");
    }
}

std::vector<VectorXd> parse_jet_levels(const std::string& sec, const std::string& key,
                                       const std::string& v, int m, int levels) {
    std::istringstream in(v);
    std::vector<double> vals;
    double x;
    while (in >> x) vals.push_back(x);
    if (!in.eof())
        throw SpecError("key '" + sec + "." + key + "': expected whitespace-separated numbers");
    if (static_cast<int>(vals.size()) != m * levels)
        throw DimensionError("key '" + sec + "." + key + "': expected " +
                             std::to_string(m * levels) + " numbers (m*(r+2)), got " +
                             std::to_string(vals.size()));
    std::vector<VectorXd> jet;
    for (int i = 0; i < levels; ++i) {
        VectorXd level(m);
        for (int j = 0; j < m; ++j) level(j) = vals[static_cast<std::size_t>(i * m + j)];
        jet.push_back(level);
    }
    return jet;
}

SmoothMap parse_map(const std::string& key, const VarContext& ctx,
                    const std::vector<std::string>& exprs) {
    try {
        return SmoothMap::parse(ctx, exprs);
    } catch (const SpecError&) {
        throw;
    } catch (const std::exception& e) {
        throw SpecError("key '" + key + "': " + e.what());
    }
}

}  // namespace

LoadedSpec parse_spec_text(const std::string& text) {
    Sections sec = parse_sections(text);
    if (!sec.has("system")) throw SpecError("missing [system] section");
    if (!sec.has("flat")) throw SpecError("missing [flat] section");

    int n = parse_int("system", "n", sec.single("system", "n"));
    int m = parse_int("system", "m", sec.single("system", "m"));
    if (m <= 0 || n <= m) throw DimensionError("[system]: requires 0 < m < n");

    auto F_exprs = sec.list("system", "F");
    if (static_cast<int>(F_exprs.size()) != n - m)
        throw DimensionError("system.F: expected " + std::to_string(n - m) +
                             " expressions, got " + std::to_string(F_exprs.size()));
    auto f_exprs = sec.list("system", "f");
    if (static_cast<int>(f_exprs.size()) != n)
        throw DimensionError("system.f: expected " + std::to_string(n) + " expressions, got " +
                             std::to_string(f_exprs.size()));

    SmoothMap F = parse_map("system.F", VarContext::state_param(n), F_exprs);
    SmoothMap f = parse_map("system.f", VarContext::state_input(n, m), f_exprs);

    LoadedSpec spec;
    spec.sys = ImplicitSystem(n, m, std::move(F), std::move(f));

    int r = parse_int("flat", "r", sec.single("flat", "r"));
    if (r < 0) throw DimensionError("flat.r: must be >= 0");
    auto phi_exprs = sec.list("flat", "phi");
    if (static_cast<int>(phi_exprs.size()) != n)
        throw DimensionError("flat.phi: expected " + std::to_string(n) + " expressions, got " +
                             std::to_string(phi_exprs.size()));
    spec.pf = ParameterFunction(m, n, r, parse_map("flat.phi", VarContext::jet(m, r), phi_exprs));

    if (auto guard = sec.optional_single("flat", "guard")) {
        try {
            spec.guard = DomainGuard::parse(*guard, m, r);
        } catch (const SpecError&) {
            throw;
        } catch (const std::exception& e) {
            throw SpecError(std::string("key 'flat.guard': ") + e.what());
        }
    }

    auto psi_exprs = sec.list("flat", "psi");
    if (!psi_exprs.empty()) {
        if (static_cast<int>(psi_exprs.size()) != m)
            throw DimensionError("flat.psi: expected " + std::to_string(m) +
                                 " expressions, got " + std::to_string(psi_exprs.size()));
        spec.psi_order = 0;
        if (auto s = sec.optional_single("flat", "psi_order"))
            spec.psi_order = parse_int("flat", "psi_order", *s);
        if (spec.psi_order < 0) throw DimensionError("flat.psi_order: must be >= 0");
        spec.psi = parse_map("flat.psi", psi_context(n, spec.psi_order), psi_exprs);
    }

    if (sec.has("check")) {
        if (auto v = sec.optional_single("check", "samples"))
            spec.check.samples = parse_int("check", "samples", *v);
        if (auto v = sec.optional_single("check", "seed"))
            spec.check.seed = static_cast<std::uint64_t>(parse_int("check", "seed", *v));
        if (auto v = sec.optional_single("check", "scale"))
            spec.check.scale = parse_double("check", "scale", *v);
        if (auto v = sec.optional_single("check", "tol"))
            spec.check.tol = parse_double("check", "tol", *v);
    }

    if (sec.has("plan")) {
        spec.plan.present = true;
        spec.plan.start_jet =
            parse_jet_levels("plan", "start", sec.single("plan", "start"), m, r + 2);
        spec.plan.end_jet = parse_jet_levels("plan", "end", sec.single("plan", "end"), m, r + 2);
        if (auto v = sec.optional_single("plan", "T"))
            spec.plan.T = parse_double("plan", "T", *v);
        if (auto v = sec.optional_single("plan", "degree"))
            spec.plan.degree = parse_int("plan", "degree", *v);
        if (auto v = sec.optional_single("plan", "grid"))
            spec.plan.grid = parse_int("plan", "grid", *v);
    }

    spec.raw_text = text;
    return spec;
}

LoadedSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot open spec file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_spec_text(buf.str());
}

namespace {

const std::map<std::string, std::string> kCatalog = {
    {"double_integrator", R"(# Double integrator: xdot1 = x2, xdot2 = u.
[system]
n = 2
m = 1
F = p1 - x2
f = x2
f = u1

[flat]
r = 1
phi = y0_1
phi = y1_1
psi = x1
psi_order = 0

[check]
samples = 100
seed = 42
scale = 1.0
tol = 1e-8

[plan]
start = 0 0 0
end = 1 0 0
T = 1
degree = 5
grid = 200
)"},
    {"pendulum", R"(# Pendulum: xdot1 = x2, xdot2 = -sin(x1) + u.
[system]
n = 2
m = 1
F = p1 - x2
f = x2
f = -sin(x1) + u1

[flat]
r = 1
phi = y0_1
phi = y1_1
psi = x1
psi_order = 0

[check]
samples = 100
seed = 42
scale = 1.0
tol = 1e-8

[plan]
start = 0 0 0
end = 0.4 0 0
T = 1
degree = 5
grid = 200
)"},
    {"planar_mass_point", R"(# Planar mass point: positions (x1, x2), velocities (x3, x4).
[system]
n = 4
m = 2
F = p1 - x3
F = p2 - x4
f = x3
f = x4
f = u1
f = u2

[flat]
r = 1
phi = y0_1
phi = y0_2
phi = y1_1
phi = y1_2
psi = x1
psi = x2
psi_order = 0

[check]
samples = 100
seed = 42
scale = 1.0
tol = 1e-8

[plan]
start = 0 0 0 0 0 0
end = 1 0.5 0 0 0 0
T = 1
degree = 5
grid = 200
)"},
    {"unicycle", R"(# Unicycle: x3 is the heading, u1 forward speed, u2 turn rate.
# The flat chart is singular at zero velocity; the guard keeps checks away
# from it, and the equilibrium-map condition fails there.
[system]
n = 3
m = 2
F = p1*sin(x3) - p2*cos(x3)
f = u1*cos(x3)
f = u1*sin(x3)
f = u2

[flat]
r = 1
phi = y0_1
phi = y0_2
phi = atan2(y1_2, y1_1)
guard = y1_1^2 + y1_2^2 >= 0.01
psi = x1
psi = x2
psi_order = 0

[check]
samples = 100
seed = 42
scale = 1.0
tol = 1e-8

[plan]
start = 0 0 1 0 0 0
end = 2 0 1 0 0 0
T = 2
degree = 5
grid = 200
)"},
    {"broken_phi_fixture", R"(# Double integrator with a deliberately wrong candidate phi.
# The flatness PDE residual is -y1, so the pde block must fail.
[system]
n = 2
m = 1
F = p1 - x2
f = x2
f = u1

[flat]
r = 1
phi = y0_1
phi = 2*y1_1

[check]
samples = 100
seed = 42
scale = 1.0
tol = 1e-8
)"},
};

}  // namespace

std::vector<std::string> catalog_names() {
    return {"double_integrator", "pendulum", "planar_mass_point", "unicycle",
            "broken_phi_fixture"};
}

std::string catalog_spec_text(const std::string& name) {
    auto it = kCatalog.find(name);
    if (it == kCatalog.end())
        throw UnknownCatalogEntry("unknown catalog entry '" + name + "'");
    return it->second;
}

}  // namespace flatcert
