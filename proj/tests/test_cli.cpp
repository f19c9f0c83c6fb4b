#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "flatcert/runner.hpp"
#include "flatcert/specfile.hpp"

using namespace flatcert;

namespace {

#ifndef FLATCERT_BIN
#error "FLATCERT_BIN must point at the flatcert executable"
#endif

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

int run_cli(const std::string& args, const std::string& stdout_path) {
    std::string cmd = std::string(FLATCERT_BIN) + " " + args + " > " + stdout_path + " 2>&1";
    int status = std::system(cmd.c_str());
#ifdef _WIN32
    return status;
#else
    return WEXITSTATUS(status);
#endif
}

std::string write_temp_spec(const std::string& name, const std::string& text) {
    std::string path = "cli_tmp_" + name + ".flat";
    std::ofstream out(path, std::ios::binary);
    out << text;
    return path;
}

std::string with_flat_key(std::string text, const std::string& line) {
    auto pos = text.find("[flat]");
    REQUIRE(pos != std::string::npos);
    pos = text.find('\n', pos);
    text.insert(pos + 1, line + "\n");
    return text;
}

}  // namespace

TEST_CASE("parse_spec_text rejects malformed specs with located errors") {
    auto base = catalog_spec_text("double_integrator");

    CHECK_THROWS_AS(parse_spec_text(""), SpecError);
    CHECK_THROWS_AS(parse_spec_text("[system]\nn = 2\n"), SpecError);

    // Unknown key in a section.
    CHECK_THROWS_WITH_AS(parse_spec_text(base + "\nbogus = 1\n"),
                         doctest::Contains("bogus"), SpecError);

    // phi arity mismatch: n components required.
    std::string bad_phi = base;
    auto pos = bad_phi.find("phi = y1_1");
    REQUIRE(pos != std::string::npos);
    bad_phi.erase(pos, bad_phi.find('\n', pos) - pos + 1);
    CHECK_THROWS_WITH_AS(parse_spec_text(bad_phi), doctest::Contains("phi"), DimensionError);

    // Guard referencing a variable beyond order r+1.
    std::string bad_guard = with_flat_key(base, "guard = y3_1 >= 0.1");
    CHECK_THROWS_AS(parse_spec_text(bad_guard), SpecError);
}

TEST_CASE("guards over jet orders up to r+1 are accepted") {
    std::string text = with_flat_key(catalog_spec_text("double_integrator"), "guard = y2_1 >= -100");
    LoadedSpec spec = parse_spec_text(text);
    REQUIRE(spec.guard.has_value());
    JetPoint jet;
    jet.levels = {VectorXd::Zero(1), VectorXd::Zero(1), VectorXd::Zero(1)};
    CHECK(spec.guard->accepts(jet));
}

TEST_CASE("psi context names x and derivative slots") {
    VarContext ctx = psi_context(2, 1);
    REQUIRE(ctx.size() == 4);
    CHECK(ctx.name(0) == "x1");
    CHECK(ctx.name(1) == "x2");
    CHECK(ctx.name(2) == "d1x1");
    CHECK(ctx.name(3) == "d1x2");
}

TEST_CASE("catalog listing and retrieval") {
    auto names = catalog_names();
    REQUIRE(names.size() == 5);
    for (const auto& name : names) {
        // Every entry round-trips through the parser.
        LoadedSpec spec = parse_spec_text(catalog_spec_text(name));
        CHECK(spec.sys.n >= 1);
    }
    CHECK_THROWS_AS(catalog_spec_text("no_such_system"), UnknownCatalogEntry);
}

TEST_CASE("cli catalog lists entries and writes spec files") {
    CHECK(run_cli("catalog", "cli_out_catalog.txt") == 0);
    std::string listing = slurp("cli_out_catalog.txt");
    for (const auto& name : catalog_names()) CHECK(listing.find(name) != std::string::npos);

    CHECK(run_cli("catalog double_integrator", "cli_out_emit.txt") == 0);
    CHECK(slurp("double_integrator.flat") == catalog_spec_text("double_integrator"));

    CHECK(run_cli("catalog no_such_system", "cli_out_bad.txt") == 2);
}

TEST_CASE("cli check exit codes across the catalog") {
    struct Case {
        const char* name;
        int exit_code;
    };
    const Case cases[] = {
        {"double_integrator", 0}, {"pendulum", 0},         {"planar_mass_point", 0},
        {"unicycle", 1},          {"broken_phi_fixture", 1},
    };
    for (const auto& c : cases) {
        CAPTURE(c.name);
        std::string path = write_temp_spec(c.name, catalog_spec_text(c.name));
        CHECK(run_cli("check " + path, "cli_out_check.txt") == c.exit_code);
    }
}

TEST_CASE("cli check on a missing or malformed spec exits 2") {
    CHECK(run_cli("check does_not_exist.flat", "cli_out_missing.txt") == 2);
    std::string path = write_temp_spec("malformed", "[system]\nn = oops\n");
    CHECK(run_cli("check " + path, "cli_out_malformed.txt") == 2);
}

TEST_CASE("cli check --json emits a stable schema") {
    for (const auto& name : catalog_names()) {
        CAPTURE(name);
        std::string path = write_temp_spec(name, catalog_spec_text(name));
        run_cli("check " + path + " --json cli_rep.json", "cli_out_json.txt");
        auto rep = nlohmann::json::parse(slurp("cli_rep.json"));
        CHECK(rep.at("schema_version") == 1);
        CHECK(rep.at("tool_version") == "0.1.0");
        CHECK(rep.at("spec_hash").is_string());
        CHECK(rep.at("overall").is_string());
        const auto& blocks = rep.at("blocks");
        REQUIRE(blocks.is_array());
        const char* mandatory[] = {"consistency",          "pde",
                                   "submersion",           "dphi-rank",
                                   "equilibrium-map",      "equilibrium-identities",
                                   "chain-inclusions",     "kalman"};
        for (const char* want : mandatory) {
            bool found = false;
            for (const auto& b : blocks) {
                if (b.at("name") == want) {
                    found = true;
                    CHECK(b.at("mandatory") == true);
                    CHECK(b.at("status").is_string());
                }
            }
            CAPTURE(want);
            CHECK(found);
        }
        for (const char* info : {"structure-identities", "surjectivity-probe"}) {
            for (const auto& b : blocks)
                if (b.at("name") == info) CHECK(b.at("mandatory") == false);
        }
    }
}

TEST_CASE("cli check verdicts in JSON match exit semantics") {
    std::string path = write_temp_spec("di", catalog_spec_text("double_integrator"));
    run_cli("check " + path + " --json cli_rep_ok.json", "cli_out_v1.txt");
    auto ok = nlohmann::json::parse(slurp("cli_rep_ok.json"));
    CHECK(ok.at("overall") == "CRITERION SATISFIED");

    path = write_temp_spec("uni", catalog_spec_text("unicycle"));
    run_cli("check " + path + " --json cli_rep_uni.json", "cli_out_v2.txt");
    auto uni = nlohmann::json::parse(slurp("cli_rep_uni.json"));
    CHECK(uni.at("overall") == "CRITERION FAILED");

    // Guarded-but-evaluable equilibria are excluded, not failed.
    std::string guarded =
        with_flat_key(catalog_spec_text("double_integrator"), "guard = y1_1^2 >= 0.01");
    path = write_temp_spec("guarded", guarded);
    int code = run_cli("check " + path + " --json cli_rep_g.json", "cli_out_v3.txt");
    CHECK(code == 3);
    auto g = nlohmann::json::parse(slurp("cli_rep_g.json"));
    CHECK(g.at("overall") == "INCONCLUSIVE");
}

TEST_CASE("cli check output is byte-identical across runs") {
    std::string path = write_temp_spec("det", catalog_spec_text("unicycle"));
    run_cli("check " + path + " --json cli_det_a.json", "cli_out_d1.txt");
    run_cli("check " + path + " --json cli_det_b.json", "cli_out_d2.txt");
    std::string a = slurp("cli_det_a.json");
    REQUIRE_FALSE(a.empty());
    CHECK(a == slurp("cli_det_b.json"));
    CHECK(slurp("cli_out_d1.txt") == slurp("cli_out_d2.txt"));
}

TEST_CASE("cli check respects sampling overrides") {
    std::string path = write_temp_spec("ovr", catalog_spec_text("double_integrator"));
    run_cli("check " + path + " --samples 17 --seed 9 --json cli_ovr_a.json", "cli_out_o1.txt");
    run_cli("check " + path + " --samples 17 --seed 9 --json cli_ovr_b.json", "cli_out_o2.txt");
    run_cli("check " + path + " --samples 17 --seed 10 --json cli_ovr_c.json", "cli_out_o3.txt");
    auto a = nlohmann::json::parse(slurp("cli_ovr_a.json"));
    auto b = nlohmann::json::parse(slurp("cli_ovr_b.json"));
    auto c = nlohmann::json::parse(slurp("cli_ovr_c.json"));
    CHECK(a == b);
    CHECK(a.at("overall") == c.at("overall"));
}

TEST_CASE("cli plan writes csv and json") {
    std::string path = write_temp_spec("plan", catalog_spec_text("double_integrator"));
    int code =
        run_cli("plan " + path + " --csv cli_traj.csv --json cli_plan.json", "cli_out_p1.txt");
    CHECK(code == 0);

    std::string csv = slurp("cli_traj.csv");
    REQUIRE_FALSE(csv.empty());
    std::string header = csv.substr(0, csv.find('\n'));
    CHECK(header.find("t,") == 0);
    CHECK(header.find("x1") != std::string::npos);
    CHECK(header.find("u1") != std::string::npos);
    CHECK(header.find("residual") != std::string::npos);

    auto plan = nlohmann::json::parse(slurp("cli_plan.json"));
    CHECK(plan.at("pass") == true);
    CHECK(plan.at("max_residual").get<double>() <= 1e-8);
}

TEST_CASE("cli plan fails on a spec without a plan section") {
    std::string path = write_temp_spec("noplan", catalog_spec_text("broken_phi_fixture"));
    CHECK(run_cli("plan " + path, "cli_out_p2.txt") == 2);
}
