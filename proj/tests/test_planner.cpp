#include <doctest.h>

#include <cmath>

#include "flatcert/planner.hpp"
#include "flatcert/runner.hpp"
#include "flatcert/specfile.hpp"

using namespace flatcert;

namespace {

LoadedSpec catalog(const std::string& name) {
    return parse_spec_text(catalog_spec_text(name));
}

VectorXd vec(std::initializer_list<double> v) {
    VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

std::vector<VectorXd> jet1(std::initializer_list<double> levels) {
    std::vector<VectorXd> out;
    for (double v : levels) out.push_back(vec({v}));
    return out;
}

}  // namespace

TEST_CASE("fit_flat_path quintic rest-to-rest coefficients") {
    PolyPath path = fit_flat_path(jet1({0, 0, 0}), jet1({1, 0, 0}), 1.0, 5);
    REQUIRE(path.coeffs.size() == 1);
    VectorXd expected = vec({0, 0, 0, 10, -15, 6});
    CHECK((path.coeffs[0] - expected).lpNorm<Eigen::Infinity>() <= 1e-10);

    JetPoint mid = eval_flat_jet(path, 0.5);
    CHECK(mid.levels[0](0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(mid.levels[1](0) == doctest::Approx(1.875).epsilon(1e-12));
    CHECK(mid.levels[2](0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("fit_flat_path reproduces boundary jets for several horizons") {
    for (double T : {0.5, 1.0, 2.0}) {
        auto start = jet1({0.2, -0.1, 0.4});
        auto end = jet1({1.3, 0.6, -0.2});
        PolyPath path = fit_flat_path(start, end, T, 5);
        JetPoint j0 = eval_flat_jet(path, 0.0);
        JetPoint jT = eval_flat_jet(path, T);
        for (int i = 0; i < 3; ++i) {
            CHECK(j0.levels[i](0) == doctest::Approx(start[i](0)).epsilon(1e-9));
            CHECK(jT.levels[i](0) == doctest::Approx(end[i](0)).epsilon(1e-9));
        }
    }
}

TEST_CASE("fit_flat_path start == end gives a constant path") {
    auto jet = jet1({0.7, 0, 0});
    PolyPath path = fit_flat_path(jet, jet, 1.5, 5);
    for (double t : {0.0, 0.3, 0.9, 1.5}) {
        JetPoint j = eval_flat_jet(path, t);
        CHECK(j.levels[0](0) == doctest::Approx(0.7).epsilon(1e-12));
        CHECK(std::abs(j.levels[1](0)) <= 1e-10);
        CHECK(std::abs(j.levels[2](0)) <= 1e-10);
    }
}

TEST_CASE("fit_flat_path higher degree still meets the boundary") {
    auto start = jet1({0, 0, 0});
    auto end = jet1({1, 0, 0});
    PolyPath path = fit_flat_path(start, end, 1.0, 9);
    JetPoint jT = eval_flat_jet(path, 1.0);
    CHECK(jT.levels[0](0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(jT.levels[1](0)) <= 1e-8);
}

TEST_CASE("eval_flat_jet rejects t outside the horizon") {
    PolyPath path = fit_flat_path(jet1({0, 0, 0}), jet1({1, 0, 0}), 1.0, 5);
    CHECK_THROWS_AS(eval_flat_jet(path, -0.1), OutOfHorizon);
    CHECK_THROWS_AS(eval_flat_jet(path, 1.1), OutOfHorizon);
}

TEST_CASE("synthesize_trajectory double integrator has zero residual") {
    auto spec = catalog("double_integrator");
    PolyPath path = fit_flat_path(spec.plan.start_jet, spec.plan.end_jet, spec.plan.T, 5);
    Trajectory traj = synthesize_trajectory(spec.sys, spec.pf, path, 100);
    REQUIRE(traj.nodes.size() == 101);
    CHECK(traj.domain_errors == 0);
    CHECK(traj.max_residual <= 1e-12);
    // x = (y, ydot) exactly.
    for (const auto& node : traj.nodes) {
        CHECK(node.x(0) == node.jet.levels[0](0));
        CHECK(node.x(1) == node.jet.levels[1](0));
    }
}

TEST_CASE("broken phi produces a nonzero synthesis residual") {
    auto broken = catalog("broken_phi_fixture");
    PolyPath path = fit_flat_path(jet1({0, 0, 0}), jet1({1, 0, 0}), 1.0, 5);
    Trajectory traj = synthesize_trajectory(broken.sys, broken.pf, path, 100);
    // phi = (y, 2 ydot): F(x, xdot) = xdot_1 - x_2 = ydot - 2 ydot = -ydot,
    // so the worst residual is max |ydot| = 15/8 for the unit quintic.
    CHECK(traj.max_residual == doctest::Approx(1.875).epsilon(1e-9));
}

TEST_CASE("recover_inputs double integrator gives u = yddot") {
    auto spec = catalog("double_integrator");
    PolyPath path = fit_flat_path(spec.plan.start_jet, spec.plan.end_jet, spec.plan.T, 5);
    Trajectory traj = synthesize_trajectory(spec.sys, spec.pf, path, 100);
    recover_inputs(spec.sys, traj);
    for (const auto& node : traj.nodes) {
        CHECK(node.input_converged);
        CHECK(node.u(0) == doctest::Approx(node.jet.levels[2](0)).epsilon(1e-9));
    }
}

TEST_CASE("recover_inputs pendulum endpoints") {
    auto spec = catalog("pendulum");
    PolyPath path = fit_flat_path(spec.plan.start_jet, spec.plan.end_jet, spec.plan.T, 5);
    Trajectory traj = synthesize_trajectory(spec.sys, spec.pf, path, 200);
    recover_inputs(spec.sys, traj);
    CHECK(traj.nodes.front().u(0) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(traj.nodes.back().u(0) == doctest::Approx(std::sin(0.4)).epsilon(1e-9));
}

TEST_CASE("recover_inputs unicycle closed forms") {
    auto spec = catalog("unicycle");
    PolyPath path = fit_flat_path(spec.plan.start_jet, spec.plan.end_jet, spec.plan.T,
                                  2 * spec.pf.r + 3);
    Trajectory traj = synthesize_trajectory(spec.sys, spec.pf, path, 200);
    CHECK(traj.domain_errors == 0);
    recover_inputs(spec.sys, traj);
    for (const auto& node : traj.nodes) {
        REQUIRE(node.input_converged);
        const VectorXd& v = node.jet.levels[1];
        const VectorXd& a = node.jet.levels[2];
        double speed = v.norm();
        double omega = (v(0) * a(1) - v(1) * a(0)) / (speed * speed);
        CHECK(node.u(0) == doctest::Approx(speed).epsilon(1e-7));
        CHECK(node.u(1) == doctest::Approx(omega).epsilon(1e-6));
    }
}

TEST_CASE("roundtrip_check recovers the flat output for psi = x1") {
    auto spec = catalog("double_integrator");
    REQUIRE(spec.psi.has_value());
    PolyPath path = fit_flat_path(spec.plan.start_jet, spec.plan.end_jet, spec.plan.T, 5);
    Trajectory traj = synthesize_trajectory(spec.sys, spec.pf, path, 200);
    RoundtripReport rep = roundtrip_check(*spec.psi, spec.psi_order, traj, path);
    CHECK(rep.pass);
    CHECK(rep.max_error <= 1e-12);  // order 0: no finite differences involved
}

TEST_CASE("roundtrip_check needs a fine enough grid") {
    auto spec = catalog("double_integrator");
    // Equals x1 (= y) along trajectories but exercises the FD x-jet path.
    SmoothMap psi = SmoothMap::parse(psi_context(2, 1), {"x1 + d1x1 - x2"});
    PolyPath path = fit_flat_path(spec.plan.start_jet, spec.plan.end_jet, spec.plan.T, 5);
    Trajectory coarse = synthesize_trajectory(spec.sys, spec.pf, path, 20);
    CHECK_THROWS_AS(roundtrip_check(psi, 1, coarse, path), InsufficientGrid);

    Trajectory fine = synthesize_trajectory(spec.sys, spec.pf, path, 400);
    RoundtripReport rep = roundtrip_check(psi, 1, fine, path);
    CHECK(rep.pass);
    CHECK(rep.max_error <= 1e-4);
}

TEST_CASE("run_plan passes on all catalog plan sections") {
    for (const char* name : {"double_integrator", "pendulum", "planar_mass_point", "unicycle"}) {
        CAPTURE(name);
        auto spec = catalog(name);
        REQUIRE(spec.plan.present);
        PlanRunResult res = run_plan(spec);
        CHECK(res.pass);
        CHECK(res.max_residual <= 1e-8);
        CHECK(res.inputs_converged);
        // Endpoint states match phi of the boundary jets.
        JetPoint sj, ej;
        sj.levels = spec.plan.start_jet;
        ej.levels = spec.plan.end_jet;
        VectorXd xs = eval_map(spec.pf.phi, sj.flatten(spec.pf.r));
        VectorXd xe = eval_map(spec.pf.phi, ej.flatten(spec.pf.r));
        CHECK((res.traj.nodes.front().x - xs).norm() <= 1e-9);
        CHECK((res.traj.nodes.back().x - xe).norm() <= 1e-9);
    }
}

TEST_CASE("rest-to-rest plans connect equilibria") {
    auto spec = catalog("pendulum");
    PlanRunResult res = run_plan(spec);
    const auto& first = res.traj.nodes.front();
    const auto& last = res.traj.nodes.back();
    CHECK(spec.sys.eval_f(first.x, first.u).norm() <= 1e-8);
    CHECK(spec.sys.eval_f(last.x, last.u).norm() <= 1e-8);
}

TEST_CASE("synthesis residual is grid independent for exact paths") {
    auto spec = catalog("planar_mass_point");
    PolyPath path = fit_flat_path(spec.plan.start_jet, spec.plan.end_jet, spec.plan.T, 5);
    for (int grid : {50, 100, 400}) {
        Trajectory traj = synthesize_trajectory(spec.sys, spec.pf, path, grid);
        CHECK(traj.max_residual <= 1e-12);
    }
}
