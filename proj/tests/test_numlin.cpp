#include <doctest.h>

#include "flatcert/numlin.hpp"
#include "flatcert/rng.hpp"

using namespace flatcert;

namespace {

VectorXd vec(std::initializer_list<double> v) {
    VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

}  // namespace

TEST_CASE("svd_rank basics") {
    CHECK(svd_rank(MatrixXd::Zero(3, 3)).rank == 0);

    MatrixXd nilpotent(2, 2);
    nilpotent << 0, 1, 0, 0;
    RankResult r = svd_rank(nilpotent);
    CHECK(r.rank == 1);
    CHECK(r.singular_values(0) == doctest::Approx(1.0));
    CHECK(r.singular_values(1) == doctest::Approx(0.0));

    // dPhi of the double integrator is constant.
    MatrixXd dphi(4, 3);
    dphi << 1, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 1;
    CHECK(svd_rank(dphi).rank == 3);
}

TEST_CASE("svd_rank invariants and errors") {
    GaussianRng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        MatrixXd M(3, 4);
        for (int i = 0; i < M.size(); ++i) M(i / 4, i % 4) = rng.gaussian();
        CHECK(svd_rank(M).rank == svd_rank(M.transpose()).rank);
    }
    MatrixXd bad(1, 1);
    bad << std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(svd_rank(bad), NonFiniteError);
    CHECK_THROWS_AS(svd_rank(MatrixXd::Identity(2, 2), 2.0), DimensionError);
}

TEST_CASE("orthonormal_basis") {
    MatrixXd M(2, 1);
    M << 0, 2;
    MatrixXd Q = orthonormal_basis(M);
    REQUIRE(Q.cols() == 1);
    CHECK(std::abs(Q(1, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(Q(0, 0)) == doctest::Approx(0.0));

    Q = orthonormal_basis(MatrixXd::Identity(4, 4));
    CHECK(Q.cols() == 4);
    CHECK((Q.transpose() * Q - MatrixXd::Identity(4, 4)).norm() <= 1e-12);

    // Construct-then-verify: random rank-2 matrix from outer products.
    GaussianRng rng(5);
    MatrixXd R = rng.gaussian_vector(4) * rng.gaussian_vector(3).transpose() +
                 rng.gaussian_vector(4) * rng.gaussian_vector(3).transpose();
    Q = orthonormal_basis(R);
    CHECK(Q.cols() == 2);
    CHECK((Q * (Q.transpose() * R) - R).norm() <= 1e-10);
    // Projector idempotence.
    MatrixXd P = Q * Q.transpose();
    CHECK((P * P - P).norm() <= 1e-12);
}

TEST_CASE("subspace_contains") {
    MatrixXd K(2, 1);
    K << 0, 1;
    auto [ok, res] = subspace_contains(K, K);
    CHECK(ok);
    CHECK(res == doctest::Approx(0.0));

    MatrixXd M(2, 1);
    M << 1, 0;
    auto [ok2, res2] = subspace_contains(K, M);
    CHECK_FALSE(ok2);
    CHECK(res2 == doctest::Approx(1.0));

    // Double integrator: [B AB] contains dphi/dy0.
    MatrixXd KB(2, 2);
    KB << 0, 1, 1, 0;
    CHECK(subspace_contains(KB, M).first);

    // Closure under right-multiplication.
    GaussianRng rng(9);
    MatrixXd K3(4, 2);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 2; ++j) K3(i, j) = rng.gaussian();
    MatrixXd X(2, 3);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j) X(i, j) = rng.gaussian();
    CHECK(subspace_contains(K3, K3 * X).first);
}

TEST_CASE("gauss_newton_solve on linear systems") {
    SmoothMap lin = SmoothMap::parse(VarContext({"a", "b"}), {"2*a + b", "a - b"});
    SolveResult sol = gauss_newton_solve(lin, vec({3.0, 0.0}), vec({0.0, 0.0}));
    CHECK(sol.converged);
    CHECK(sol.iterations <= 2);
    CHECK(sol.residual_norm <= 1e-12);
    CHECK(sol.solution(0) == doctest::Approx(1.0));
    CHECK(sol.solution(1) == doctest::Approx(1.0));
}

TEST_CASE("gauss_newton_solve pendulum input recovery") {
    // Solve f(x,u) = xdot for u with x fixed, f = (x2, -sin x1 + u).
    SmoothMap f_u = SmoothMap::parse(VarContext({"u1"}),
                                     {"0.2", "-sin(0.5235987755982988) + u1"});
    VectorXd target = vec({0.2, 0.5});
    SolveResult sol = gauss_newton_solve(f_u, target, vec({0.0}));
    CHECK(sol.converged);
    CHECK(sol.solution(0) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("gauss_newton_solve inverts the double-integrator Phi") {
    // Phi(y0,y1,y2) = ((y0, y1), (y1, y2)); consistent target.
    SmoothMap Phi = SmoothMap::parse(VarContext({"y0", "y1", "y2"}), {"y0", "y1", "y1", "y2"});
    SolveResult sol = gauss_newton_solve(Phi, vec({0.3, 0.7, 0.7, -0.2}), vec({0, 0, 0}));
    CHECK(sol.converged);
    CHECK(sol.solution(0) == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(sol.solution(1) == doctest::Approx(0.7).epsilon(1e-9));
    CHECK(sol.solution(2) == doctest::Approx(-0.2).epsilon(1e-9));
}

TEST_CASE("solve_linear") {
    CHECK((solve_linear(MatrixXd::Identity(3, 3), vec({1, 2, 3})) - vec({1, 2, 3})).norm() == 0.0);

    MatrixXd A(2, 2);
    A << 2, 0, 0, 4;
    VectorXd x = solve_linear(A, vec({2, 8}));
    CHECK(x(0) == doctest::Approx(1.0));
    CHECK(x(1) == doctest::Approx(2.0));

    MatrixXd S(2, 2);
    S << 1, 2, 2, 4;
    CHECK_THROWS_AS(solve_linear(S, vec({1, 1})), SingularMatrixError);
}

TEST_CASE("solve_linear quintic rest-to-rest system") {
    // Derivative orders 0..2 at t=0 and t=1 for a degree-5 polynomial,
    // boundary (0,0,0) -> (1,0,0).
    MatrixXd A(6, 6);
    A << 1, 0, 0, 0, 0, 0,
         0, 1, 0, 0, 0, 0,
         0, 0, 2, 0, 0, 0,
         1, 1, 1, 1, 1, 1,
         0, 1, 2, 3, 4, 5,
         0, 0, 2, 6, 12, 20;
    VectorXd b = vec({0, 0, 0, 1, 0, 0});
    VectorXd c = solve_linear(A, b);
    VectorXd expected = vec({0, 0, 0, 10, -15, 6});
    CHECK((c - expected).lpNorm<Eigen::Infinity>() <= 1e-10);
}
