#pragma once

#include <optional>
#include <vector>

#include "flatcert/numlin.hpp"
#include "flatcert/smooth_map.hpp"
#include "flatcert/system.hpp"

namespace flatcert {

// Candidate flat parameter function phi: (R^m)^{r+1} -> R^n. Its context
// holds y0..yr only, so independence of y_{r+1} is structural.
struct ParameterFunction {
    int m = 0;
    int n = 0;
    int r = 0;
    SmoothMap phi;

    ParameterFunction() = default;
    ParameterFunction(int m_, int n_, int r_, SmoothMap phi_);
};

// Tuple (y0, .., y_{r+1}) of vectors in R^m.
struct JetPoint {
    std::vector<VectorXd> levels;

    int order_count() const { return static_cast<int>(levels.size()); }
    // Concatenation of levels [0, upto] in order.
    VectorXd flatten(int upto) const;
    static JetPoint from_flat(const VectorXd& v, int m, int levels);
};

// Predicate on jets delimiting where a flat chart is checked, written as
// "expr cmp expr" over jet variables y0..y_{r+1}.
struct DomainGuard {
    enum class Cmp { Ge, Gt, Le, Lt };
    SmoothMap lhs;
    SmoothMap rhs;
    Cmp cmp = Cmp::Ge;
    std::string text;

    static DomainGuard parse(const std::string& text, int m, int r);
    bool accepts(const JetPoint& jet) const;
};

struct JetSampler {
    int n_samples = 100;
    std::uint64_t seed = 0;
    double scale = 1.0;
    std::optional<DomainGuard> guard;
};

// Seeded Gaussian jets of r+2 levels, rejection-sampled against the guard.
// rejected counts guard rejections; sampling stops after a bounded number
// of attempts.
std::vector<JetPoint> sample_jets(const ParameterFunction& pf, const JetSampler& sampler,
                                  int* rejected = nullptr);

// Generic total-derivative operator: (L_tau g)(Y) = sum_i dg/dy_i * y_{i+1},
// for g defined over jet orders 0..r, evaluated at a full jet of orders
// 0..r+1 laid out contiguously.
template <class T>
std::vector<T> lie_apply_generic(const SmoothMap& g, int m, int r, std::span<const T> full_jet) {
    const int gk = m * (r + 1);
    auto J = g.jacobian_generic<T>(full_jet.subspan(0, static_cast<std::size_t>(gk)));
    std::vector<T> out(static_cast<std::size_t>(g.output_dim()), lift<T>(0.0));
    for (int i = 0; i < g.output_dim(); ++i)
        for (int q = 0; q < gk; ++q)
            out[static_cast<std::size_t>(i)] =
                out[static_cast<std::size_t>(i)] +
                J[static_cast<std::size_t>(i)][static_cast<std::size_t>(q)] *
                    full_jet[static_cast<std::size_t>(q + m)];
    return out;
}

// L_tau phi at the jet: sum_{i=0}^{r} dphi/dy_i * y_{i+1}.
VectorXd total_derivative(const ParameterFunction& pf, const JetPoint& jet);

// F(phi(y0..yr), L_tau phi(y0..y_{r+1})).
VectorXd pde_residual(const ImplicitSystem& sys, const ParameterFunction& pf, const JetPoint& jet);

// Phi(jet) = (phi(y0..yr), L_tau phi(jet)).
std::pair<VectorXd, VectorXd> phi_big(const ParameterFunction& pf, const JetPoint& jet);

// Jacobian of Phi, (2n) x (m(r+2)).
MatrixXd phi_big_jacobian(const ParameterFunction& pf, const JetPoint& jet);

// Jacobian of y ↦ L_tau g(y), l x (m(r+2)), for g over jet orders 0..r.
MatrixXd lie_jacobian(const SmoothMap& g, int m, int r, const JetPoint& jet);

// L_tau applied entrywise to the Jacobian of g: directional derivative of
// dg along the Cartan shift (y1, .., y_{r+1}); l x (m(r+1)).
MatrixXd lie_of_jacobian(const SmoothMap& g, int m, int r, const JetPoint& jet);

struct PdeReport {
    int samples = 0;
    int rejected_by_guard = 0;
    int domain_errors = 0;
    double max_residual = 0.0;
    double tol = 1e-8;
    bool guarded = false;
    bool pass = false;
};

PdeReport check_parameter_function(const ImplicitSystem& sys, const ParameterFunction& pf,
                                   const JetSampler& sampler, double tol = 1e-8);

struct SubmersionReport {
    int samples = 0;
    int domain_errors = 0;
    double max_on_variety_residual = 0.0;
    int min_rank_dPhi = 0;
    int required_rank = 0;  // n + m
    int min_rank_dphi = 0;
    int required_rank_dphi = 0;  // n
    bool pass = false;
};

SubmersionReport check_submersion(const ImplicitSystem& sys, const ParameterFunction& pf,
                                  const JetSampler& sampler, double tol_res = 1e-8,
                                  double tol_rank = kDefaultRankTol);

struct EquilibriumMapReport {
    int samples = 0;
    int domain_errors = 0;
    int guard_excluded = 0;
    double max_F_residual = 0.0;
    int min_rank = 0;
    int required_rank = 0;  // m
    double min_separation_ratio = 0.0;
    int inversion_targets = 0;
    int inversion_successes = 0;
    std::string failure_cause;
    // Pass: all checks ok. Fail: a check failed or phi raised a DomainError
    // at an equilibrium jet. Excluded: the guard rules out the equilibrium
    // jets, so the condition could not be evaluated.
    enum class Status { Pass, Fail, Excluded } status = Status::Fail;
};

EquilibriumMapReport check_equilibrium_map(const ImplicitSystem& sys, const ParameterFunction& pf,
                                           const JetSampler& sampler_y0, double tol = 1e-8);

struct SurjectivityReport {
    int targets = 0;
    int restarts = 0;
    int successes = 0;
    double success_fraction = 0.0;
    double worst_success_residual = 0.0;
};

// Gauss-Newton inversion of Phi at each variety target from seeded initial
// jets. Local evidence only, not a proof.
SurjectivityReport surjectivity_probe(const ImplicitSystem& sys, const ParameterFunction& pf,
                                      const VarietySample& targets, int restarts,
                                      std::uint64_t seed, double tol = 1e-8);

}  // namespace flatcert
