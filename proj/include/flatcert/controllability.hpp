#pragma once

#include "flatcert/jetflat.hpp"
#include "flatcert/numlin.hpp"
#include "flatcert/system.hpp"

namespace flatcert {

// Linearization xdot = A dx + B du at an equilibrium. Construction checks
// dF/dx + dF/dp A = 0 and Im B = Ker dF/dp at the point.
struct Linearization {
    MatrixXd A;
    MatrixXd B;
    EquilibriumPoint eq;
    double identity_residual = 0.0;      // ||dF/dx + dF/dp A||
    double kernel_image_residual = 0.0;  // worst of the two containments
};

struct InvariantViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MismatchedEquilibrium : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Linearization linearize(const ImplicitSystem& sys, const EquilibriumPoint& eq,
                        double tol = 1e-7);

// Controllability matrix [B, AB, .., A^{n-1}B] and its numerical rank.
MatrixXd controllability_matrix(const Linearization& lin);
RankResult kalman_rank(const Linearization& lin, double tol_rel = kDefaultRankTol);

struct StructureIdentityReport {
    double max_residual = 0.0;
    double tol = 1e-8;
    bool pass = false;
};

// The three differential identities obtained by differentiating the flatness
// PDE with respect to y_0, y_i (1<=i<=r) and y_{r+1}, at a general jet.
StructureIdentityReport check_structure_identities(const ImplicitSystem& sys,
                                                   const ParameterFunction& pf,
                                                   const JetPoint& jet, double tol = 1e-8);

// The same identities specialized to the equilibrium jet (y0, 0, .., 0),
// where the L_tau terms vanish.
StructureIdentityReport check_equilibrium_identities(const ImplicitSystem& sys,
                                                     const ParameterFunction& pf,
                                                     const VectorXd& y0, double tol = 1e-8);

struct ChainReport {
    std::vector<double> inclusion_residuals;  // index i-th entry is for y_{r-i}
    int stacked_rank = 0;                     // rank of [dphi/dy0 .. dphi/dyr]
    int kalman = 0;
    int n = 0;
    bool pass = false;
};

// Inductive inclusion chain Im dphi/dy_i in span{B, AB, .., A^{r-i}B}
// followed by the generation check rank[dphi/dy0 .. dphi/dyr] = n.
ChainReport check_chain_inclusions(const ImplicitSystem& sys, const ParameterFunction& pf,
                                   const EquilibriumPoint& eq, const VectorXd& y0,
                                   double tol = 1e-8);

}  // namespace flatcert
