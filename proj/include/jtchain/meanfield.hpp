#pragma once

#include <Eigen/Dense>

#include "jtchain/lattice.hpp"

namespace jt {

enum class Phase { Disordered, Ordered, Critical };

std::string to_string(Phase p);

/// Variational product-state solution: spin angles theta_j (sin theta <= 0,
/// cos theta >= 0 branch; the -cos partner is degenerate) and coherent
/// displacements alpha_n per collective mode.
struct MeanFieldSolution {
    Eigen::VectorXd thetas;
    Eigen::VectorXcd alphas;
    double energy = 0.0;
    Phase phase = Phase::Disordered;
    bool converged = false;
    long iterations = 0;

    double sin_theta() const { return std::sin(thetas[0]); } // homogeneous use
    double cos_theta() const { return std::cos(thetas[0]); }
};

/// Closed-form periodic solution: sin theta = -Omega/(2J) with
/// J = 2 g^2 / omega0 when Omega <= 2J, else sin theta = -1;
/// alpha_0 = (g/omega0) sqrt(N) cos theta, higher modes undisplaced.
/// Phase is Critical inside the |Omega - 2J| < 1e-12 band.
MeanFieldSolution solve_pbc(const ModelParams& params);

/// Damped fixed-point iteration on cos theta_j for arbitrary lattices
/// (mixing 0.5). Restarts from the closed-form angle, the fully ordered
/// and fully disordered states and five seeded random vectors, plus the
/// caller's `init` angles when nonempty; the lowest-energy converged
/// fixed point wins. Throws NonConvergence when no restart converges.
MeanFieldSolution solve_self_consistent(const BosonModes& modes,
                                        const ModelParams& params,
                                        const Eigen::VectorXd& init = Eigen::VectorXd(),
                                        double tol = 1e-12,
                                        long max_iter = 100000);

/// Variational energy functional evaluated exactly as written:
/// sum_n omega_n |alpha_n|^2
///   - g sum_{j,n} cos theta_j (M*_{j,n} alpha*_n + M_{j,n} alpha_n)
///   + (Omega/2) sum_j sin theta_j.
double mean_field_energy(const BosonModes& modes, const ModelParams& params,
                         const Eigen::VectorXd& thetas,
                         const Eigen::VectorXcd& alphas);

/// Same functional on precomputed (cos, sin) vectors; avoids trig
/// re-evaluation so symmetry checks hold bit-exactly.
double mean_field_energy_cs(const BosonModes& modes, const ModelParams& params,
                            const Eigen::VectorXd& cos_theta,
                            const Eigen::VectorXd& sin_theta,
                            const Eigen::VectorXcd& alphas);

/// g_c = sqrt(Omega * omega0) / 2, independent of t and N.
double critical_coupling(const ModelParams& params);

/// Max-norm residual of the coupled variational equations (both lines;
/// the angle equation in its polynomial form, free of the cot singularity).
double variational_residual(const BosonModes& modes, const ModelParams& params,
                            const MeanFieldSolution& sol);

} // namespace jt
