#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "jtchain/meanfield.hpp"
#include "jtchain/spinwave.hpp"

namespace jt {

enum class EDBasis {
    BareModes,      // truncate collective-mode Fock spaces as they are
    DisplacedModes  // pre-displace the lowest mode by the mean-field alpha_0
};

/// Brute-force diagonalization setup. The Hilbert space is
/// 2^N * (cutoff+1)^N; a dimension guard keeps runs desk-sized.
struct EDConfig {
    ModelParams params;
    int fock_cutoff = 8;
    EDBasis basis = EDBasis::BareModes;
};

/// Assembled sparse Hamiltonian in the (spin z-basis) x (mode occupation)
/// product space, together with the real mode basis it was built in.
struct EDHamiltonian {
    Eigen::SparseMatrix<double> h;
    int n_sites = 0;
    int levels = 0; // cutoff + 1 per mode
    long dim = 0;
    Eigen::VectorXd mode_energies;
    Eigen::MatrixXd modes;
    double displacement = 0.0; // lowest-mode shift (DisplacedModes only)
    EDBasis basis = EDBasis::BareModes;
    ModelParams params;
};

/// Ground-state expectation values. `sz_mean` is reported alongside the
/// parity argument that forces it to vanish: the nondegenerate ground
/// state is even under sigma^z -> -sigma^z, a -> -a.
struct EDResult {
    double energy = 0.0;
    Eigen::VectorXd sx_mean;             // <sigma^x_j>
    Eigen::VectorXd sz_mean;             // <sigma^z_j>
    Eigen::MatrixXd zz_corr;             // <sigma^z_j sigma^z_l>
    Eigen::VectorXd boson_occupation;    // <a_n^dagger a_n>
    Eigen::VectorXcd boson_displacement; // <a_n>
    bool cutoff_converged = false;
    int cutoff_used = 0;
};

struct CutoffTable {
    std::vector<int> cutoffs;
    std::vector<double> energies;
    bool converged = false;
};

/// Mean-field vs exact ground truth on one parameter point.
struct ComparisonReport {
    ModelParams params;
    double e_exact = 0.0;
    double e_mf = 0.0;
    double gap = 0.0; // e_mf - e_exact, variational
    Eigen::VectorXd sx_mean;
    Eigen::VectorXd sz_mean;
    double sin_theta = 0.0;
    Eigen::MatrixXd zz_corr;
    double cos2_theta = 0.0;
    Eigen::VectorXd boson_occupation;
    Eigen::VectorXd alpha_sq;
    Eigen::VectorXcd boson_displacement;
    double sw_spin_occupancy = 0.0; // F_b per atom, Gaussian prediction
    double ed_spin_occupancy = 0.0; // (1 + <sigma^x>)/2, exact
    int cutoff_used = 0;
    bool cutoff_converged = false;
};

/// Assemble H in the collective-mode occupation basis. Rejects N > 3,
/// cutoff < 1 and dimensions beyond 10^6.
EDHamiltonian build_full_hamiltonian(const EDConfig& cfg);

/// Lowest eigenpair: dense solve for small dimensions, restarted Lanczos
/// beyond (tolerance 1e-10, deterministic all-ones start, at most 10^4
/// matrix applications). In the bare basis the returned vector is
/// projected onto the even sector of the global parity
/// (sigma^z -> -sigma^z, a -> -a), which the exact ground state occupies;
/// this keeps parity observables clean even under the quasi-degeneracy of
/// the ordered phase.
std::pair<double, Eigen::VectorXd> ground_state(const EDHamiltonian& ham);

/// Force a specific eigensolver path (method cross-checks).
std::pair<double, Eigen::VectorXd> ground_state_dense(const EDHamiltonian& ham);
std::pair<double, Eigen::VectorXd> ground_state_iterative(const EDHamiltonian& ham);

/// Expectation values in the original (undisplaced) frame.
EDResult observables(const Eigen::VectorXd& state, const EDHamiltonian& ham);

/// Ground energies along ascending cutoffs; converged once successive
/// energies differ by less than 1e-8.
CutoffTable cutoff_convergence(const EDConfig& cfg, const std::vector<int>& cutoffs);

/// Run ED with an adaptive cutoff ladder (capped at cfg.fock_cutoff) and
/// compare against the variational solution and the Gaussian fluctuation
/// prediction. Throws NonConvergence when the ladder fails to converge.
ComparisonReport exact_vs_meanfield(const EDConfig& cfg);

} // namespace jt
