#pragma once

#include <vector>

#include <Eigen/Dense>

#include "jtchain/model.hpp"

namespace jt {

/// Boson-sector one-body Hamiltonian: local energies on the diagonal
/// are kept separate from the hopping matrix, whose diagonal is zero.
struct HoppingMatrix {
    Eigen::VectorXd local_energies; // omega_j
    Eigen::MatrixXd hop;            // t_{j,l}, symmetric, zero diagonal
    Boundary boundary = Boundary::Custom;

    int n() const { return static_cast<int>(local_energies.size()); }
    /// Full one-body matrix t_{j,l} + omega_j delta_{j,l}.
    Eigen::MatrixXd full() const {
        Eigen::MatrixXd a = hop;
        a.diagonal() += local_energies;
        return a;
    }
};

/// Collective modes of the boson sector. Columns of `amplitudes` are the
/// mode eigenvectors M_{j,n} (site row, mode column), unitary as a matrix.
/// Modes are sorted by energy ascending; degenerate plane-wave pairs keep
/// the analytic index order. `mode_index` records the analytic mode number
/// n per column (identity ordering for non-periodic lattices).
struct BosonModes {
    Eigen::VectorXd energies;    // omega_bar_n, ascending
    Eigen::MatrixXcd amplitudes; // M_{j,n}
    Boundary boundary = Boundary::Custom;
    std::vector<int> mode_index;

    int n() const { return static_cast<int>(energies.size()); }
};

/// Real orthogonal mode basis of the same boson sector (gauge: largest
/// magnitude component of each eigenvector positive). Shared by the exact
/// diagonalization backend and the general quadratic-form builder, where
/// real arithmetic is wanted.
struct RealModes {
    Eigen::VectorXd energies;
    Eigen::MatrixXd vectors;
};

/// Effective spin-spin couplings obtained by eliminating the bosons.
/// Two sign/factor conventions coexist in the derivation:
///   J       = 2 g^2 Re sum_n M*_{j,n} M_{l,n} / omega_bar_n   (variational
///             equations; row sums equal 2g^2/omega0 under PBC)
///   J_ising = -g^2 sum_n M*_{j,n} M_{l,n} / omega_bar_n       (polaron
///             transform of the Omega = 0 model)
struct CouplingMatrix {
    Eigen::MatrixXd J;
    Eigen::MatrixXd J_ising;
};

/// Nearest-neighbour chain with local energies omega0 + 2t. Periodic
/// wraps N-1 <-> 0 (for N = 2 both links join the same pair and add up);
/// a single site has no neighbours under either boundary.
HoppingMatrix build_hopping(const ModelParams& params);

/// Numeric eigendecomposition of the boson sector. For periodic chains the
/// degenerate (n, N-n) subspaces are canonicalized onto the analytic
/// plane waves; otherwise the gauge fixes each eigenvector's largest
/// component to be positive. Throws NonPositiveSpectrum if any mode
/// energy is <= 0.
BosonModes collective_modes(const HoppingMatrix& h);

/// Analytic plane-wave modes M_{j,n} = exp(-i 2 pi n j / N)/sqrt(N) with
/// dispersion omega_bar_n = omega0 + 2t(1 - cos(2 pi n / N)). Periodic only.
BosonModes plane_wave_modes(const ModelParams& params);

/// Real orthogonal eigenbasis of the boson sector (deterministic gauge).
RealModes real_modes(const HoppingMatrix& h);

/// Both coupling conventions from a mode decomposition.
CouplingMatrix ising_couplings(const BosonModes& modes, double g);

} // namespace jt
