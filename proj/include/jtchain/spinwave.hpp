#pragma once

#include <vector>

#include <Eigen/Dense>

#include "jtchain/meanfield.hpp"

namespace jt {

/// Per-mode Bogoliubov data of the Gaussian Hamiltonian around a
/// homogeneous periodic mean-field point. For every collective mode n the
/// 2x2 quadrature matrix
///   K(n) = [[omega_n^2, -2g sqrt(Omega omega_n |sin|)],
///           [..., (Omega/|sin|)^2]]
/// splits into branches E+-,n; `u[n]` holds the printed orthogonal
/// eigenvector matrix (columns: E+ then E-) and `v_norm[n]` its shared
/// normalization. `delta` is the rotated-frame spin gap Omega/|sin theta|.
struct GaussianSpectrum {
    Eigen::VectorXd e_plus;
    Eigen::VectorXd e_minus;
    std::vector<Eigen::Matrix2d> u;
    Eigen::VectorXd v_norm;
    double delta = 0.0;
    ModelParams params_echo;
    double sin_theta = 0.0;
    Eigen::VectorXd omega;       // mode energies, same order as plane_wave_modes
    std::vector<int> mode_index; // analytic n per entry

    int n() const { return static_cast<int>(e_plus.size()); }
};

/// Vacuum fluctuation intensities per atom. Mode-resolved entries follow
/// the collective-mode ordering; the n = 0 (uniform) entry and the n != 0
/// remainder are split out since they scale differently with N. Divergent
/// entries (gapless mode) are reported as +infinity with `diverged` set.
struct FluctuationReport {
    double f_spin_total = 0.0;
    double f_boson_total = 0.0;
    Eigen::VectorXd per_mode_spin;
    Eigen::VectorXd per_mode_boson;
    double zero_mode_spin = 0.0;
    double zero_mode_boson = 0.0;
    double rest_spin = 0.0;
    double rest_boson = 0.0;
    bool diverged = false;
};

struct ModeSplit {
    double zero_spin, zero_boson, rest_spin, rest_boson;
};

/// 2N-coordinate quadrature form of the Gaussian Hamiltonian for an
/// arbitrary lattice: unit mass matrix, position-block `k` ordered as
/// [N boson modes | N spin sites]. `modes` is the real orthogonal mode
/// basis the boson block is expressed in; `spin_freqs` are the site gaps
/// Delta_j.
struct QuadraticForm {
    Eigen::MatrixXd k;
    Eigen::VectorXd boson_freqs;
    Eigen::VectorXd spin_freqs;
    Eigen::MatrixXd modes;
    int n_sites = 0;
};

/// Generalized Bogoliubov transformation reconstructed from the normal
/// modes of a QuadraticForm: original ladder operators o_mu relate to the
/// eigenmodes c_m by o_mu = sum_m (W_{mu,m} c_m + V_{mu,m} c_m^dagger).
/// Rows follow the QuadraticForm ordering. Zero modes are flagged and
/// their columns zeroed; they carry divergent fluctuations.
struct BogoliubovTransform {
    Eigen::VectorXd energies; // 2N, ascending
    Eigen::MatrixXd w;
    Eigen::MatrixXd v;
    Eigen::MatrixXd eigvecs;  // orthogonal, columns = normal coordinates
    std::vector<bool> zero_mode;
    QuadraticForm form;

    bool has_zero_mode() const {
        for (bool z : zero_mode)
            if (z) return true;
        return false;
    }
};

struct LogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_residual = 0.0;
    double data_range = 0.0;
};

/// The linearized spin-wave expansion is trustworthy while the per-atom
/// occupancy stays well below one; 0.1 is the working gauge.
constexpr double kGaussianValidityThreshold = 0.1;

inline bool gaussian_regime(const FluctuationReport& rep,
                            double threshold = kGaussianValidityThreshold) {
    return !rep.diverged && rep.f_spin_total < threshold;
}

/// Closed-form Bogoliubov branches for a periodic homogeneous mean-field
/// point. Throws UndefinedGap when Omega = 0 (the ordered-phase limit
/// sin theta -> 0 leaves Omega/|sin theta| indeterminate) and GaplessMode
/// when the lower branch squares negative beyond tolerance.
GaussianSpectrum gaussian_spectrum_pbc(const ModelParams& params,
                                       const MeanFieldSolution& mf);

/// Per-mode vacuum occupations (the closed-form expressions, including
/// their 1/N prefactor). A gapless lower branch makes the affected mode
/// divergent: the entry becomes +infinity, totals follow, and the n != 0
/// remainder stays finite.
FluctuationReport fluctuations_pbc(const GaussianSpectrum& spec,
                                   const ModelParams& params);

/// n = 0 vs n != 0 bookkeeping split.
ModeSplit mode_decomposition(const FluctuationReport& report);

/// Quadrature form of the Gaussian Hamiltonian for any boundary;
/// site-dependent angles are supported through the local gaps
/// Delta_j = -Omega sin theta_j + 2 g cos theta_j sum_n (M_{j,n} alpha_n + c.c.).
QuadraticForm build_gaussian_hamiltonian(const BosonModes& modes,
                                         const MeanFieldSolution& mf,
                                         const ModelParams& params);

/// Normal modes of the quadrature form (energies are square roots of the
/// position-block eigenvalues) plus the ladder-operator W, V blocks.
/// Throws NotAMinimum on an indefinite form; zero modes are permitted
/// and flagged.
BogoliubovTransform diagonalize_quadratic(const QuadraticForm& q);

/// Variance per atom from the V block: F = (1/N) sum |V|^2 over the boson
/// (respectively spin) rows. Mode-resolved spin entries are reported in
/// the boson mode basis. Zero modes propagate as diverged.
FluctuationReport fluctuations_general(const BogoliubovTransform& bt);

/// Least-squares fit of the critical n != 0 spin fluctuation sum against
/// log N. Only meaningful at g = g_c; other couplings are rejected.
LogFit log_divergence_fit(const ModelParams& base, const std::vector<int>& n_list);

} // namespace jt
