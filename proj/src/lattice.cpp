#include "jtchain/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace jt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Dispersion evaluated through min(n, N-n) so that the paired modes
// (n, N-n) get bit-identical energies and ties sort by analytic index.
double pbc_dispersion(const ModelParams& p, int n) {
    const int m = std::min(n, p.n_sites - n);
    const double angle = kTwoPi * m / p.n_sites;
    return p.omega0 + 2.0 * p.t * (1.0 - std::cos(angle));
}

void check_positive(const Eigen::VectorXd& energies) {
    for (int n = 0; n < energies.size(); ++n)
        if (!(energies[n] > 0.0))
            throw NonPositiveSpectrum("mode energy " + std::to_string(energies[n]) +
                                      " at index " + std::to_string(n));
}

// Largest-magnitude component positive; ties resolved by the first index.
void fix_gauge(Eigen::MatrixXd& vecs) {
    for (int c = 0; c < vecs.cols(); ++c) {
        int imax = 0;
        for (int r = 1; r < vecs.rows(); ++r)
            if (std::abs(vecs(r, c)) > std::abs(vecs(imax, c))) imax = r;
        if (vecs(imax, c) < 0.0) vecs.col(c) = -vecs.col(c);
    }
}

} // namespace

std::string to_string(Boundary b) {
    switch (b) {
        case Boundary::Periodic: return "periodic";
        case Boundary::Open: return "open";
        case Boundary::Custom: return "custom";
    }
    return "?";
}

HoppingMatrix build_hopping(const ModelParams& params) {
    params.validate();
    if (params.boundary == Boundary::Custom)
        throw PhysicsError("build_hopping handles Periodic and Open chains; "
                           "custom lattices supply their matrix directly");
    const int n = params.n_sites;
    HoppingMatrix h;
    h.boundary = params.boundary;
    h.local_energies = Eigen::VectorXd::Constant(n, params.omega0 + 2.0 * params.t);
    h.hop = Eigen::MatrixXd::Zero(n, n);
    if (n > 1) {
        for (int j = 0; j + 1 < n; ++j) {
            h.hop(j, j + 1) -= params.t;
            h.hop(j + 1, j) -= params.t;
        }
        if (params.boundary == Boundary::Periodic) {
            h.hop(n - 1, 0) -= params.t;
            h.hop(0, n - 1) -= params.t;
        }
    }
    return h;
}

RealModes real_modes(const HoppingMatrix& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.full());
    RealModes rm;
    rm.energies = es.eigenvalues();
    rm.vectors = es.eigenvectors();
    fix_gauge(rm.vectors);
    return rm;
}

BosonModes plane_wave_modes(const ModelParams& params) {
    params.validate();
    if (params.boundary != Boundary::Periodic)
        throw PhysicsError("plane_wave_modes requires periodic boundaries");
    const int n = params.n_sites;

    std::vector<int> order(n);
    for (int k = 0; k < n; ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const double ea = pbc_dispersion(params, a), eb = pbc_dispersion(params, b);
        if (ea != eb) return ea < eb;
        return a < b;
    });

    BosonModes modes;
    modes.boundary = Boundary::Periodic;
    modes.mode_index = order;
    modes.energies.resize(n);
    modes.amplitudes.resize(n, n);
    const double norm = 1.0 / std::sqrt(static_cast<double>(n));
    for (int c = 0; c < n; ++c) {
        const int k = order[c];
        modes.energies[c] = pbc_dispersion(params, k);
        for (int j = 0; j < n; ++j) {
            const double phase = -kTwoPi * k * j / n;
            modes.amplitudes(j, c) = norm * std::complex<double>(std::cos(phase), std::sin(phase));
        }
    }
    check_positive(modes.energies);
    return modes;
}

BosonModes collective_modes(const HoppingMatrix& h) {
    if ((h.hop - h.hop.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw PhysicsError("hopping matrix must be symmetric");

    RealModes rm = real_modes(h);
    check_positive(rm.energies);

    const int n = h.n();
    if (h.boundary == Boundary::Periodic && n > 1) {
        // Canonicalize onto the analytic plane waves: numeric eigensolvers
        // return arbitrary real combinations inside each degenerate
        // (n, N-n) pair. The numeric spectrum must match the dispersion.
        // Recover (omega0, t) from the parametrization omega_j = omega0 + 2t;
        // for N = 2 the two wrap links collapse onto one pair.
        ModelParams p;
        p.n_sites = n;
        const double t = -h.hop(0, 1) / (n == 2 ? 2.0 : 1.0);
        p.t = t;
        p.omega0 = h.local_energies[0] - 2.0 * t;
        p.boundary = Boundary::Periodic;
        if (p.omega0 <= 0.0)
            throw NonPositiveSpectrum("periodic chain with omega0 <= 0");
        BosonModes ana = plane_wave_modes(p);
        for (int c = 0; c < n; ++c) {
            if (std::abs(ana.energies[c] - rm.energies[c]) > 1e-9 * std::max(1.0, std::abs(ana.energies[c])))
                throw PhysicsError("numeric spectrum does not match the plane-wave dispersion");
        }
        return ana;
    }

    BosonModes modes;
    modes.boundary = h.boundary;
    modes.energies = rm.energies;
    modes.amplitudes = rm.vectors.cast<std::complex<double>>();
    modes.mode_index.resize(n);
    for (int k = 0; k < n; ++k) modes.mode_index[k] = k;
    return modes;
}

CouplingMatrix ising_couplings(const BosonModes& modes, double g) {
    check_positive(modes.energies);
    const int n = modes.n();
    const Eigen::MatrixXcd& m = modes.amplitudes;
    Eigen::MatrixXcd inv_energy_kernel = Eigen::MatrixXcd::Zero(n, n);
    for (int k = 0; k < n; ++k)
        inv_energy_kernel += m.col(k).conjugate() * m.col(k).transpose() / modes.energies[k];
    // For modes of a real symmetric lattice this kernel is real (it equals
    // an inverse matrix function of the one-body Hamiltonian).
    if (inv_energy_kernel.imag().cwiseAbs().maxCoeff() > 1e-12)
        throw PhysicsError("coupling kernel has an imaginary part; modes are inconsistent");

    CouplingMatrix c;
    c.J = 2.0 * g * g * inv_energy_kernel.real();
    c.J_ising = -g * g * inv_energy_kernel.real();
    return c;
}

} // namespace jt
