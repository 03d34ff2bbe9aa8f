#include "jtchain/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace jt {

namespace {

constexpr long kDimGuard = 1000000;
// Dense full eigensolves scale as dim^3 (about 13 s at dim 2744); the
// restarted Lanczos needs milliseconds there, so it takes over early.
constexpr int kDenseLimit = 512;
constexpr double kLanczosTol = 1e-10;
constexpr long kLanczosBudget = 10000;

long pow_long(long base, int exp) {
    long r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

struct BasisInfo {
    int n, levels;
    long dim_boson, dim;
    // occupation of mode k in boson index b: (b / levels^k) % levels
    int occ(long b, int k) const { return static_cast<int>(b / stride[k] % levels); }
    std::array<long, 3> stride{};
};

BasisInfo make_basis(int n, int levels) {
    BasisInfo bi;
    bi.n = n;
    bi.levels = levels;
    bi.dim_boson = pow_long(levels, n);
    bi.dim = (1L << n) * bi.dim_boson;
    for (int k = 0; k < n; ++k) bi.stride[k] = pow_long(levels, k);
    return bi;
}

int spin_z(int config, int j) { return (config >> j) & 1 ? -1 : 1; }

Eigen::VectorXd parity_project(const Eigen::VectorXd& psi, const BasisInfo& bi) {
    // P |s, m> = (-1)^{sum m} |flip s, m>; the nondegenerate ground state
    // is a parity eigenstate, so project onto the sector psi points at.
    const int smask = (1 << bi.n) - 1;
    Eigen::VectorXd p(psi.size());
    for (int s = 0; s <= smask; ++s) {
        const long off = static_cast<long>(s) * bi.dim_boson;
        const long off_f = static_cast<long>(s ^ smask) * bi.dim_boson;
        for (long b = 0; b < bi.dim_boson; ++b) {
            int total = 0;
            for (int k = 0; k < bi.n; ++k) total += bi.occ(b, k);
            const double sign = (total & 1) ? -1.0 : 1.0;
            p[off + b] = sign * psi[off_f + b];
        }
    }
    const double overlap = psi.dot(p);
    Eigen::VectorXd out = psi + (overlap >= 0.0 ? 1.0 : -1.0) * p;
    const double nrm = out.norm();
    if (nrm < 1e-8) return psi; // pathological cancellation; keep raw state
    return out / nrm;
}

std::pair<double, Eigen::VectorXd> finish(const EDHamiltonian& ham, double energy,
                                          Eigen::VectorXd psi) {
    if (ham.basis == EDBasis::BareModes)
        psi = parity_project(psi, make_basis(ham.n_sites, ham.levels));
    return {energy, std::move(psi)};
}

} // namespace

EDHamiltonian build_full_hamiltonian(const EDConfig& cfg) {
    cfg.params.validate();
    const int n = cfg.params.n_sites;
    if (n > 3)
        throw PhysicsError("exact diagonalization is capped at 3 sites");
    if (cfg.fock_cutoff < 1)
        throw PhysicsError("fock_cutoff must be >= 1");
    const int levels = cfg.fock_cutoff + 1;
    const long dim = (1L << n) * pow_long(levels, n);
    if (dim > kDimGuard)
        throw PhysicsError("Hilbert dimension " + std::to_string(dim) +
                           " exceeds the 10^6 guard");

    const RealModes rm = real_modes(build_hopping(cfg.params));
    for (int k = 0; k < n; ++k)
        if (!(rm.energies[k] > 0.0))
            throw NonPositiveSpectrum("mode energy <= 0 in ED build");

    EDHamiltonian ham;
    ham.n_sites = n;
    ham.levels = levels;
    ham.dim = dim;
    ham.mode_energies = rm.energies;
    ham.modes = rm.vectors;
    ham.basis = cfg.basis;
    ham.params = cfg.params;

    if (cfg.basis == EDBasis::DisplacedModes) {
        // Shift the lowest mode by the mean-field displacement; truncation
        // then acts around the displaced vacuum of the ordered phase.
        const MeanFieldSolution mf = cfg.params.boundary == Boundary::Periodic
            ? solve_pbc(cfg.params)
            : solve_self_consistent(collective_modes(build_hopping(cfg.params)), cfg.params);
        const Eigen::VectorXd c = mf.thetas.array().cos();
        ham.displacement = cfg.params.g / rm.energies[0] * rm.vectors.col(0).dot(c);
    }

    const BasisInfo bi = make_basis(n, levels);
    const int dim_s = 1 << n;

    // g * sum_j z_j M_{j,k} per spin configuration and mode.
    Eigen::MatrixXd coupling(dim_s, n);
    for (int s = 0; s < dim_s; ++s)
        for (int k = 0; k < n; ++k) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += spin_z(s, j) * rm.vectors(j, k);
            coupling(s, k) = cfg.params.g * acc;
        }

    const double alpha = ham.displacement;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(dim) * (3 * n + 1));
    for (int s = 0; s < dim_s; ++s) {
        const long off = static_cast<long>(s) * bi.dim_boson;
        for (long b = 0; b < bi.dim_boson; ++b) {
            const long i = off + b;
            double diag = 0.0;
            for (int k = 0; k < n; ++k) diag += rm.energies[k] * bi.occ(b, k);
            if (alpha != 0.0)
                diag += rm.energies[0] * alpha * alpha + 2.0 * alpha * coupling(s, 0);
            trip.emplace_back(i, i, diag);

            for (int j = 0; j < n; ++j)
                trip.emplace_back((static_cast<long>(s ^ (1 << j)) * bi.dim_boson) + b,
                                  i, 0.5 * cfg.params.Omega);

            for (int k = 0; k < n; ++k) {
                double lad = coupling(s, k);
                if (k == 0 && alpha != 0.0) lad += rm.energies[0] * alpha;
                if (lad == 0.0) continue;
                const int m = bi.occ(b, k);
                if (m + 1 < levels)
                    trip.emplace_back(i + bi.stride[k], i, lad * std::sqrt(m + 1.0));
                if (m >= 1)
                    trip.emplace_back(i - bi.stride[k], i, lad * std::sqrt(double(m)));
            }
        }
    }
    ham.h.resize(dim, dim);
    ham.h.setFromTriplets(trip.begin(), trip.end());
    return ham;
}

std::pair<double, Eigen::VectorXd> ground_state_dense(const EDHamiltonian& ham) {
    Eigen::MatrixXd dense(ham.h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
    return finish(ham, es.eigenvalues()[0], es.eigenvectors().col(0));
}

std::pair<double, Eigen::VectorXd> ground_state_iterative(const EDHamiltonian& ham) {
    const long dim = ham.dim;
    const int window = dim > 200000 ? 24 : 64;

    Eigen::VectorXd x = Eigen::VectorXd::Ones(dim).normalized();
    double theta = 0.0, res = 1e300;
    long used = 0;
    std::vector<Eigen::VectorXd> basis;
    basis.reserve(window);

    while (used < kLanczosBudget) {
        basis.clear();
        basis.push_back(x);
        Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(window, window);
        int k = 0;
        for (; k < window && used < kLanczosBudget; ++k) {
            Eigen::VectorXd w = ham.h * basis[k];
            ++used;
            tri(k, k) = basis[k].dot(w);
            // full reorthogonalization inside the window, two passes
            for (int pass = 0; pass < 2; ++pass)
                for (const auto& bvec : basis) w -= bvec.dot(w) * bvec;
            const double beta = w.norm();
            if (k + 1 >= window) { ++k; break; }
            if (beta < 1e-13) { ++k; break; } // invariant subspace reached
            tri(k, k + 1) = tri(k + 1, k) = beta;
            basis.push_back(w / beta);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri.topLeftCorner(k, k));
        theta = es.eigenvalues()[0];
        x.setZero();
        for (int i = 0; i < k; ++i) x += es.eigenvectors()(i, 0) * basis[i];
        x.normalize();
        Eigen::VectorXd r = ham.h * x - theta * x;
        ++used;
        res = r.norm();
        if (res <= kLanczosTol * std::max(1.0, std::abs(theta)))
            return finish(ham, theta, x);
    }
    throw NonConvergence("Lanczos ground-state iteration exhausted its budget", res);
}

std::pair<double, Eigen::VectorXd> ground_state(const EDHamiltonian& ham) {
    return ham.dim <= kDenseLimit ? ground_state_dense(ham) : ground_state_iterative(ham);
}

EDResult observables(const Eigen::VectorXd& state, const EDHamiltonian& ham) {
    const int n = ham.n_sites;
    const BasisInfo bi = make_basis(n, ham.levels);
    if (state.size() != bi.dim)
        throw PhysicsError("state dimension mismatch");

    EDResult res;
    res.sx_mean = Eigen::VectorXd::Zero(n);
    res.sz_mean = Eigen::VectorXd::Zero(n);
    res.zz_corr = Eigen::MatrixXd::Zero(n, n);
    res.boson_occupation = Eigen::VectorXd::Zero(n);
    res.boson_displacement = Eigen::VectorXcd::Zero(n);
    res.cutoff_used = ham.levels - 1;

    const int dim_s = 1 << n;
    for (int s = 0; s < dim_s; ++s) {
        const long off = static_cast<long>(s) * bi.dim_boson;
        for (long b = 0; b < bi.dim_boson; ++b) {
            const long i = off + b;
            const double amp = state[i];
            if (amp == 0.0) continue;
            const double p = amp * amp;
            for (int j = 0; j < n; ++j) {
                res.sx_mean[j] += amp * state[(static_cast<long>(s ^ (1 << j)) * bi.dim_boson) + b];
                res.sz_mean[j] += p * spin_z(s, j);
                for (int l = 0; l < n; ++l)
                    res.zz_corr(j, l) += p * spin_z(s, j) * spin_z(s, l);
            }
            for (int k = 0; k < n; ++k) {
                const int m = bi.occ(b, k);
                res.boson_occupation[k] += p * m;
                if (m >= 1)
                    res.boson_displacement[k] += state[i - bi.stride[k]] * amp * std::sqrt(double(m));
            }
        }
    }
    res.zz_corr.diagonal().setOnes(); // z_j^2 is the identity

    if (ham.displacement != 0.0) {
        const double a = ham.displacement;
        res.boson_occupation[0] += 2.0 * a * res.boson_displacement[0].real() + a * a;
        res.boson_displacement[0] += a;
    }
    return res;
}

CutoffTable cutoff_convergence(const EDConfig& cfg, const std::vector<int>& cutoffs) {
    for (std::size_t i = 0; i + 1 < cutoffs.size(); ++i)
        if (cutoffs[i] >= cutoffs[i + 1])
            throw PhysicsError("cutoffs must be strictly ascending");
    CutoffTable table;
    for (int c : cutoffs) {
        EDConfig run = cfg;
        run.fock_cutoff = c;
        const EDHamiltonian ham = build_full_hamiltonian(run);
        table.cutoffs.push_back(c);
        table.energies.push_back(ground_state(ham).first);
    }
    const std::size_t m = table.energies.size();
    table.converged = m >= 2 &&
        std::abs(table.energies[m - 1] - table.energies[m - 2]) < 1e-8;
    return table;
}

ComparisonReport exact_vs_meanfield(const EDConfig& cfg) {
    cfg.params.validate();
    const ModelParams& p = cfg.params;
    if (cfg.fock_cutoff < 9)
        throw PhysicsError("exact_vs_meanfield needs a fock_cutoff budget of at least 9");

    // Adaptive ladder, sized to keep dense solves small and to jump past
    // the dense limit once the iterative path takes over anyway.
    std::vector<int> ladder;
    for (int c : {6, 9, 13, 19, 33, 46, 63}) {
        if (c >= cfg.fock_cutoff) break;
        ladder.push_back(c);
    }
    ladder.push_back(cfg.fock_cutoff);

    ComparisonReport rep;
    rep.params = p;

    double prev = 0.0;
    bool have_prev = false, converged = false;
    EDConfig run = cfg;
    Eigen::VectorXd psi;
    EDHamiltonian ham;
    std::string table;
    for (int c : ladder) {
        run.fock_cutoff = c;
        ham = build_full_hamiltonian(run);
        auto [e, v] = ground_state(ham);
        psi = std::move(v);
        rep.e_exact = e;
        rep.cutoff_used = c;
        table += " (" + std::to_string(c) + ", " + std::to_string(e) + ")";
        if (have_prev && std::abs(e - prev) < 1e-8) { converged = true; break; }
        prev = e;
        have_prev = true;
    }
    if (!converged)
        throw NonConvergence("Fock cutoff ladder did not converge for g = " +
                             std::to_string(p.g) + ", Omega = " + std::to_string(p.Omega) +
                             "; table:" + table,
                             std::abs(rep.e_exact - prev));
    rep.cutoff_converged = true;

    const EDResult obs = observables(psi, ham);
    rep.sx_mean = obs.sx_mean;
    rep.sz_mean = obs.sz_mean;
    rep.zz_corr = obs.zz_corr;
    rep.boson_occupation = obs.boson_occupation;
    rep.boson_displacement = obs.boson_displacement;

    const MeanFieldSolution mf = p.boundary == Boundary::Periodic
        ? solve_pbc(p)
        : solve_self_consistent(collective_modes(build_hopping(p)), p);
    rep.e_mf = mf.energy;
    rep.gap = rep.e_mf - rep.e_exact;
    rep.sin_theta = mf.sin_theta();
    rep.cos2_theta = mf.cos_theta() * mf.cos_theta();
    rep.alpha_sq = mf.alphas.cwiseAbs2();

    rep.ed_spin_occupancy = ((obs.sx_mean.array() + 1.0) / 2.0).mean();
    if (p.Omega > 0.0 && p.boundary == Boundary::Periodic) {
        const FluctuationReport fl = fluctuations_pbc(gaussian_spectrum_pbc(p, mf), p);
        rep.sw_spin_occupancy = fl.f_spin_total;
    } else {
        rep.sw_spin_occupancy = 0.0; // coupling vanishes with sin(theta) at Omega = 0
    }
    return rep;
}

} // namespace jt
