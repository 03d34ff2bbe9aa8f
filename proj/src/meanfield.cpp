#include "jtchain/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace jt {

namespace {

constexpr double kCriticalBand = 1e-12;

// sin theta on the negative branch for a given cos >= -1..1.
Eigen::VectorXd sin_from_cos(const Eigen::VectorXd& c) {
    return (1.0 - c.array().square()).max(0.0).sqrt().matrix() * -1.0;
}

// Per-site stationarity solved for cos theta_j at fixed molecular field
// h_j = sum_l J_{l,j} cos theta_l:
//   h sqrt(1 - c^2) = (Omega/2) c  ->  c = 2h / sqrt(Omega^2 + 4h^2).
double local_update(double h, double Omega) {
    if (Omega <= 0.0) {
        if (h > 0.0) return 1.0;
        if (h < 0.0) return -1.0;
        return 0.0;
    }
    return 2.0 * h / std::sqrt(Omega * Omega + 4.0 * h * h);
}

double ordered_cos(double J, double Omega) {
    if (!(J > 0.0) || Omega >= 2.0 * J) return 0.0;
    const double s = Omega / (2.0 * J);
    return std::sqrt(std::max(0.0, 1.0 - s * s));
}

struct FixedPoint {
    Eigen::VectorXd c;
    bool converged;
    long iterations;
    double step;
};

FixedPoint iterate(const Eigen::MatrixXd& J, double Omega, Eigen::VectorXd c,
                   double tol, long max_iter) {
    long it = 0;
    double step = 0.0;
    for (; it < max_iter; ++it) {
        Eigen::VectorXd h = J * c;
        Eigen::VectorXd next(c.size());
        for (int j = 0; j < c.size(); ++j) next[j] = local_update(h[j], Omega);
        step = (next - c).cwiseAbs().maxCoeff();
        if (step < tol) { c = next; return {c, true, it + 1, step}; }
        c += 0.5 * (next - c);
    }
    return {c, false, it, step};
}

double energy_of_cos(const Eigen::MatrixXd& J, double Omega, const Eigen::VectorXd& c) {
    const Eigen::VectorXd s = sin_from_cos(c);
    return -0.5 * c.dot(J * c) + 0.5 * Omega * s.sum();
}

Eigen::VectorXcd alphas_from_cos(const BosonModes& modes, double g,
                                 const Eigen::VectorXd& c) {
    const int n = modes.n();
    Eigen::VectorXcd a(n);
    for (int k = 0; k < n; ++k)
        a[k] = (g / modes.energies[k]) * (modes.amplitudes.col(k).conjugate().transpose() * c.cast<std::complex<double>>())(0);
    return a;
}

Phase classify(double Omega, double J) {
    if (std::abs(Omega - 2.0 * J) < kCriticalBand) return Phase::Critical;
    return Omega < 2.0 * J ? Phase::Ordered : Phase::Disordered;
}

} // namespace

std::string to_string(Phase p) {
    switch (p) {
        case Phase::Disordered: return "disordered";
        case Phase::Ordered: return "ordered";
        case Phase::Critical: return "critical";
    }
    return "?";
}

MeanFieldSolution solve_pbc(const ModelParams& params) {
    params.validate();
    if (params.boundary != Boundary::Periodic)
        throw PhysicsError("solve_pbc requires periodic boundaries");
    const int n = params.n_sites;
    const double J = 2.0 * params.g * params.g / params.omega0;

    double sin_t, cos_t;
    if (J > 0.0 && params.Omega <= 2.0 * J) {
        sin_t = -params.Omega / (2.0 * J);
        cos_t = std::sqrt(std::max(0.0, 1.0 - sin_t * sin_t));
    } else {
        sin_t = -1.0;
        cos_t = 0.0;
    }

    MeanFieldSolution sol;
    sol.thetas = Eigen::VectorXd::Constant(n, std::atan2(sin_t, cos_t));
    sol.alphas = Eigen::VectorXcd::Zero(n);
    sol.alphas[0] = params.g / params.omega0 * std::sqrt(static_cast<double>(n)) * cos_t;
    sol.energy = -n * params.g * params.g / params.omega0 * cos_t * cos_t
               + 0.5 * n * params.Omega * sin_t;
    sol.phase = classify(params.Omega, J);
    sol.converged = true;
    sol.iterations = 0;
    return sol;
}

MeanFieldSolution solve_self_consistent(const BosonModes& modes,
                                        const ModelParams& params,
                                        const Eigen::VectorXd& init,
                                        double tol, long max_iter) {
    params.validate();
    if (modes.n() != params.n_sites)
        throw PhysicsError("modes and params disagree on N");
    if (!(tol > 0.0)) throw PhysicsError("tol must be > 0");
    const int n = params.n_sites;

    const Eigen::MatrixXd J = ising_couplings(modes, params.g).J;
    const double J_row = J.colwise().sum().mean();

    std::vector<Eigen::VectorXd> starts;
    if (init.size() == n) starts.push_back(init.array().cos().matrix());
    starts.push_back(Eigen::VectorXd::Constant(n, ordered_cos(J_row, params.Omega)));
    starts.push_back(Eigen::VectorXd::Ones(n));
    starts.push_back(Eigen::VectorXd::Zero(n));
    std::mt19937 rng(0x6a7463);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int r = 0; r < 5; ++r) {
        Eigen::VectorXd c(n);
        for (int j = 0; j < n; ++j) c[j] = uni(rng);
        starts.push_back(c);
    }

    bool have_best = false;
    FixedPoint best{};
    double best_energy = 0.0, best_residual = 1e300;
    for (const auto& c0 : starts) {
        FixedPoint fp = iterate(J, params.Omega, c0, tol, max_iter);
        best_residual = std::min(best_residual, fp.step);
        if (!fp.converged) continue;
        const double e = energy_of_cos(J, params.Omega, fp.c);
        if (!have_best || e < best_energy) {
            have_best = true;
            best = fp;
            best_energy = e;
        }
    }
    if (!have_best)
        throw NonConvergence("mean-field iteration did not converge from any restart",
                             best_residual);

    // Pick the cos >= 0 representative of the Z2 pair.
    if (best.c.sum() < 0.0) best.c = -best.c;

    // Periodic chains are translation invariant: snap onto the homogeneous
    // solution (closed form in the row sum) once the iteration lands in
    // its basin, removing the leftover site-to-site drift of order tol.
    if (modes.boundary == Boundary::Periodic) {
        const double c_hom = ordered_cos(J_row, params.Omega);
        if ((best.c.array() - c_hom).abs().maxCoeff() < 1e-6)
            best.c.setConstant(c_hom);
    }

    const Eigen::VectorXd s = sin_from_cos(best.c);
    MeanFieldSolution sol;
    sol.thetas.resize(n);
    for (int j = 0; j < n; ++j) sol.thetas[j] = std::atan2(s[j], best.c[j]);
    sol.alphas = alphas_from_cos(modes, params.g, best.c);
    sol.energy = energy_of_cos(J, params.Omega, best.c);
    sol.phase = classify(params.Omega, J_row);
    sol.converged = true;
    sol.iterations = best.iterations;
    return sol;
}

double mean_field_energy_cs(const BosonModes& modes, const ModelParams& params,
                            const Eigen::VectorXd& cos_theta,
                            const Eigen::VectorXd& sin_theta,
                            const Eigen::VectorXcd& alphas) {
    const int n = modes.n();
    if (cos_theta.size() != n || alphas.size() != n)
        throw PhysicsError("dimension mismatch in mean_field_energy");
    double e = 0.0;
    for (int k = 0; k < n; ++k) e += modes.energies[k] * std::norm(alphas[k]);
    for (int j = 0; j < n; ++j) {
        double coupling = 0.0;
        for (int k = 0; k < n; ++k)
            coupling += 2.0 * std::real(modes.amplitudes(j, k) * alphas[k]);
        e -= params.g * cos_theta[j] * coupling;
    }
    e += 0.5 * params.Omega * sin_theta.sum();
    return e;
}

double mean_field_energy(const BosonModes& modes, const ModelParams& params,
                         const Eigen::VectorXd& thetas,
                         const Eigen::VectorXcd& alphas) {
    return mean_field_energy_cs(modes, params, thetas.array().cos(),
                                thetas.array().sin(), alphas);
}

double critical_coupling(const ModelParams& params) {
    params.validate();
    if (params.boundary != Boundary::Periodic)
        throw PhysicsError("critical_coupling requires periodic boundaries");
    return 0.5 * std::sqrt(params.Omega * params.omega0);
}

double variational_residual(const BosonModes& modes, const ModelParams& params,
                            const MeanFieldSolution& sol) {
    const int n = modes.n();
    const Eigen::VectorXd c = sol.thetas.array().cos();
    const Eigen::VectorXd s = sol.thetas.array().sin();
    const Eigen::VectorXcd a_expected = alphas_from_cos(modes, params.g, c);
    double r = (sol.alphas - a_expected).cwiseAbs().maxCoeff();
    const Eigen::MatrixXd J = ising_couplings(modes, params.g).J;
    const Eigen::VectorXd h = J * c;
    for (int j = 0; j < n; ++j)
        r = std::max(r, std::abs(h[j] * s[j] + 0.5 * params.Omega * c[j]));
    return r;
}

} // namespace jt
