#include "jtchain/spinwave.hpp"

#include <cmath>
#include <limits>

namespace jt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double homogeneous_theta(const MeanFieldSolution& mf) {
    const double t0 = mf.thetas[0];
    for (int j = 1; j < mf.thetas.size(); ++j)
        if (std::abs(mf.thetas[j] - t0) > 1e-9)
            throw PhysicsError("gaussian_spectrum_pbc needs a homogeneous mean-field angle");
    return t0;
}

// Gapless floor: exact zeros plus the cancellation noise of the closed
// forms, which sits at the eps * trace scale.
bool is_zero_energy(double e_sq, double scale) {
    return e_sq <= std::max(1e-24, 1e-14 * scale);
}

} // namespace

GaussianSpectrum gaussian_spectrum_pbc(const ModelParams& params,
                                       const MeanFieldSolution& mf) {
    params.validate();
    if (params.boundary != Boundary::Periodic)
        throw PhysicsError("gaussian_spectrum_pbc requires periodic boundaries");
    const double sin_t = std::sin(homogeneous_theta(mf));
    const double sabs = std::abs(sin_t);
    if (params.Omega <= 0.0 || sabs < 1e-14)
        throw UndefinedGap("Omega = 0: spin gap Omega/|sin theta| is indeterminate");

    const BosonModes modes = plane_wave_modes(params);
    const int n = modes.n();
    const double delta = params.Omega / sabs;

    GaussianSpectrum spec;
    spec.e_plus.resize(n);
    spec.e_minus.resize(n);
    spec.v_norm.resize(n);
    spec.u.resize(n);
    spec.delta = delta;
    spec.params_echo = params;
    spec.sin_theta = sin_t;
    spec.omega = modes.energies;
    spec.mode_index = modes.mode_index;

    for (int k = 0; k < n; ++k) {
        const double w = modes.energies[k];
        const double a = 2.0 * params.g * std::sqrt(params.Omega * w * sabs);
        const double tr = delta * delta + w * w;
        const double rad = std::sqrt(4.0 * a * a + (delta * delta - w * w) * (delta * delta - w * w));
        const double ep_sq = 0.5 * (tr + rad);
        double em_sq = 0.5 * (tr - rad);
        if (em_sq < -1e-10)
            throw GaplessMode("lower branch squared " + std::to_string(em_sq) +
                              " at mode " + std::to_string(spec.mode_index[k]) +
                              ": input is not a mean-field minimum");
        if (em_sq < 0.0 || is_zero_energy(em_sq, tr)) em_sq = 0.0;

        spec.e_plus[k] = std::sqrt(ep_sq);
        spec.e_minus[k] = std::sqrt(em_sq);

        const double b_minus = em_sq - delta * delta;
        const double v_sq = b_minus * b_minus + a * a;
        spec.v_norm[k] = std::sqrt(v_sq);
        if (a == 0.0) {
            // decoupled block: the printed matrix becomes 0/0, use its g->0 limit
            if (w < delta) spec.u[k] << 0.0, -1.0, 1.0, 0.0;
            else if (w > delta) spec.u[k] = -Eigen::Matrix2d::Identity();
            else spec.u[k] = Eigen::Matrix2d::Identity();
        } else {
            // lower-left as printed is E+^2 - omega^2, identically -(E-^2 - delta^2);
            // writing it that way keeps the matrix orthogonal to rounding
            const double v = spec.v_norm[k];
            spec.u[k] << -a / v, b_minus / v,
                         -b_minus / v, -a / v;
        }
    }
    return spec;
}

FluctuationReport fluctuations_pbc(const GaussianSpectrum& spec,
                                   const ModelParams& params) {
    const int n = spec.n();
    const double inv_n = 1.0 / static_cast<double>(n);
    const double sabs = std::abs(spec.sin_theta);
    const double delta = spec.delta;
    const double g = params.g;

    FluctuationReport rep;
    rep.per_mode_spin = Eigen::VectorXd::Zero(n);
    rep.per_mode_boson = Eigen::VectorXd::Zero(n);

    if (g != 0.0) {
        for (int k = 0; k < n; ++k) {
            const double w = spec.omega[k];
            const double ep = spec.e_plus[k];
            const double em = spec.e_minus[k];
            if (em == 0.0) {
                rep.per_mode_boson[k] = kInf;
                rep.per_mode_spin[k] = kInf;
                rep.diverged = true;
                continue;
            }
            const double v_sq = spec.v_norm[k] * spec.v_norm[k];
            const double bm = em * em - delta * delta;
            const double bp = ep * ep - w * w;
            rep.per_mode_boson[k] = inv_n / v_sq *
                (g * g * params.Omega * sabs * ep * (w / ep - 1.0) * (w / ep - 1.0)
                 + 0.25 * bm * bm * (em / w) * (1.0 - w / em) * (1.0 - w / em));
            rep.per_mode_spin[k] = inv_n / v_sq *
                (g * g * w * sabs * sabs * em * (delta / em - 1.0) * (delta / em - 1.0)
                 + 0.25 * bp * bp * (1.0 / ep) * delta * (1.0 - ep / delta) * (1.0 - ep / delta));
        }
    }

    rep.zero_mode_spin = rep.per_mode_spin[0];
    rep.zero_mode_boson = rep.per_mode_boson[0];
    rep.rest_spin = n > 1 ? rep.per_mode_spin.tail(n - 1).sum() : 0.0;
    rep.rest_boson = n > 1 ? rep.per_mode_boson.tail(n - 1).sum() : 0.0;
    rep.f_spin_total = rep.zero_mode_spin + rep.rest_spin;
    rep.f_boson_total = rep.zero_mode_boson + rep.rest_boson;
    return rep;
}

ModeSplit mode_decomposition(const FluctuationReport& report) {
    return {report.zero_mode_spin, report.zero_mode_boson,
            report.rest_spin, report.rest_boson};
}

QuadraticForm build_gaussian_hamiltonian(const BosonModes& modes,
                                         const MeanFieldSolution& mf,
                                         const ModelParams& params) {
    params.validate();
    const int n = modes.n();
    if (mf.thetas.size() != n || mf.alphas.size() != n)
        throw PhysicsError("mean-field solution size mismatch");

    const Eigen::VectorXd c = mf.thetas.array().cos();
    const Eigen::VectorXd s = mf.thetas.array().sin();

    // Local spin gaps from the displaced-frame diagonal term.
    Eigen::VectorXd delta(n);
    for (int j = 0; j < n; ++j) {
        double disp = 0.0;
        for (int k = 0; k < n; ++k)
            disp += 2.0 * std::real(modes.amplitudes(j, k) * mf.alphas[k]);
        delta[j] = -params.Omega * s[j] + 2.0 * params.g * c[j] * disp;
        if (!(delta[j] > 1e-14))
            throw UndefinedGap("nonpositive spin gap Delta_j at site " + std::to_string(j));
    }

    // Re-express the boson sector in a real orthogonal mode basis; the
    // one-body matrix reconstructed from any valid mode set is real.
    Eigen::MatrixXcd one_body = modes.amplitudes *
        modes.energies.asDiagonal() * modes.amplitudes.adjoint();
    if (one_body.imag().cwiseAbs().maxCoeff() > 1e-10)
        throw PhysicsError("boson one-body matrix is not real");
    HoppingMatrix h;
    h.boundary = modes.boundary;
    h.hop = one_body.real();
    h.local_energies = h.hop.diagonal();
    h.hop.diagonal().setZero();
    RealModes rm = real_modes(h);
    for (int k = 0; k < n; ++k)
        if (!(rm.energies[k] > 0.0))
            throw NonPositiveSpectrum("mode energy <= 0 in quadratic form");

    QuadraticForm q;
    q.n_sites = n;
    q.boson_freqs = rm.energies;
    q.spin_freqs = delta;
    q.modes = rm.vectors;
    q.k = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int k = 0; k < n; ++k) q.k(k, k) = rm.energies[k] * rm.energies[k];
    for (int j = 0; j < n; ++j) q.k(n + j, n + j) = delta[j] * delta[j];
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
            const double cpl = 2.0 * params.g * s[j] * rm.vectors(j, k) *
                               std::sqrt(rm.energies[k] * delta[j]);
            q.k(k, n + j) = cpl;
            q.k(n + j, k) = cpl;
        }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q.k, Eigen::EigenvaluesOnly);
    if (es.eigenvalues()[0] < -1e-10)
        throw NotAMinimum("quadratic form indefinite: lowest eigenvalue " +
                          std::to_string(es.eigenvalues()[0]));
    return q;
}

BogoliubovTransform diagonalize_quadratic(const QuadraticForm& q) {
    const int n = q.n_sites;
    const int dim = 2 * n;
    if (q.k.rows() != dim || q.k.cols() != dim)
        throw PhysicsError("quadratic form has wrong dimensions");
    if ((q.k - q.k.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw PhysicsError("quadratic form must be symmetric");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q.k);
    const Eigen::VectorXd lam = es.eigenvalues();
    if (lam[0] < -1e-10)
        throw NotAMinimum("quadratic form indefinite: lowest eigenvalue " +
                          std::to_string(lam[0]));
    const double scale = std::max(std::abs(lam[dim - 1]), 1.0);

    BogoliubovTransform bt;
    bt.form = q;
    bt.eigvecs = es.eigenvectors();
    bt.energies.resize(dim);
    bt.zero_mode.assign(dim, false);
    bt.w = Eigen::MatrixXd::Zero(dim, dim);
    bt.v = Eigen::MatrixXd::Zero(dim, dim);

    Eigen::VectorXd freq(dim);
    freq.head(n) = q.boson_freqs;
    freq.tail(n) = q.spin_freqs;

    for (int m = 0; m < dim; ++m) {
        if (lam[m] < 0.0 || is_zero_energy(lam[m], scale)) {
            bt.energies[m] = 0.0;
            bt.zero_mode[m] = true;
            continue; // W, V columns stay zero and are excluded downstream
        }
        const double e = std::sqrt(lam[m]);
        bt.energies[m] = e;
        for (int mu = 0; mu < dim; ++mu) {
            const double r = std::sqrt(freq[mu] / e);
            bt.w(mu, m) = 0.5 * bt.eigvecs(mu, m) * (r + 1.0 / r);
            bt.v(mu, m) = 0.5 * bt.eigvecs(mu, m) * (r - 1.0 / r);
        }
    }

    if (!bt.has_zero_mode()) {
        // the transformation must preserve the bosonic commutators
        const Eigen::MatrixXd comm = bt.w * bt.w.transpose() - bt.v * bt.v.transpose();
        const double res =
            (comm - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff();
        if (res > 1e-10)
            throw PhysicsError("Bogoliubov commutation residual " + std::to_string(res));
    }
    return bt;
}

FluctuationReport fluctuations_general(const BogoliubovTransform& bt) {
    const int n = bt.form.n_sites;
    FluctuationReport rep;
    rep.per_mode_boson = Eigen::VectorXd::Zero(n);
    rep.per_mode_spin = Eigen::VectorXd::Zero(n);

    // Boson rows are already mode-resolved; spin occupations rotate from
    // the site basis to the boson mode basis for a comparable split.
    const Eigen::MatrixXd v_boson = bt.v.topRows(n);
    const Eigen::MatrixXd v_spin = bt.v.bottomRows(n);
    const Eigen::MatrixXd spin_cov = v_spin * v_spin.transpose();
    const Eigen::MatrixXd spin_modes = bt.form.modes.transpose() * spin_cov * bt.form.modes;
    const double inv_n = 1.0 / static_cast<double>(n);
    for (int k = 0; k < n; ++k) {
        rep.per_mode_boson[k] = v_boson.row(k).squaredNorm() * inv_n;
        rep.per_mode_spin[k] = spin_modes(k, k) * inv_n;
    }

    if (bt.has_zero_mode()) {
        rep.diverged = true;
        for (int m = 0; m < 2 * n; ++m) {
            if (!bt.zero_mode[m]) continue;
            // Attribute the divergence to the dominant mode of each sector.
            Eigen::VectorXd ob = bt.eigvecs.col(m).head(n).cwiseAbs();
            Eigen::VectorXd os = (bt.form.modes.transpose() * bt.eigvecs.col(m).tail(n)).cwiseAbs();
            int kb = 0, ks = 0;
            ob.maxCoeff(&kb);
            os.maxCoeff(&ks);
            rep.per_mode_boson[kb] = kInf;
            rep.per_mode_spin[ks] = kInf;
        }
    }

    rep.zero_mode_boson = rep.per_mode_boson[0];
    rep.zero_mode_spin = rep.per_mode_spin[0];
    rep.rest_boson = n > 1 ? rep.per_mode_boson.tail(n - 1).sum() : 0.0;
    rep.rest_spin = n > 1 ? rep.per_mode_spin.tail(n - 1).sum() : 0.0;
    rep.f_boson_total = rep.zero_mode_boson + rep.rest_boson;
    rep.f_spin_total = rep.zero_mode_spin + rep.rest_spin;
    return rep;
}

LogFit log_divergence_fit(const ModelParams& base, const std::vector<int>& n_list) {
    ModelParams p = base;
    p.boundary = Boundary::Periodic;
    const double gc = critical_coupling(p);
    if (std::abs(p.g - gc) > 1e-9 * std::max(1.0, gc))
        throw PhysicsError("log_divergence_fit is defined at the critical point only "
                           "(g = " + std::to_string(p.g) + ", g_c = " + std::to_string(gc) + ")");
    if (n_list.size() < 4)
        throw PhysicsError("log_divergence_fit needs at least 4 chain lengths");
    for (std::size_t i = 0; i + 1 < n_list.size(); ++i)
        if (n_list[i] >= n_list[i + 1])
            throw PhysicsError("chain lengths must be strictly ascending");

    const int m = static_cast<int>(n_list.size());
    Eigen::VectorXd x(m), y(m);
    for (int i = 0; i < m; ++i) {
        p.n_sites = n_list[i];
        const MeanFieldSolution mf = solve_pbc(p);
        const FluctuationReport rep = fluctuations_pbc(gaussian_spectrum_pbc(p, mf), p);
        x[i] = std::log(static_cast<double>(n_list[i]));
        y[i] = rep.rest_spin;
    }

    Eigen::MatrixXd design(m, 2);
    design.col(0) = x;
    design.col(1).setOnes();
    const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(y);
    const Eigen::VectorXd fit = design * coef;

    LogFit out;
    out.slope = coef[0];
    out.intercept = coef[1];
    out.max_residual = (fit - y).cwiseAbs().maxCoeff();
    out.data_range = y.maxCoeff() - y.minCoeff();
    return out;
}

} // namespace jt
