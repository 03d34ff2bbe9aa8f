// Acceptance suite: one criterion per line, PASS/FAIL, nonzero exit on any
// failure. Criterion 8 reruns the actual CLI binary when its path is given
// as argv[1] (the ctest registration passes it).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "jtchain/csvio.hpp"
#include "jtchain/oracle.hpp"
#include "jtchain/sweep.hpp"

using namespace jt;
namespace fs = std::filesystem;

namespace {

std::string g_cli_path;

struct Check {
    bool ok = true;
    std::string detail;
    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

ModelParams pbc(int n, double t, double g, double omega = 1.0, double omega0 = 1.0) {
    ModelParams p;
    p.n_sites = n;
    p.t = t;
    p.g = g;
    p.Omega = omega;
    p.omega0 = omega0;
    p.boundary = Boundary::Periodic;
    return p;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

// criterion 1: gap closing at g_c = 1/2, independent of t and N
Check criterion_critical_point() {
    Check c;
    for (double t : {0.4, 10.0})
        for (int n : {5, 20}) {
            ModelParams p = pbc(n, t, 0.0);
            const CriticalScan scan = critical_scan(p, 0.1, 0.9);
            c.require(std::abs(scan.estimate - 0.5) < 1e-8,
                      "bisection at t=" + format_float(t) + ", N=" + std::to_string(n) +
                      " gave " + format_float(scan.estimate));
        }
    return c;
}

// criterion 2: J row sums equal 2 g^2 / omega0 for N = 2..64, t in {0, 0.4, 5}
Check criterion_j_identity() {
    Check c;
    const double g = 0.8, omega0 = 1.0;
    for (int n = 2; n <= 64; ++n)
        for (double t : {0.0, 0.4, 5.0}) {
            const CouplingMatrix cm =
                ising_couplings(plane_wave_modes(pbc(n, t, g)), g);
            const Eigen::VectorXd rows = cm.J.colwise().sum();
            const double target = 2.0 * g * g / omega0;
            for (int j = 0; j < n; ++j)
                c.require(std::abs(rows[j] - target) < 1e-10,
                          "row sum off by " + format_float(rows[j] - target) +
                          " at N=" + std::to_string(n) + ", t=" + format_float(t));
        }
    return c;
}

// criterion 3: general symplectic route reproduces the closed-form branches
Check criterion_spectrum_equivalence() {
    Check c;
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int sizes[] = {2, 3, 5, 8, 12, 16, 24, 32, 48, 64};
    for (int trial = 0; trial < 20; ++trial) {
        const int n = sizes[trial % 10];
        const double omega = 0.4 + 1.6 * u(rng);
        const double t = 3.0 * u(rng);
        const double gc = 0.5 * std::sqrt(omega);
        const double g = (trial % 2 == 0) ? gc * (0.3 + 0.55 * u(rng))
                                          : gc * (1.15 + 0.85 * u(rng));
        const ModelParams p = pbc(n, t, g, omega);
        const MeanFieldSolution mf = solve_pbc(p);
        const GaussianSpectrum spec = gaussian_spectrum_pbc(p, mf);
        const BogoliubovTransform bt = diagonalize_quadratic(
            build_gaussian_hamiltonian(plane_wave_modes(p), mf, p));
        std::vector<double> expect;
        for (int k = 0; k < n; ++k) {
            expect.push_back(spec.e_minus[k]);
            expect.push_back(spec.e_plus[k]);
        }
        std::sort(expect.begin(), expect.end());
        for (int m = 0; m < 2 * n; ++m)
            c.require(std::abs(bt.energies[m] - expect[m]) < 1e-10,
                      "branch mismatch " + format_float(bt.energies[m] - expect[m]) +
                      " at N=" + std::to_string(n) + ", g=" + format_float(g));
    }
    return c;
}

// criterion 4: pinned n=0 fluctuation value at (Omega=omega0=1, g=0.3)
Check criterion_fluctuation_value() {
    Check c;
    const double frozen = 0.033634355153414; // two-mode covariance oracle
    // re-derive the pin from the covariance of the quadrature normal modes
    {
        Eigen::Matrix2d k;
        k << 1.0, -0.6, -0.6, 1.0;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(k);
        double occ = 0.0;
        for (int m = 0; m < 2; ++m) {
            const double e = std::sqrt(es.eigenvalues()[m]);
            occ += es.eigenvectors()(0, m) * es.eigenvectors()(0, m) *
                   (1.0 - e) * (1.0 - e) / (4.0 * e);
        }
        c.require(std::abs(occ - frozen) < 1e-12,
                  "covariance oracle drifted: " + format_float(occ));
    }
    const int n = 20;
    const ModelParams p = pbc(n, 0.4, 0.3);
    const MeanFieldSolution mf = solve_pbc(p);
    const FluctuationReport ana = fluctuations_pbc(gaussian_spectrum_pbc(p, mf), p);
    c.require(std::abs(ana.zero_mode_spin * n - frozen) < 1e-9,
              "closed-form spin value " + format_float(ana.zero_mode_spin * n));
    c.require(std::abs(ana.zero_mode_boson * n - frozen) < 1e-9,
              "closed-form boson value " + format_float(ana.zero_mode_boson * n));
    c.require(std::abs(ana.zero_mode_spin - ana.zero_mode_boson) < 1e-12,
              "species asymmetry at Omega = omega0");
    const FluctuationReport gen = fluctuations_general(diagonalize_quadratic(
        build_gaussian_hamiltonian(plane_wave_modes(p), mf, p)));
    c.require(std::abs(gen.per_mode_spin[0] * n - frozen) < 1e-9,
              "general-route spin value " + format_float(gen.per_mode_spin[0] * n));
    c.require(std::abs(gen.per_mode_boson[0] * n - frozen) < 1e-9,
              "general-route boson value " + format_float(gen.per_mode_boson[0] * n));
    return c;
}

// criterion 5: n=0 divergence flag at g_c plus the log N scaling of the rest
Check criterion_divergence_structure() {
    Check c;
    const ModelParams p = pbc(32, 0.4, 0.5);
    const FluctuationReport rep =
        fluctuations_pbc(gaussian_spectrum_pbc(p, solve_pbc(p)), p);
    c.require(rep.diverged && std::isinf(rep.zero_mode_spin),
              "n=0 terms not flagged divergent at g_c");
    c.require(std::isfinite(rep.rest_spin) && std::isfinite(rep.rest_boson),
              "n!=0 sums not finite at g_c");
    const LogFit fit = log_divergence_fit(pbc(16, 0.4, 0.5), {16, 32, 64, 128, 256});
    c.require(fit.slope > 0.0, "critical sum does not grow with N");
    c.require(fit.max_residual < 0.05 * fit.data_range,
              "log fit residual " + format_float(fit.max_residual) + " vs range " +
              format_float(fit.data_range));
    return c;
}

// criterion 6: qualitative shapes behind figures 3 and 4
Check criterion_figure_shapes() {
    Check c;
    const std::string dir = (fs::temp_directory_path() / "jtchain_acceptance_figs").string();
    fs::remove_all(dir);
    reproduce_figure({FigureId::Fig3, {}}, dir);
    reproduce_figure({FigureId::Fig4, {}}, dir);

    // fig3: columns t (5), f_spin_total (7); series keyed by t
    std::map<double, std::map<int, double>> total;
    {
        std::stringstream ss(slurp(dir + "/fig3.csv"));
        std::string line;
        std::getline(ss, line);
        while (std::getline(ss, line)) {
            const auto cells = split_csv(line);
            total[std::stod(cells[5])][std::stoi(cells[2])] = std::stod(cells[7]);
        }
    }
    const auto& low = total[0.4];
    const double plateau = low.at(100);
    double early_max = 0.0;
    for (int n = 2; n <= 10; ++n) early_max = std::max(early_max, low.at(n));
    c.require(early_max > plateau * 1.05,
              "no mesoscopic excess: early max " + format_float(early_max) +
              " vs plateau " + format_float(plateau));
    for (int n = 20; n <= 100; ++n)
        c.require(std::abs(low.at(n) - plateau) <= 0.01 * plateau,
                  "no plateau by N=" + std::to_string(n));
    // the decrease is over by N ~ 10
    c.require(std::abs(low.at(10) - plateau) < 0.01 * plateau,
              "mesoscopic decrease not finished near N=10");
    for (const auto& [n, v] : total[10.0])
        c.require(v < low.at(n), "t=10 not below t=0.4 at N=" + std::to_string(n));

    // fig4: strict ordering of the n!=0 fluctuations by hopping, both panels
    for (const std::string name : {"fig4_g0.6.csv", "fig4_gc.csv"}) {
        std::map<double, std::map<int, double>> rest;
        std::stringstream ss(slurp(dir + "/" + name));
        std::string line;
        std::getline(ss, line);
        while (std::getline(ss, line)) {
            const auto cells = split_csv(line);
            rest[std::stod(cells[5])][std::stoi(cells[2])] = std::stod(cells[11]);
        }
        const double ts[] = {0.4, 0.8, 1.5, 5.0};
        for (int i = 0; i + 1 < 4; ++i)
            for (const auto& [n, v] : rest[ts[i]])
                c.require(rest[ts[i + 1]].at(n) < v,
                          name + ": curves not ordered by t at N=" + std::to_string(n));
    }
    fs::remove_all(dir);
    return c;
}

// criterion 7: exact-diagonalization oracle grid
Check criterion_oracle_grid() {
    Check c;
    std::vector<double> trend_rel;
    for (double omega : {0.0, 0.7, 1.3})
        for (double t : {0.0, 0.4, 2.0})
            for (double g : {0.2, 0.6, 1.0}) {
                EDConfig cfg;
                cfg.params = pbc(2, t, g, omega);
                cfg.fock_cutoff = 63;
                const ComparisonReport r = exact_vs_meanfield(cfg);
                const std::string tag = " at (omega=" + format_float(omega) +
                    ", t=" + format_float(t) + ", g=" + format_float(g) + ")";
                c.require(r.cutoff_converged, "cutoff not converged" + tag);
                c.require(r.gap >= -1e-10, "variational bound violated" + tag);
                if (omega == 0.0) {
                    c.require(std::abs(r.gap) <= 1e-8, "Omega=0 gap " +
                              format_float(r.gap) + tag);
                    c.require(std::abs(r.e_exact - (-2.0 * g * g)) <= 1e-8,
                              "Omega=0 closed form" + tag);
                }
                c.require(r.sz_mean.cwiseAbs().maxCoeff() < 1e-10,
                          "parity <sz>" + tag);
                c.require(r.boson_displacement.cwiseAbs().maxCoeff() < 1e-10,
                          "parity <a_n>" + tag);
            }
    for (double g : {0.3, 0.2, 0.1, 0.05}) {
        EDConfig cfg;
        cfg.params = pbc(2, 0.4, g);
        cfg.fock_cutoff = 63;
        const ComparisonReport r = exact_vs_meanfield(cfg);
        const double denom = std::max(r.sw_spin_occupancy, r.ed_spin_occupancy);
        trend_rel.push_back(std::abs(r.sw_spin_occupancy - r.ed_spin_occupancy) / denom);
    }
    for (std::size_t i = 0; i + 1 < trend_rel.size(); ++i)
        c.require(trend_rel[i] > trend_rel[i + 1],
                  "spin-wave/ED discrepancy not monotone: " +
                  format_float(trend_rel[i]) + " -> " + format_float(trend_rel[i + 1]));
    return c;
}

// criterion 8: byte-identical figure CSVs on rerun
Check criterion_determinism() {
    Check c;
    const fs::path base = fs::temp_directory_path() / "jtchain_acceptance_det";
    fs::remove_all(base);
    fs::create_directories(base);
    const auto csv_bytes = [&](const fs::path& dir) {
        std::map<std::string, std::string> bytes;
        for (const auto& e : fs::directory_iterator(dir))
            if (e.path().extension() == ".csv")
                bytes[e.path().filename().string()] = slurp(e.path().string());
        return bytes;
    };
    for (const std::string fig : {"fig1", "fig2", "fig3", "fig4"}) {
        const fs::path d1 = base / (fig + "_a"), d2 = base / (fig + "_b");
        if (!g_cli_path.empty()) {
            for (const fs::path& d : {d1, d2}) {
                const std::string cmd = g_cli_path + " figure " + fig + " --out " +
                                        d.string() + " > /dev/null";
                c.require(std::system(cmd.c_str()) == 0, "CLI run failed for " + fig);
            }
        } else {
            FigureSpec spec;
            spec.figure_id = figure_from_string(fig);
            reproduce_figure(spec, d1.string());
            reproduce_figure(spec, d2.string());
        }
        const auto a = csv_bytes(d1), b = csv_bytes(d2);
        c.require(!a.empty() && a.size() == b.size(), "missing CSVs for " + fig);
        for (const auto& [name, bytes] : a) {
            const auto it = b.find(name);
            c.require(it != b.end() && it->second == bytes,
                      fig + "/" + name + " differs between runs");
        }
    }
    fs::remove_all(base);
    return c;
}

} // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_cli_path = argv[1];

    struct Criterion {
        int id;
        double budget_s;
        const char* label;
        std::function<Check()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, 1.0, "critical point g_c = 1/2, independent of t and N", criterion_critical_point},
        {2, 1.0, "coupling row sums equal 2 g^2/omega0 for N = 2..64", criterion_j_identity},
        {3, 10.0, "general diagonalizer reproduces the closed-form branches", criterion_spectrum_equivalence},
        {4, 10.0, "pinned n=0 fluctuation value via both routes", criterion_fluctuation_value},
        {5, 30.0, "critical divergence split and log N scaling", criterion_divergence_structure},
        {6, 60.0, "figure 3 mesoscopic shape and figure 4 hopping order", criterion_figure_shapes},
        {7, 120.0, "exact-diagonalization grid: bounds, parity, convergence trend", criterion_oracle_grid},
        {8, 120.0, "figure commands are byte-deterministic", criterion_determinism},
    };

    int failures = 0;
    for (const auto& cr : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Check c;
        try {
            c = cr.run();
        } catch (const std::exception& e) {
            c.ok = false;
            c.detail = std::string("exception: ") + e.what();
        }
        const double dt = std::chrono::duration<double>(
            std::chrono::steady_clock::now() - t0).count();
        if (dt > cr.budget_s) {
            c.ok = false;
            c.detail = "runtime " + std::to_string(dt) + " s exceeds " +
                       std::to_string(cr.budget_s) + " s";
        }
        std::printf("%s  %d  %s (%.2f s)%s%s\n", c.ok ? "PASS" : "FAIL", cr.id,
                    cr.label, dt, c.ok ? "" : " -- ", c.ok ? "" : c.detail.c_str());
        if (!c.ok) ++failures;
    }
    return failures;
}
