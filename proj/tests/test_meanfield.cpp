#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "jtchain/meanfield.hpp"

using namespace jt;

namespace {

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

} // namespace

TEST_CASE("closed-form periodic solution") {
    SUBCASE("exactly at threshold") {
        const MeanFieldSolution s = solve_pbc(pbc(10, 0.4, 0.5));
        CHECK(s.sin_theta() == doctest::Approx(-1.0));
        CHECK(s.cos_theta() == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(s.phase == Phase::Critical);
        CHECK(critical_coupling(pbc(10, 0.4, 0.5)) == doctest::Approx(0.5));
    }
    SUBCASE("zero transverse field fully polarizes") {
        const MeanFieldSolution s = solve_pbc(pbc(6, 0.4, 0.7, 0.0));
        CHECK(s.sin_theta() == doctest::Approx(0.0));
        CHECK(s.cos_theta() == doctest::Approx(1.0));
        CHECK(std::abs(s.alphas[0] - 0.7 * std::sqrt(6.0)) < 1e-12);
        CHECK(s.phase == Phase::Ordered);
    }
    SUBCASE("ordered point, frozen values") {
        // sin = -25/36; cos, alpha0 and energy cross-checked against the
        // self-consistent solver and an independent evaluation
        const MeanFieldSolution s = solve_pbc(pbc(20, 0.4, 0.6));
        CHECK(s.sin_theta() == doctest::Approx(-0.6944444444444444).epsilon(1e-14));
        CHECK(s.cos_theta() == doctest::Approx(0.7195463248327011).epsilon(1e-14));
        CHECK(std::abs(s.alphas[0] - 1.9307453943432775) < 1e-12);
        for (int k = 1; k < 20; ++k) CHECK(std::abs(s.alphas[k]) == 0.0);
        CHECK(s.energy / 20 == doctest::Approx(-0.5336111111111111).epsilon(1e-14));
        CHECK(s.phase == Phase::Ordered);
    }
    SUBCASE("disordered side") {
        const MeanFieldSolution s = solve_pbc(pbc(4, 0.4, 0.3));
        CHECK(s.sin_theta() == doctest::Approx(-1.0));
        CHECK(s.energy == doctest::Approx(-2.0)); // -N Omega / 2
        CHECK(s.phase == Phase::Disordered);
    }
}

TEST_CASE("critical coupling closed form") {
    CHECK(critical_coupling(pbc(8, 0.4, 0.0, 1.0)) == doctest::Approx(0.5));
    CHECK(critical_coupling(pbc(8, 0.4, 0.0, 0.0)) == doctest::Approx(0.0));
    CHECK(critical_coupling(pbc(8, 0.4, 0.0, 2.0)) ==
          doctest::Approx(0.7071067811865476).epsilon(1e-15));
}

TEST_CASE("phase boundary consistency") {
    const double gc = critical_coupling(pbc(8, 0.4, 0.0));
    for (double g = 0.05; g < 1.0; g += 0.05) {
        const MeanFieldSolution s = solve_pbc(pbc(8, 0.4, g));
        if (std::abs(1.0 - 4.0 * g * g) < 1e-12)
            CHECK(s.phase == Phase::Critical);
        else if (g > gc)
            CHECK(s.phase == Phase::Ordered);
        else
            CHECK(s.phase == Phase::Disordered);
    }
}

TEST_CASE("order parameter scaling above the critical point") {
    // cos theta ~ sqrt(g - g_c): log-log slope 0.5 +- 0.05
    std::vector<double> lx, ly;
    for (double d = 1e-6; d <= 1e-3 * 1.0000001; d *= 2.0) {
        const MeanFieldSolution s = solve_pbc(pbc(8, 0.4, 0.5 + d));
        lx.push_back(std::log(d));
        ly.push_back(std::log(s.cos_theta()));
    }
    const int m = static_cast<int>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < m; ++i) {
        sx += lx[i]; sy += ly[i]; sxx += lx[i] * lx[i]; sxy += lx[i] * ly[i];
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    CHECK(slope == doctest::Approx(0.5).epsilon(0.1));
    // continuity across g_c
    const double below = solve_pbc(pbc(8, 0.4, 0.5 - 1e-9)).sin_theta();
    const double above = solve_pbc(pbc(8, 0.4, 0.5 + 1e-9)).sin_theta();
    CHECK(std::abs(below - above) < 1e-7);
}

TEST_CASE("self-consistent solver") {
    SUBCASE("reproduces the closed form under PBC") {
        const ModelParams p = pbc(8, 0.4, 0.6);
        const MeanFieldSolution ref = solve_pbc(p);
        const MeanFieldSolution s = solve_self_consistent(plane_wave_modes(p), p);
        CHECK(s.converged);
        CHECK(std::abs(s.sin_theta() - ref.sin_theta()) < 1e-8);
        CHECK(std::abs(s.cos_theta() - ref.cos_theta()) < 1e-8);
        CHECK(s.energy == doctest::Approx(ref.energy).epsilon(1e-10));
        for (int j = 1; j < 8; ++j)
            CHECK(std::abs(s.thetas[j] - s.thetas[0]) < 1e-12);
        for (int k = 1; k < 8; ++k)
            CHECK(std::abs(s.alphas[k]) < 1e-12);
    }
    SUBCASE("pure transverse field at g=0") {
        const ModelParams p = pbc(5, 0.4, 0.0);
        const MeanFieldSolution s = solve_self_consistent(plane_wave_modes(p), p);
        for (int j = 0; j < 5; ++j)
            CHECK(s.thetas[j] == doctest::Approx(-M_PI / 2));
        CHECK(s.alphas.cwiseAbs().maxCoeff() < 1e-14);
        CHECK(s.energy == doctest::Approx(-2.5));
    }
    SUBCASE("disordered asymptote") {
        const ModelParams p = pbc(4, 0.4, 0.1, 100.0);
        const MeanFieldSolution s = solve_self_consistent(plane_wave_modes(p), p);
        CHECK(s.sin_theta() == doctest::Approx(-1.0).epsilon(1e-10));
        CHECK(s.alphas.cwiseAbs().maxCoeff() < 1e-6);
    }
    SUBCASE("open chain converges with a clean residual") {
        ModelParams p = pbc(5, 0.4, 0.8);
        p.boundary = Boundary::Open;
        const BosonModes modes = collective_modes(build_hopping(p));
        const MeanFieldSolution s = solve_self_consistent(modes, p);
        CHECK(s.converged);
        CHECK(variational_residual(modes, p, s) < 1e-10);
        // open-chain angles are genuinely site dependent but mirror symmetric
        CHECK(s.thetas[0] == doctest::Approx(s.thetas[4]).epsilon(1e-10));
        CHECK(std::abs(s.thetas[0] - s.thetas[2]) > 1e-4);
    }
    SUBCASE("residual invariant at periodic fixed points") {
        for (double g : {0.2, 0.45, 0.5, 0.55, 0.9}) {
            const ModelParams p = pbc(6, 0.7, g);
            const BosonModes modes = plane_wave_modes(p);
            const MeanFieldSolution s = solve_self_consistent(modes, p);
            CHECK(variational_residual(modes, p, s) < 1e-10);
        }
    }
    SUBCASE("caller-provided start participates") {
        const ModelParams p = pbc(4, 0.4, 0.8);
        const Eigen::VectorXd init = Eigen::VectorXd::Constant(4, -0.3);
        const MeanFieldSolution s =
            solve_self_consistent(plane_wave_modes(p), p, init);
        CHECK(s.converged);
        CHECK(std::abs(s.sin_theta() - solve_pbc(p).sin_theta()) < 1e-8);
    }
    SUBCASE("rejects mismatched sizes and bad tolerance") {
        const ModelParams p = pbc(4, 0.4, 0.8);
        const BosonModes modes = plane_wave_modes(p);
        ModelParams wrong = p;
        wrong.n_sites = 5;
        CHECK_THROWS_AS(solve_self_consistent(modes, wrong), PhysicsError);
        CHECK_THROWS_AS(solve_self_consistent(modes, p, Eigen::VectorXd(), 0.0),
                        PhysicsError);
    }
}

TEST_CASE("variational energy functional") {
    const ModelParams p = pbc(6, 0.4, 0.7, 0.0);
    const BosonModes modes = plane_wave_modes(p);
    SUBCASE("zero-field optimum equals the aligned Ising energy") {
        const MeanFieldSolution s = solve_pbc(p);
        const double e = mean_field_energy(modes, p, s.thetas, s.alphas);
        CHECK(e == doctest::Approx(-6 * 0.49).epsilon(1e-12)); // -N g^2/omega0
        CHECK(e == doctest::Approx(s.energy).epsilon(1e-12));
    }
    SUBCASE("undisplaced transverse configuration") {
        const Eigen::VectorXd th = Eigen::VectorXd::Constant(6, -M_PI / 2);
        const Eigen::VectorXcd al = Eigen::VectorXcd::Zero(6);
        ModelParams q = p;
        q.Omega = 1.3;
        CHECK(mean_field_energy(modes, q, th, al) == doctest::Approx(-6 * 1.3 / 2));
    }
    SUBCASE("solution is a local minimum under random perturbation") {
        const ModelParams q = pbc(6, 0.4, 0.8);
        const BosonModes mq = plane_wave_modes(q);
        const MeanFieldSolution s = solve_pbc(q);
        const double e0 = mean_field_energy(mq, q, s.thetas, s.alphas);
        std::mt19937 rng(42);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int trial = 0; trial < 100; ++trial) {
            Eigen::VectorXd th = s.thetas;
            Eigen::VectorXcd al = s.alphas;
            for (int j = 0; j < 6; ++j) {
                th[j] += 1e-3 * u(rng);
                al[j] += std::complex<double>(1e-3 * u(rng), 1e-3 * u(rng));
            }
            CHECK(mean_field_energy(mq, q, th, al) >= e0 - 1e-12);
        }
    }
    SUBCASE("Z2 partner is exactly degenerate") {
        const ModelParams q = pbc(5, 0.4, 0.9);
        const BosonModes mq = plane_wave_modes(q);
        const MeanFieldSolution s = solve_pbc(q);
        const Eigen::VectorXd c = s.thetas.array().cos();
        const Eigen::VectorXd sn = s.thetas.array().sin();
        const double e1 = mean_field_energy_cs(mq, q, c, sn, s.alphas);
        const double e2 = mean_field_energy_cs(mq, q, -c, sn, -s.alphas);
        CHECK(e1 == e2); // bit-exact
    }
}

TEST_CASE("solver energy agrees with the functional") {
    const ModelParams p = pbc(8, 0.4, 0.6);
    const BosonModes modes = plane_wave_modes(p);
    const MeanFieldSolution s = solve_self_consistent(modes, p);
    CHECK(mean_field_energy(modes, p, s.thetas, s.alphas) ==
          doctest::Approx(s.energy).epsilon(1e-12));
}
