#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jtchain/csvio.hpp"
#include "jtchain/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitPhysics = 3;
constexpr int kExitValidation = 4;

int run_sweep_command(const std::string& config_path) {
    const jt::ConfigFile cfg = jt::parse_config_file(config_path);
    const auto sections = cfg.named("sweep");
    if (sections.empty())
        throw jt::ConfigError("no [sweep] section in '" + config_path + "'");
    const std::string dir = std::filesystem::path(config_path).parent_path().string();
    int index = 0;
    for (const auto* sec : sections) {
        jt::SweepConfig sc = jt::sweep_from_section(*sec, cfg.raw, dir);
        ++index;
        if (!sec->has("label") && sections.size() > 1)
            sc.label = "sweep" + std::to_string(index);
        for (const auto& f : jt::run_sweep(sc))
            std::cout << "wrote " << f << "\n";
    }
    return kExitOk;
}

int run_figure_command(const std::string& which, const std::string& out,
                       const std::vector<std::string>& sets) {
    jt::FigureSpec spec;
    spec.figure_id = jt::figure_from_string(which);
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw jt::ConfigError("--set expects key=value, got '" + s + "'");
        spec.overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    for (const auto& f : jt::reproduce_figure(spec, out))
        std::cout << "wrote " << f << "\n";
    return kExitOk;
}

int run_validate_command(const std::string& config_path, const std::string& out) {
    const jt::ValidationOutcome outcome = jt::validate(config_path, out);
    std::cout << outcome.report;
    std::cout << "details: " << outcome.csv_path << "\n";
    return outcome.failed == 0 ? kExitOk : kExitValidation;
}

int run_critical_command(double omega, double omega0, double t, int n,
                         const std::string& range) {
    const auto vals = jt::parse_double_list(range);
    if (vals.size() != 2)
        throw jt::ConfigError("--range expects two comma-separated values");
    jt::ModelParams p;
    p.Omega = omega;
    p.omega0 = omega0;
    p.t = t;
    p.n_sites = n;
    p.boundary = jt::Boundary::Periodic;
    const jt::CriticalScan scan = jt::critical_scan(p, vals[0], vals[1]);
    std::cout << "bisection g_c  = " << jt::format_float(scan.estimate) << "\n"
              << "closed form    = " << jt::format_float(scan.closed_form)
              << "  (sqrt(Omega*omega0)/2)\n"
              << "iterations     = " << scan.iterations << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mean-field phase diagram and Gaussian fluctuations of a "
                 "cooperative Jahn-Teller spin-boson chain"};
    app.require_subcommand(1);

    std::string sweep_config;
    auto* sweep = app.add_subcommand("sweep", "run the sweeps of a config file");
    sweep->add_option("config", sweep_config, "config file with [sweep] sections")
        ->required();

    std::string fig_name, fig_out = "figures";
    std::vector<std::string> fig_sets;
    auto* figure = app.add_subcommand("figure", "emit the data behind one figure");
    figure->add_option("name", fig_name, "fig1, fig2, fig3 or fig4")->required();
    figure->add_option("--out", fig_out, "output directory (default: figures)");
    figure->add_option("--set", fig_sets, "override, key=value (repeatable)");

    std::string val_config, val_out = "validation";
    auto* val = app.add_subcommand("validate", "check mean-field and spin-wave "
                                               "output against exact diagonalization");
    val->add_option("config", val_config, "config file with a [validate] section")
        ->required();
    val->add_option("--out", val_out, "output directory (default: validation)");

    double cr_omega = 1.0, cr_omega0 = 1.0, cr_t = 0.4;
    int cr_n = 20;
    std::string cr_range = "0.1,0.9";
    auto* crit = app.add_subcommand("critical", "bisection scan for the critical coupling");
    crit->add_option("--omega", cr_omega, "transverse field (default 1)");
    crit->add_option("--omega0", cr_omega0, "lowest mode energy (default 1)");
    crit->add_option("--t", cr_t, "hopping (default 0.4)");
    crit->add_option("--n", cr_n, "chain length (default 20)");
    crit->add_option("--range", cr_range, "bracketing interval a,b (default 0.1,0.9)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*sweep) return run_sweep_command(sweep_config);
        if (*figure) return run_figure_command(fig_name, fig_out, fig_sets);
        if (*val) return run_validate_command(val_config, val_out);
        if (*crit) return run_critical_command(cr_omega, cr_omega0, cr_t, cr_n, cr_range);
    } catch (const jt::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const jt::PhysicsError& e) {
        std::cerr << "physics error: " << e.what() << "\n";
        return kExitPhysics;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitOk;
}
