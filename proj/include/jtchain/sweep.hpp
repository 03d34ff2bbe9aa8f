#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "jtchain/config.hpp"
#include "jtchain/oracle.hpp"
#include "jtchain/spinwave.hpp"

namespace jt {

enum class SweepAxis { G, N, T };

/// One parameter sweep: a base model, an axis, its grid and the set of
/// output files to emit.
struct SweepConfig {
    ModelParams base;
    SweepAxis axis = SweepAxis::G;
    std::vector<double> values;
    std::set<std::string> outputs; // total/zero_mode/rest -> sweep.csv; spectrum, meanfield
    std::string out_path = ".";
    std::string label = "sweep";
    std::optional<HoppingMatrix> custom; // boundary = Custom lattices
    std::string config_text;             // provenance for the metadata sidecar
};

enum class FigureId { Fig1, Fig2, Fig3, Fig4 };

struct FigureSpec {
    FigureId figure_id = FigureId::Fig1;
    std::vector<std::pair<std::string, std::string>> overrides;
};

/// Everything one sweep point produced; rows of the CSV schema.
struct SweepPoint {
    ModelParams params;
    double axis_value = 0.0;
    MeanFieldSolution mf;
    FluctuationReport fl;
    double e_minus_0 = 0.0, e_plus_0 = 0.0;
    // per-mode detail, filled when the spectrum output is requested
    Eigen::VectorXd omega_n, e_minus_n, e_plus_n;
};

std::string to_string(SweepAxis a);
SweepAxis axis_from_string(const std::string& s);
FigureId figure_from_string(const std::string& s);

/// Build a sweep from one [sweep] config section.
SweepConfig sweep_from_section(const ConfigSection& sec, const std::string& config_text,
                               const std::string& config_dir);

/// Evaluate a single parameter point (periodic points use the analytic
/// pipeline, open/custom lattices the general one).
SweepPoint evaluate_point(const ModelParams& params, double axis_value,
                          SweepAxis axis, bool want_spectrum,
                          const std::optional<HoppingMatrix>& custom);

/// Run the sweep and write sweep.csv (+ spectrum.csv / meanfield.csv on
/// request) plus a JSON metadata sidecar. Returns the written file paths.
std::vector<std::string> run_sweep(const SweepConfig& cfg);

/// Emit the data and a gnuplot script behind one of the four figures.
std::vector<std::string> reproduce_figure(const FigureSpec& spec, const std::string& out_dir);

struct ValidationOutcome {
    int checked = 0;
    int failed = 0;
    std::string report;      // human-readable summary
    std::string csv_path;
};

/// Drive the exact-diagonalization oracle over a small grid and check the
/// mean-field and spin-wave predictions against it.
ValidationOutcome validate(const std::string& config_path, const std::string& out_dir);

struct CriticalScan {
    double estimate = 0.0;
    double closed_form = 0.0;
    int iterations = 0;
};

/// Bisection for the coupling where the lowest normal-phase Bogoliubov
/// branch closes. The disordered-frame E-(g)^2 changes sign at g_c, which
/// is what gets bracketed.
CriticalScan critical_scan(const ModelParams& base, double g_lo, double g_hi);

} // namespace jt
