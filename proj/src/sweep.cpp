#include "jtchain/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include "jtchain/csvio.hpp"

namespace jt {

namespace {

const std::vector<std::string> kSweepHeader = {
    "axis_name", "axis_value", "N", "omega", "omega0", "t", "g",
    "f_spin_total", "f_boson_total", "f_spin_zero", "f_boson_zero",
    "f_spin_rest", "f_boson_rest", "e_minus_0", "e_plus_0", "sin_theta", "phase"};

const std::vector<std::string> kSpectrumHeader = {
    "axis_name", "axis_value", "N", "omega", "omega0", "t", "g",
    "n", "omega_bar_n", "e_minus_n", "e_plus_n", "f_spin_n", "f_boson_n"};

const std::vector<std::string> kMeanfieldHeader = {
    "axis_name", "axis_value", "N", "omega", "omega0", "t", "g",
    "sin_theta", "cos_theta", "alpha0", "energy", "energy_per_site",
    "phase", "converged", "iterations"};

int env_threads() {
    if (const char* env = std::getenv("JT_THREADS")) {
        const int t = std::atoi(env);
        if (t >= 1 && t <= 256) return t;
    }
    return 1;
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

Boundary boundary_from_string(const std::string& s) {
    const std::string l = lower(s);
    if (l == "periodic" || l == "pbc") return Boundary::Periodic;
    if (l == "open") return Boundary::Open;
    if (l == "custom") return Boundary::Custom;
    throw ConfigError("unknown boundary '" + s + "'");
}

ModelParams params_from_section(const ConfigSection& sec) {
    ModelParams p;
    p.n_sites = sec.get_int_or("n", 1);
    p.omega0 = sec.get_double_or("omega0", 1.0);
    p.t = sec.get_double_or("t", 0.0);
    p.g = sec.get_double_or("g", 0.0);
    p.Omega = sec.get_double_or("omega", 0.0);
    p.boundary = boundary_from_string(sec.get_or("boundary", "periodic"));
    return p;
}

HoppingMatrix load_hopping_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open hopping matrix file '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        rows.push_back(parse_double_list(line));
    }
    const int n = static_cast<int>(rows.size());
    if (n == 0)
        throw ConfigError("empty hopping matrix file '" + path + "'");
    HoppingMatrix h;
    h.boundary = Boundary::Custom;
    h.hop = Eigen::MatrixXd::Zero(n, n);
    h.local_energies.resize(n);
    for (int j = 0; j < n; ++j) {
        if (static_cast<int>(rows[j].size()) != n)
            throw ConfigError("hopping matrix is not square in '" + path + "'");
        for (int l = 0; l < n; ++l) h.hop(j, l) = rows[j][l];
    }
    h.local_energies = h.hop.diagonal(); // diagonal carries the local energies
    h.hop.diagonal().setZero();
    if ((h.hop - h.hop.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw ConfigError("hopping matrix in '" + path + "' is not symmetric");
    return h;
}

std::vector<std::string> sweep_row(const SweepPoint& pt, SweepAxis axis) {
    const auto& p = pt.params;
    return {to_string(axis), format_float(pt.axis_value), std::to_string(p.n_sites),
            format_float(p.Omega), format_float(p.omega0), format_float(p.t),
            format_float(p.g),
            format_float(pt.fl.f_spin_total), format_float(pt.fl.f_boson_total),
            format_float(pt.fl.zero_mode_spin), format_float(pt.fl.zero_mode_boson),
            format_float(pt.fl.rest_spin), format_float(pt.fl.rest_boson),
            format_float(pt.e_minus_0), format_float(pt.e_plus_0),
            format_float(pt.mf.sin_theta()), to_string(pt.mf.phase)};
}

std::vector<SweepPoint> evaluate_grid(const ModelParams& base, SweepAxis axis,
                                      const std::vector<double>& values,
                                      bool want_spectrum,
                                      const std::optional<HoppingMatrix>& custom) {
    std::vector<SweepPoint> pts(values.size());
    const int threads = env_threads();
    const auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
            pts[i] = evaluate_point(base, values[i], axis, want_spectrum, custom);
    };
    if (threads <= 1 || values.size() < 2) {
        work(0, values.size());
    } else {
        std::vector<std::future<void>> futs;
        const std::size_t chunk = (values.size() + threads - 1) / threads;
        for (std::size_t lo = 0; lo < values.size(); lo += chunk)
            futs.push_back(std::async(std::launch::async, work, lo,
                                      std::min(lo + chunk, values.size())));
        for (auto& f : futs) f.get();
    }
    return pts;
}

void write_plot_script(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw ConfigError("cannot write '" + path + "'");
    out << "# gnuplot script; run as: gnuplot -p <this file>\n"
        << "set datafile separator \",\"\n"
        << "set datafile missing \"inf\"\n"
        << body;
}

ModelParams apply_axis(const ModelParams& base, SweepAxis axis, double value) {
    ModelParams p = base;
    switch (axis) {
        case SweepAxis::G: p.g = value; break;
        case SweepAxis::T: p.t = value; break;
        case SweepAxis::N:
            p.n_sites = static_cast<int>(std::lround(value));
            if (std::abs(value - p.n_sites) > 1e-9)
                throw ConfigError("N axis values must be integers");
            break;
    }
    return p;
}

} // namespace

std::string to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::G: return "g";
        case SweepAxis::N: return "N";
        case SweepAxis::T: return "t";
    }
    return "?";
}

SweepAxis axis_from_string(const std::string& s) {
    const std::string l = lower(s);
    if (l == "g") return SweepAxis::G;
    if (l == "n") return SweepAxis::N;
    if (l == "t") return SweepAxis::T;
    throw ConfigError("unknown sweep axis '" + s + "' (expected g, N or t)");
}

FigureId figure_from_string(const std::string& s) {
    const std::string l = lower(s);
    if (l == "fig1" || l == "1") return FigureId::Fig1;
    if (l == "fig2" || l == "2") return FigureId::Fig2;
    if (l == "fig3" || l == "3") return FigureId::Fig3;
    if (l == "fig4" || l == "4") return FigureId::Fig4;
    throw ConfigError("unknown figure '" + s + "' (expected fig1..fig4)");
}

SweepConfig sweep_from_section(const ConfigSection& sec, const std::string& config_text,
                               const std::string& config_dir) {
    SweepConfig cfg;
    cfg.config_text = config_text;
    cfg.base = params_from_section(sec);
    cfg.axis = axis_from_string(sec.get("axis"));
    cfg.label = sec.get_or("label", "sweep");
    cfg.out_path = sec.get_or("out", "."); // relative to the working directory

    if (sec.has("values")) {
        cfg.values = sec.get_list("values");
    } else {
        const double start = sec.get_double("start");
        const double stop = sec.get_double("stop");
        const int count = sec.get_int("count");
        if (count < 2)
            throw ConfigError("grid count must be >= 2 (use values= for a single point)");
        if (!(stop > start))
            throw ConfigError("grid needs stop > start");
        cfg.values.resize(count);
        for (int i = 0; i < count; ++i)
            cfg.values[i] = start + i * (stop - start) / (count - 1);
    }
    if (cfg.values.empty())
        throw ConfigError("sweep has no values");
    for (std::size_t i = 0; i + 1 < cfg.values.size(); ++i)
        if (!(cfg.values[i] < cfg.values[i + 1]))
            throw ConfigError("sweep values must be strictly increasing");

    std::stringstream outs(sec.get_or("outputs", "total"));
    std::string item;
    while (std::getline(outs, item, ',')) {
        item = lower(item);
        item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
        if (item.empty()) continue;
        if (item != "total" && item != "zero_mode" && item != "rest" &&
            item != "spectrum" && item != "meanfield")
            throw ConfigError("unknown output '" + item + "'");
        cfg.outputs.insert(item);
    }

    if (cfg.base.boundary == Boundary::Custom) {
        std::string path = sec.get("hopping_csv");
        if (!path.empty() && path[0] != '/' && !config_dir.empty())
            path = config_dir + "/" + path;
        cfg.custom = load_hopping_csv(path);
        cfg.base.n_sites = cfg.custom->n();
        if (cfg.axis != SweepAxis::G)
            throw ConfigError("custom lattices only support the g axis");
    }
    return cfg;
}

SweepPoint evaluate_point(const ModelParams& base, double axis_value,
                          SweepAxis axis, bool want_spectrum,
                          const std::optional<HoppingMatrix>& custom) {
    SweepPoint pt;
    pt.axis_value = axis_value;
    pt.params = apply_axis(base, axis, axis_value);
    pt.params.validate();
    if (!(pt.params.Omega > 0.0))
        throw PhysicsError("sweeps need Omega > 0 (the Gaussian spectrum is "
                           "indeterminate at zero transverse field)");
    const int n = pt.params.n_sites;

    if (pt.params.boundary == Boundary::Periodic) {
        pt.mf = solve_pbc(pt.params);
        const GaussianSpectrum spec = gaussian_spectrum_pbc(pt.params, pt.mf);
        pt.fl = fluctuations_pbc(spec, pt.params);
        pt.e_minus_0 = spec.e_minus[0];
        pt.e_plus_0 = spec.e_plus[0];
        if (want_spectrum) {
            pt.omega_n = spec.omega;
            pt.e_minus_n = spec.e_minus;
            pt.e_plus_n = spec.e_plus;
        }
        return pt;
    }

    const HoppingMatrix h = custom ? *custom : build_hopping(pt.params);
    if (custom && custom->n() != n)
        throw ConfigError("custom hopping matrix size differs from N");
    const BosonModes modes = collective_modes(h);
    pt.mf = solve_self_consistent(modes, pt.params);
    const BogoliubovTransform bt =
        diagonalize_quadratic(build_gaussian_hamiltonian(modes, pt.mf, pt.params));
    pt.fl = fluctuations_general(bt);
    // No +- branch structure off the periodic chain; report the normal-mode
    // band edges and, on request, the sorted halves as the two branches.
    pt.e_minus_0 = bt.energies[0];
    pt.e_plus_0 = bt.energies[2 * n - 1];
    if (want_spectrum) {
        pt.omega_n = bt.form.boson_freqs;
        pt.e_minus_n = bt.energies.head(n);
        pt.e_plus_n = bt.energies.tail(n);
    }
    return pt;
}

std::vector<std::string> run_sweep(const SweepConfig& cfg) {
    // Validate the whole grid before any file is written.
    for (double v : cfg.values) {
        ModelParams p = apply_axis(cfg.base, cfg.axis, v);
        p.validate();
        if (!(p.Omega > 0.0))
            throw PhysicsError("sweep point with Omega = 0 is outside the supported regime");
    }
    if (cfg.custom) {
        const RealModes rm = real_modes(*cfg.custom);
        if (!(rm.energies.minCoeff() > 0.0))
            throw NonPositiveSpectrum("custom lattice has a nonpositive mode energy");
    }
    if (!ensure_directory(cfg.out_path))
        throw ConfigError("cannot create output directory '" + cfg.out_path + "'");

    const bool want_spectrum = cfg.outputs.count("spectrum") != 0;
    const bool want_meanfield = cfg.outputs.count("meanfield") != 0;
    const std::vector<SweepPoint> pts =
        evaluate_grid(cfg.base, cfg.axis, cfg.values, want_spectrum, cfg.custom);

    std::vector<std::string> written;
    const std::string stem = cfg.out_path + "/" + cfg.label;

    CsvWriter main_csv(stem + ".csv", kSweepHeader);
    for (const auto& pt : pts) main_csv.row(sweep_row(pt, cfg.axis));
    main_csv.close();
    written.push_back(main_csv.path());

    if (want_spectrum) {
        CsvWriter csv(stem + "_spectrum.csv", kSpectrumHeader);
        for (const auto& pt : pts) {
            const auto& p = pt.params;
            for (int k = 0; k < pt.omega_n.size(); ++k)
                csv.row({to_string(cfg.axis), format_float(pt.axis_value),
                         std::to_string(p.n_sites), format_float(p.Omega),
                         format_float(p.omega0), format_float(p.t), format_float(p.g),
                         std::to_string(k), format_float(pt.omega_n[k]),
                         format_float(pt.e_minus_n[k]), format_float(pt.e_plus_n[k]),
                         format_float(pt.fl.per_mode_spin[k]),
                         format_float(pt.fl.per_mode_boson[k])});
        }
        csv.close();
        written.push_back(csv.path());
    }

    if (want_meanfield) {
        CsvWriter csv(stem + "_meanfield.csv", kMeanfieldHeader);
        for (const auto& pt : pts) {
            const auto& p = pt.params;
            csv.row({to_string(cfg.axis), format_float(pt.axis_value),
                     std::to_string(p.n_sites), format_float(p.Omega),
                     format_float(p.omega0), format_float(p.t), format_float(p.g),
                     format_float(pt.mf.sin_theta()), format_float(pt.mf.cos_theta()),
                     format_float(std::abs(pt.mf.alphas[0])),
                     format_float(pt.mf.energy),
                     format_float(pt.mf.energy / p.n_sites),
                     to_string(pt.mf.phase),
                     pt.mf.converged ? "1" : "0",
                     std::to_string(pt.mf.iterations)});
        }
        csv.close();
        written.push_back(csv.path());
    }

    write_metadata(stem + "_meta.json", "sweep " + cfg.label, cfg.config_text, {});
    written.push_back(stem + "_meta.json");
    return written;
}

namespace {

struct FigureBlock {
    ModelParams base;
    SweepAxis axis;
    std::vector<double> values;
};

std::vector<double> linspace(double a, double b, int count) {
    std::vector<double> v(count);
    for (int i = 0; i < count; ++i) v[i] = a + i * (b - a) / (count - 1);
    return v;
}

ModelParams figure_base(const FigureSpec& spec) {
    ModelParams p;
    p.n_sites = 20;
    p.omega0 = 1.0;
    p.Omega = 1.0;
    p.t = 0.4;
    p.g = 0.0;
    p.boundary = Boundary::Periodic;
    for (const auto& [k, v] : spec.overrides) {
        const std::string key = lower(k);
        if (key == "n") p.n_sites = static_cast<int>(std::lround(std::stod(v)));
        else if (key == "omega") p.Omega = std::stod(v);
        else if (key == "omega0") p.omega0 = std::stod(v);
        else if (key == "t") p.t = std::stod(v);
        else if (key == "g") p.g = std::stod(v);
        else if (key == "count") continue; // grid density, handled per figure
        else throw ConfigError("unknown figure override '" + k + "'");
    }
    return p;
}

int figure_count(const FigureSpec& spec, int fallback) {
    for (const auto& [k, v] : spec.overrides)
        if (lower(k) == "count") return std::stoi(v);
    return fallback;
}

bool has_override(const FigureSpec& spec, const std::string& key) {
    for (const auto& [k, v] : spec.overrides)
        if (lower(k) == key) return true;
    return false;
}

std::string figure_csv(const std::string& out_dir, const std::string& name,
                       const std::vector<FigureBlock>& blocks) {
    const std::string path = out_dir + "/" + name;
    CsvWriter csv(path, kSweepHeader);
    for (const auto& blk : blocks) {
        const std::vector<SweepPoint> pts =
            evaluate_grid(blk.base, blk.axis, blk.values, false, std::nullopt);
        for (const auto& pt : pts) csv.row(sweep_row(pt, blk.axis));
    }
    csv.close();
    return path;
}

std::string overrides_string(const FigureSpec& spec) {
    std::string s;
    for (const auto& [k, v] : spec.overrides) {
        if (!s.empty()) s += " ";
        s += k + "=" + v;
    }
    return s.empty() ? "none" : s;
}

} // namespace

std::vector<std::string> reproduce_figure(const FigureSpec& spec, const std::string& out_dir) {
    if (!ensure_directory(out_dir))
        throw ConfigError("cannot create output directory '" + out_dir + "'");
    std::vector<std::string> written;
    const ModelParams base = figure_base(spec);
    std::vector<std::pair<std::string, std::string>> meta;
    meta.emplace_back("overrides", overrides_string(spec));

    switch (spec.figure_id) {
        case FigureId::Fig1: {
            // Total fluctuations vs g; both species diverge at g_c.
            FigureBlock blk{base, SweepAxis::G, linspace(0.0, 1.0, figure_count(spec, 201))};
            written.push_back(figure_csv(out_dir, "fig1.csv", {blk}));
            write_plot_script(out_dir + "/fig1.gp",
                "set xlabel 'g'\nset ylabel 'F per atom'\nset key top left\n"
                "plot 'fig1.csv' skip 1 using 2:8 with lines title 'spin waves', \\\n"
                "     'fig1.csv' skip 1 using 2:9 with lines title 'phonons'\n");
            written.push_back(out_dir + "/fig1.gp");
            meta.emplace_back("figure", "fig1");
            break;
        }
        case FigureId::Fig2: {
            // Spin fluctuations vs g for growing chains; the paper does not
            // list its N values, fixed here as 5, 10, 20, 40.
            std::vector<FigureBlock> blocks;
            const auto grid = linspace(0.0, 1.0, figure_count(spec, 201));
            for (int n : {5, 10, 20, 40}) {
                ModelParams p = base;
                p.n_sites = n;
                blocks.push_back({p, SweepAxis::G, grid});
            }
            written.push_back(figure_csv(out_dir, "fig2.csv", blocks));
            write_plot_script(out_dir + "/fig2.gp",
                "set multiplot layout 1,2\nset xlabel 'g'\n"
                "set ylabel 'F spin (all modes)'\nset key top left\n"
                "plot for [nn in '5 10 20 40'] 'fig2.csv' skip 1 using "
                "($3==nn+0?$2:NaN):8 with lines title 'N='.nn\n"
                "set ylabel 'F spin (n=0 only)'\n"
                "plot for [nn in '5 10 20 40'] 'fig2.csv' skip 1 using "
                "($3==nn+0?$2:NaN):10 with lines title 'N='.nn\n"
                "unset multiplot\n");
            written.push_back(out_dir + "/fig2.gp");
            meta.emplace_back("figure", "fig2");
            meta.emplace_back("assumed_n_values", "5,10,20,40");
            break;
        }
        case FigureId::Fig3: {
            // Fluctuations vs N at g = 0.6 for two hoppings.
            std::vector<double> ns;
            for (int n = 2; n <= 100; ++n) ns.push_back(n);
            std::vector<FigureBlock> blocks;
            for (double t : {0.4, 10.0}) {
                ModelParams p = base;
                if (!has_override(spec, "g")) p.g = 0.6;
                if (!has_override(spec, "t")) p.t = t;
                blocks.push_back({p, SweepAxis::N, ns});
                if (has_override(spec, "t")) break;
            }
            written.push_back(figure_csv(out_dir, "fig3.csv", blocks));
            write_plot_script(out_dir + "/fig3.gp",
                "set multiplot layout 2,1\nset xlabel 'N'\nset ylabel 'F spin'\n"
                "set key top right\n"
                "plot 'fig3.csv' skip 1 using ($6==0.4?$2:NaN):8 with linespoints "
                "title 'total, t=0.4', \\\n"
                "     'fig3.csv' skip 1 using ($6==0.4?$2:NaN):12 with linespoints "
                "title 'n!=0, t=0.4'\n"
                "plot 'fig3.csv' skip 1 using ($6==10?$2:NaN):8 with linespoints "
                "title 'total, t=10', \\\n"
                "     'fig3.csv' skip 1 using ($6==10?$2:NaN):12 with linespoints "
                "title 'n!=0, t=10'\nunset multiplot\n");
            written.push_back(out_dir + "/fig3.gp");
            meta.emplace_back("figure", "fig3");
            meta.emplace_back("n_range", "2..100");
            break;
        }
        case FigureId::Fig4: {
            // n != 0 spin fluctuations vs N for several hoppings, at g = 0.6
            // and at the critical point.
            const std::vector<double> ns = {8, 12, 16, 24, 32, 48, 64, 96, 128, 192, 256};
            const std::vector<double> ts = {0.4, 0.8, 1.5, 5.0};
            for (double g : {0.6, 0.5}) {
                std::vector<FigureBlock> blocks;
                for (double t : ts) {
                    ModelParams p = base;
                    p.g = g;
                    p.t = t;
                    blocks.push_back({p, SweepAxis::N, ns});
                }
                const std::string name = g == 0.5 ? "fig4_gc.csv" : "fig4_g0.6.csv";
                written.push_back(figure_csv(out_dir, name, blocks));
            }
            write_plot_script(out_dir + "/fig4.gp",
                "set multiplot layout 1,2\nset xlabel 'N'\nset logscale x\n"
                "set ylabel 'F spin, n!=0'\nset key bottom right\n"
                "plot for [tt in '0.4 0.8 1.5 5'] 'fig4_g0.6.csv' skip 1 using "
                "($6==tt+0?$2:NaN):12 with linespoints title 't='.tt\n"
                "plot for [tt in '0.4 0.8 1.5 5'] 'fig4_gc.csv' skip 1 using "
                "($6==tt+0?$2:NaN):12 with linespoints title 't='.tt\n"
                "unset multiplot\n");
            written.push_back(out_dir + "/fig4.gp");
            meta.emplace_back("figure", "fig4");
            meta.emplace_back("n_list", "8,12,16,24,32,48,64,96,128,192,256");
            break;
        }
    }
    const std::string meta_path = out_dir + "/" +
        (spec.figure_id == FigureId::Fig1 ? "fig1" :
         spec.figure_id == FigureId::Fig2 ? "fig2" :
         spec.figure_id == FigureId::Fig3 ? "fig3" : "fig4") + std::string("_meta.json");
    write_metadata(meta_path, "figure", overrides_string(spec), meta);
    written.push_back(meta_path);
    return written;
}

ValidationOutcome validate(const std::string& config_path, const std::string& out_dir) {
    const ConfigFile cfg = parse_config_file(config_path);
    const auto sections = cfg.named("validate");
    if (sections.empty())
        throw ConfigError("no [validate] section in '" + config_path + "'");
    const ConfigSection& sec = *sections.front();

    ModelParams base = params_from_section(sec);
    if (base.n_sites > 3)
        throw ConfigError("validation is exact-diagonalization backed: N <= 3");
    const std::vector<double> gs = sec.has("g_values")
        ? sec.get_list("g_values") : std::vector<double>{0.2, 0.6, 1.0};
    const std::vector<double> omegas = sec.has("omega_values")
        ? sec.get_list("omega_values") : std::vector<double>{0.0, 0.7, 1.3};
    const std::vector<double> ts = sec.has("t_values")
        ? sec.get_list("t_values") : std::vector<double>{0.0, 0.4, 2.0};
    const std::vector<double> trend = sec.has("trend_g")
        ? sec.get_list("trend_g") : std::vector<double>{0.3, 0.2, 0.1, 0.05};
    const int max_cutoff = sec.get_int_or("max_cutoff", 63);

    if (!ensure_directory(out_dir))
        throw ConfigError("cannot create output directory '" + out_dir + "'");

    ValidationOutcome out;
    std::ostringstream rep;
    CsvWriter csv(out_dir + "/validation.csv",
                  {"N", "omega", "omega0", "t", "g", "cutoff", "e_exact", "e_mf",
                   "gap", "max_abs_sz", "max_abs_disp", "ok"});

    const auto check = [&](bool ok, const std::string& what) {
        ++out.checked;
        if (!ok) {
            ++out.failed;
            rep << "FAIL  " << what << "\n";
        }
        return ok;
    };

    for (double om : omegas)
        for (double t : ts)
            for (double g : gs) {
                EDConfig ed;
                ed.params = base;
                ed.params.Omega = om;
                ed.params.t = t;
                ed.params.g = g;
                ed.fock_cutoff = max_cutoff;
                const ComparisonReport r = exact_vs_meanfield(ed);
                std::ostringstream tag;
                tag << "(omega=" << om << ", t=" << t << ", g=" << g << ")";

                bool ok = check(r.gap >= -1e-10, "variational bound " + tag.str() +
                                " gap=" + format_float(r.gap));
                if (om == 0.0) {
                    ok = check(std::abs(r.gap) <= 1e-8,
                               "Omega=0 exactness " + tag.str() +
                               " gap=" + format_float(r.gap)) && ok;
                    const double closed = -base.n_sites * g * g / ed.params.omega0;
                    ok = check(std::abs(r.e_exact - closed) <= 1e-8,
                               "Omega=0 closed form " + tag.str()) && ok;
                }
                const double max_sz = r.sz_mean.cwiseAbs().maxCoeff();
                const double max_disp = r.boson_displacement.cwiseAbs().maxCoeff();
                ok = check(max_sz < 1e-10, "parity <sz> " + tag.str() +
                           " = " + format_float(max_sz)) && ok;
                ok = check(max_disp < 1e-10, "parity <a_n> " + tag.str() +
                           " = " + format_float(max_disp)) && ok;

                csv.row({std::to_string(ed.params.n_sites), format_float(om),
                         format_float(ed.params.omega0), format_float(t), format_float(g),
                         std::to_string(r.cutoff_used), format_float(r.e_exact),
                         format_float(r.e_mf), format_float(r.gap),
                         format_float(max_sz), format_float(max_disp), ok ? "1" : "0"});
            }

    // Spin-wave vs exact convergence trend at weak coupling.
    if (trend.size() >= 2) {
        std::vector<double> rel;
        for (double g : trend) {
            EDConfig ed;
            ed.params = base;
            ed.params.Omega = 1.0;
            ed.params.omega0 = 1.0;
            ed.params.t = 0.4;
            ed.params.g = g;
            ed.fock_cutoff = max_cutoff;
            const ComparisonReport r = exact_vs_meanfield(ed);
            const double denom = std::max(r.sw_spin_occupancy, r.ed_spin_occupancy);
            rel.push_back(denom > 0 ? std::abs(r.sw_spin_occupancy - r.ed_spin_occupancy) / denom
                                    : 0.0);
            const FluctuationReport fl = fluctuations_pbc(
                gaussian_spectrum_pbc(ed.params, solve_pbc(ed.params)), ed.params);
            rep << "trend g=" << g << ": ED occupancy " << format_float(r.ed_spin_occupancy)
                << ", spin-wave " << format_float(r.sw_spin_occupancy)
                << ", rel diff " << format_float(rel.back())
                << (gaussian_regime(fl) ? "" : "  [outside the Gaussian regime]") << "\n";
        }
        bool mono = true;
        for (std::size_t i = 0; i + 1 < rel.size(); ++i)
            if (!(rel[i] > rel[i + 1])) mono = false;
        check(mono, "spin-wave discrepancy decreases along the trend couplings");
    }

    csv.close();
    out.csv_path = csv.path();
    rep << (out.failed == 0 ? "all " + std::to_string(out.checked) + " checks passed"
                            : std::to_string(out.failed) + " of " +
                              std::to_string(out.checked) + " checks failed")
        << "\n";
    out.report = rep.str();

    std::ofstream txt(out_dir + "/validation_report.txt", std::ios::binary | std::ios::trunc);
    txt << out.report;
    write_metadata(out_dir + "/validation_meta.json", "validate", cfg.raw, {});
    return out;
}

CriticalScan critical_scan(const ModelParams& base, double g_lo, double g_hi) {
    ModelParams p = base;
    p.boundary = Boundary::Periodic;
    if (!(p.Omega > 0.0))
        throw PhysicsError("critical_scan needs Omega > 0");
    if (!(g_lo >= 0.0 && g_hi > g_lo))
        throw ConfigError("critical_scan needs 0 <= g_lo < g_hi");

    // Lower branch squared of the n = 0 block in the disordered frame
    // (|sin theta| = 1); it changes sign exactly where the normal phase
    // destabilizes.
    const auto em0_sq = [&](double g) {
        ModelParams q = p;
        q.g = g;
        const double w0 = plane_wave_modes(q).energies[0];
        const double a = 2.0 * g * std::sqrt(q.Omega * w0);
        const double tr = q.Omega * q.Omega + w0 * w0;
        const double rad = std::sqrt(4.0 * a * a +
            (q.Omega * q.Omega - w0 * w0) * (q.Omega * q.Omega - w0 * w0));
        return 0.5 * (tr - rad);
    };

    double flo = em0_sq(g_lo), fhi = em0_sq(g_hi);
    if (!(flo > 0.0 && fhi < 0.0))
        throw NoBracket("range [" + format_float(g_lo) + ", " + format_float(g_hi) +
                        "] does not bracket the gap closing");
    CriticalScan scan;
    scan.closed_form = critical_coupling(p);
    double lo = g_lo, hi = g_hi;
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        const double f = em0_sq(mid);
        ++scan.iterations;
        if (f > 0.0) lo = mid;
        else hi = mid;
        if (scan.iterations > 200) break;
    }
    scan.estimate = 0.5 * (lo + hi);
    return scan;
}

} // namespace jt
