#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "cli/parse.hpp"
#include "cli/report.hpp"
#include "cvbell/bell.hpp"
#include "cvbell/errors.hpp"
#include "cvbell/homodyne.hpp"
#include "cvbell/lhv.hpp"
#include "cvbell/parallel.hpp"
#include "cvbell/quadrature.hpp"
#include "cvbell/version.hpp"

namespace cvbell::cli {

namespace {

struct Common {
    std::string out_path;
    std::string format = "csv";
    int jobs = 1;
    bool no_timestamp = false;
    double tail_tol = kDefaultTailTol;

    int worker_count() const {
        if (jobs > 0) return jobs;
        return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    }
};

// Settings that shape the numbers; echoed into every header. Job count and
// output location are execution details and stay out so that reruns match.
nlohmann::json common_config(const Common& c) {
    return {{"format", c.format}, {"tail_tol", c.tail_tol}};
}

nlohmann::json angles_json(const BellAngles& a) {
    return {{"theta", a.theta}, {"phi", a.phi}, {"theta_p", a.theta_p}, {"phi_p", a.phi_p}};
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--out", c.out_path, "Output file ('-' for stdout)");
    sub->add_option("--format", c.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    sub->add_option("--jobs", c.jobs, "Worker threads (0 = all cores)")
        ->check(CLI::Range(0, 1024))
        ->capture_default_str();
    sub->add_flag("--no-timestamp", c.no_timestamp, "Omit the generation time from the header");
    sub->add_option("--tail-tol", c.tail_tol, "Discarded number-state probability")
        ->check(CLI::Range(1e-300, 0.5))
        ->capture_default_str();
}

std::filesystem::path default_path(const std::string& command, const Common& c) {
    const char* dir = std::getenv("CVBELL_OUTPUT_DIR");
    if (dir == nullptr || *dir == '\0') return {};
    return std::filesystem::path(dir) / (command + "." + c.format);
}

void emit(const Report& report, const Common& c, std::ostream& out, const std::string& path_flag) {
    const WriteOptions opts{c.format == "json" ? Format::json : Format::csv, !c.no_timestamp};
    std::filesystem::path path;
    if (path_flag == "-") {
        write_report(report, out, opts);
        return;
    }
    path = path_flag.empty() ? default_path(report.command, c) : std::filesystem::path(path_flag);
    if (path.empty()) {
        write_report(report, out, opts);
        return;
    }
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream file(path, std::ios::binary);
    if (!file) throw UsageError("cannot open output file " + path.string());
    write_report(report, file, opts);
    if (!file) throw UsageError("failed writing " + path.string());
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
    std::string r0 = "0:2:0.01";
    std::string angles = "paper";
    int grid_points = 32;
    double window_tol = 1e-3;
};

Report cmd_sweep(const SweepArgs& a, const Common& c) {
    const Range range = parse_range(a.r0);
    if (a.angles != "paper" && a.angles != "optimized") {
        throw UsageError("--angles: sweep accepts 'paper' or 'optimized'");
    }
    SweepOptions opts;
    opts.r0_min = range.min;
    opts.r0_max = range.max;
    opts.step = range.step;
    opts.mode = a.angles == "paper" ? AngleMode::paper : AngleMode::optimized;
    opts.optimizer.grid_points = a.grid_points;
    opts.tail_tol = c.tail_tol;
    opts.window_tol = a.window_tol;
    opts.jobs = c.worker_count();
    const SweepResult res = sweep_r0(opts);

    Report r;
    r.command = "sweep";
    r.config = common_config(c);
    r.config["r0"] = {{"start", range.min}, {"stop", range.max}, {"step", range.step}};
    r.config["angles"] = a.angles;
    if (opts.mode == AngleMode::optimized) r.config["grid_points"] = a.grid_points;
    r.config["window_tol"] = a.window_tol;
    r.columns = {"r0", "S", "p_pp_1", "p_pp_2", "p_pp_3", "p_pp_4", "p_plus",
                 "theta", "phi", "theta_p", "phi_p"};
    const BellResult* best = nullptr;
    for (const BellResult& p : res.points) {
        r.add_row({p.r0, p.S, p.p_pp[0], p.p_pp[1], p.p_pp[2], p.p_pp[3], p.p_plus_a, p.angles.theta,
                   p.angles.phi, p.angles.theta_p, p.angles.phi_p});
        if (best == nullptr || p.S > best->S) best = &p;
    }
    nlohmann::json windows = nlohmann::json::array();
    for (const ViolationInterval& w : res.windows) {
        windows.push_back({{"lower", w.lower},
                           {"upper", w.upper},
                           {"lower_closed", w.lower_closed},
                           {"upper_closed", w.upper_closed}});
    }
    r.summary["violation_windows"] = windows;
    if (best != nullptr) {
        r.summary["max_S"] = best->S;
        r.summary["r0_at_max"] = best->r0;
    }
    return r;
}

// ---------------------------------------------------------------- optimize

struct OptimizeArgs {
    std::string r0 = "1.1";
    int grid_points = 32;
    int refine_starts = 6;
    double tolerance = 1e-10;
};

Report cmd_optimize(const OptimizeArgs& a, const Common& c) {
    const std::vector<double> r0s = parse_list(a.r0, "--r0");
    OptimizerSettings settings;
    settings.grid_points = a.grid_points;
    settings.refine_starts = a.refine_starts;
    settings.tolerance = a.tolerance;
    for (double r0 : r0s) {
        if (r0 < 0.0) throw UsageError("--r0: amplitudes must be non-negative");
    }

    std::vector<BellResult> best(r0s.size());
    std::vector<double> paper(r0s.size());
    parallel_for(r0s.size(), c.worker_count(), [&](std::size_t i) {
        const CircleStateCoeffs coeffs = circle_state_coeffs(r0s[i], c.tail_tol);
        best[i] = optimize_angles(coeffs, settings);
        paper[i] = paper_angle_S(coeffs).S;
    });

    Report r;
    r.command = "optimize";
    r.config = common_config(c);
    r.config["r0"] = r0s;
    r.config["grid_points"] = a.grid_points;
    r.config["refine_starts"] = a.refine_starts;
    r.config["tolerance"] = a.tolerance;
    r.columns = {"r0", "S", "S_paper", "theta", "phi", "theta_p", "phi_p",
                 "chi1", "chi2", "chi3", "chi4", "converged", "iterations"};
    for (std::size_t i = 0; i < r0s.size(); ++i) {
        const BellResult& b = best[i];
        const ReducedAngles red = reduce(b.angles);
        r.add_row({r0s[i], b.S, paper[i], b.angles.theta, b.angles.phi, b.angles.theta_p,
                   b.angles.phi_p, red.chi1, red.chi2, red.chi3, red.chi4(), b.converged,
                   static_cast<std::int64_t>(b.iterations)});
    }
    return r;
}

// ---------------------------------------------------------------- dist

struct DistArgs {
    double r0 = 1.1;
    double chi = 0.0;
    bool noisy = false;
    std::string grid = "-12:12:241";
    std::string grid_y;
};

Report cmd_dist(const DistArgs& a, const Common& c) {
    if (!(a.r0 >= 0.0)) throw UsageError("--r0: amplitude must be non-negative");
    const Axis ax = parse_axis(a.grid);
    const Axis ay = a.grid_y.empty() ? ax : parse_axis(a.grid_y);
    GridSpec spec;
    spec.x_min = ax.min;
    spec.x_max = ax.max;
    spec.nx = ax.points;
    spec.y_min = ay.min;
    spec.y_max = ay.max;
    spec.ny = ay.points;
    const CircleStateCoeffs coeffs = circle_state_coeffs(a.r0, c.tail_tol);
    const JointDensityGrid g = a.noisy ? noisy_density_grid(coeffs, a.chi, spec, c.worker_count())
                                       : joint_density_grid(coeffs, a.chi, spec, c.worker_count());

    Report r;
    r.command = "dist";
    r.config = common_config(c);
    r.config["r0"] = a.r0;
    r.config["chi"] = a.chi;
    r.config["noisy"] = a.noisy;
    r.config["grid_x"] = {{"min", ax.min}, {"max", ax.max}, {"points", ax.points}};
    r.config["grid_y"] = {{"min", ay.min}, {"max", ay.max}, {"points", ay.points}};
    r.columns = {"x", "y", "density"};
    r.rows.reserve(static_cast<std::size_t>(spec.nx) * spec.ny);
    for (int i = 0; i < spec.nx; ++i)
        for (int j = 0; j < spec.ny; ++j) r.add_row({g.x_grid[i], g.y_grid[j], g.values(i, j)});
    Eigen::Index bi = 0, bj = 0;
    const double peak = g.values.maxCoeff(&bi, &bj);
    r.summary["mass"] = g.mass();
    r.summary["cutoff"] = coeffs.cutoff;
    r.summary["max_density"] = peak;
    r.summary["argmax"] = {g.x_grid[bi], g.y_grid[bj]};
    return r;
}

// ---------------------------------------------------------------- lhv

struct LhvArgs {
    std::string r0 = "1.1";
    std::string angles = "paper";
    std::string samples = "1e6";
    std::uint64_t seed = 1;
    std::string scan = "0";
};

Report cmd_lhv(const LhvArgs& a, const Common& c) {
    const std::vector<double> r0s = parse_list(a.r0, "--r0");
    const BellAngles angles = parse_angles(a.angles);
    const std::uint64_t samples = parse_count(a.samples, "--samples");
    const std::uint64_t scan = parse_count(a.scan, "--scan");
    if (samples < 10000) throw UsageError("--samples: at least 1e4 samples are required");

    Report r;
    r.command = "lhv";
    r.config = common_config(c);
    r.config["r0"] = r0s;
    r.config["angles"] = angles_json(angles);
    r.config["samples"] = samples;
    r.config["seed"] = a.seed;
    r.config["scan"] = scan;
    r.columns = {"r0", "S", "standard_error", "S_exact", "p_pp_1", "p_pp_2", "p_pp_3", "p_pp_4",
                 "p_plus_a", "p_plus_b", "samples", "seed", "proposals", "acceptance",
                 "expected_acceptance", "scan_max_S_exact"};
    for (double r0 : r0s) {
        if (r0 < 0.0) throw UsageError("--r0: amplitudes must be non-negative");
        const CircleStateCoeffs coeffs = circle_state_coeffs(r0, c.tail_tol);
        const LhvEstimate est = lhv_noisy_S(coeffs, angles, samples, a.seed, c.worker_count());
        const double exact = lhv_exact_S(coeffs, angles).S;

        // Exact noisy-model S over random angle quadruples, independent of job count.
        double scan_max = std::nan("");
        if (scan > 0) {
            std::mt19937_64 rng(a.seed);
            std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
            std::vector<BellAngles> quads(scan);
            for (auto& q : quads) q = BellAngles{u(rng), u(rng), u(rng), u(rng)};
            std::vector<double> s(scan);
            parallel_for(scan, c.worker_count(), [&](std::size_t i) { s[i] = lhv_exact_S(coeffs, quads[i]).S; });
            scan_max = *std::max_element(s.begin(), s.end());
        }
        r.add_row({r0, est.S, est.standard_error, exact, est.p_pp[0], est.p_pp[1], est.p_pp[2],
                   est.p_pp[3], est.p_plus_a, est.p_plus_b, static_cast<std::int64_t>(est.n_samples),
                   static_cast<std::int64_t>(est.seed), static_cast<std::int64_t>(est.proposals),
                   est.acceptance, est.expected_acceptance, scan_max});
    }
    return r;
}

// ---------------------------------------------------------------- homodyne

struct HomodyneArgs {
    double r0 = 1.1;
    std::string E = "2,5,10,20";
    std::string angles = "paper";
    int lo_cutoff = 0;
    double leakage_tol = kDefaultLeakageTol;
    std::optional<double> bin_width;
    std::string table_path;
    std::string table_angles;
};

struct HomodyneOutput {
    Report convergence;
    std::optional<Report> table;
};

HomodyneOutput cmd_homodyne(const HomodyneArgs& a, const Common& c) {
    if (!(a.r0 >= 0.0)) throw UsageError("--r0: amplitude must be non-negative");
    const std::vector<double> Es = parse_list(a.E, "--E");
    for (double E : Es) {
        if (E < 0.0) throw UsageError("--E: amplitudes must be non-negative");
    }
    if (a.lo_cutoff < 0) throw UsageError("--lo-cutoff: must be non-negative");
    if (a.bin_width && *a.bin_width < 1.0) throw UsageError("--bin-width: must be at least 1");
    const BellAngles angles = parse_angles(a.angles);
    const CircleStateCoeffs coeffs = circle_state_coeffs(a.r0, c.tail_tol);
    const double ideal = bell_S(coeffs, angles).S;

    auto oscillator = [&](double E) {
        LocalOscillator lo = LocalOscillator::with_default_cutoff(E);
        if (a.lo_cutoff > 0) lo.lo_cutoff = a.lo_cutoff;
        return lo;
    };

    struct Row {
        LocalOscillator lo;
        double S = 0.0;
        double leakage = 0.0;
        double binned = 0.0;
    };
    std::vector<Row> rows(Es.size());
    parallel_for(Es.size(), c.worker_count(), [&](std::size_t i) {
        Row& row = rows[i];
        row.lo = oscillator(Es[i]);
        const OutcomeKernels k =
            outcome_kernels(photocurrent_decomposition(coeffs.cutoff, row.lo, 0.0, a.leakage_tol));
        row.S = finite_E_S(coeffs, k, angles).S;
        row.leakage = k.leakage;
        if (a.bin_width) row.binned = coarse_grained_S(coeffs, k, angles, *a.bin_width).S;
    });

    HomodyneOutput out;
    Report& r = out.convergence;
    r.command = "homodyne";
    r.config = common_config(c);
    r.config["r0"] = a.r0;
    r.config["E"] = Es;
    r.config["angles"] = angles_json(angles);
    r.config["lo_cutoff"] = a.lo_cutoff > 0 ? nlohmann::json(a.lo_cutoff) : nlohmann::json("auto");
    r.config["leakage_tol"] = a.leakage_tol;
    if (a.bin_width) r.config["bin_width"] = *a.bin_width;
    r.columns = {"E", "lo_cutoff", "S_E", "S_ideal", "abs_error", "leakage"};
    if (a.bin_width) r.columns.push_back("S_binned");
    for (std::size_t i = 0; i < Es.size(); ++i) {
        std::vector<Cell> cells{Es[i], static_cast<std::int64_t>(rows[i].lo.lo_cutoff), rows[i].S,
                                ideal, std::abs(rows[i].S - ideal), rows[i].leakage};
        if (a.bin_width) cells.emplace_back(rows[i].binned);
        r.add_row(std::move(cells));
    }
    r.summary["cutoff"] = coeffs.cutoff;

    if (!a.table_path.empty()) {
        double theta = angles.theta, phi = angles.phi;
        if (!a.table_angles.empty()) {
            const std::vector<double> tp = parse_list(a.table_angles, "--table-angles");
            if (tp.size() != 2) throw UsageError("--table-angles: expected theta,phi");
            theta = tp[0];
            phi = tp[1];
        }
        const LocalOscillator lo = oscillator(Es.front());
        const JointOutcomeTable t = joint_photocurrent_dist(coeffs, lo, theta, phi);
        Report tr;
        tr.command = "homodyne-table";
        tr.config = common_config(c);
        tr.config["r0"] = a.r0;
        tr.config["E"] = Es.front();
        tr.config["lo_cutoff"] = lo.lo_cutoff;
        tr.config["theta"] = theta;
        tr.config["phi"] = phi;
        tr.columns = {"mu", "nu", "probability"};
        for (std::size_t i = 0; i < t.mu.size(); ++i)
            for (std::size_t j = 0; j < t.nu.size(); ++j)
                tr.add_row({static_cast<std::int64_t>(t.mu[i]), static_cast<std::int64_t>(t.nu[j]),
                            t.probability(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))});
        tr.summary["total"] = t.total();
        tr.summary["leakage"] = t.leakage;
        out.table = std::move(tr);
    }
    return out;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Continuous-variable Bell-CH test for the circle state"};
    app.set_version_flag("--version", std::string(version_string()));
    app.require_subcommand(1);

    Common common;
    SweepArgs sweep;
    OptimizeArgs optimize;
    DistArgs dist;
    LhvArgs lhv;
    HomodyneArgs homodyne;

    auto* s = app.add_subcommand("sweep", "S(r0) table and violation window");
    s->add_option("--r0", sweep.r0, "Range start:stop:step")->capture_default_str();
    s->add_option("--angles", sweep.angles, "paper | optimized")->capture_default_str();
    s->add_option("--grid-points", sweep.grid_points, "Optimizer grid per axis")
        ->check(CLI::Range(2, 512))
        ->capture_default_str();
    s->add_option("--window-tol", sweep.window_tol, "Bisection tolerance on window endpoints")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_common(s, common);

    auto* o = app.add_subcommand("optimize", "Maximize S over measurement angles");
    o->add_option("--r0", optimize.r0, "Amplitude(s), comma separated")->capture_default_str();
    o->add_option("--grid-points", optimize.grid_points, "Coarse grid per axis")
        ->check(CLI::Range(2, 512))
        ->capture_default_str();
    o->add_option("--refine-starts", optimize.refine_starts, "Simplex starts")
        ->check(CLI::Range(1, 1000))
        ->capture_default_str();
    o->add_option("--tolerance", optimize.tolerance, "Simplex tolerance in S")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_common(o, common);

    auto* d = app.add_subcommand("dist", "Joint quadrature density on a grid");
    d->add_option("--r0", dist.r0, "Amplitude")->capture_default_str();
    d->add_option("--chi", dist.chi, "Angle sum theta + phi")->capture_default_str();
    d->add_flag("--noisy", dist.noisy, "Add unit-variance noise to each quadrature");
    d->add_option("--grid", dist.grid, "x axis (and y unless --grid-y) as min:max:points")
        ->capture_default_str();
    d->add_option("--grid-y", dist.grid_y, "y axis as min:max:points");
    add_common(d, common);

    auto* l = app.add_subcommand("lhv", "Hidden-variable (Husimi) model S");
    l->add_option("--r0", lhv.r0, "Amplitude(s), comma separated")->capture_default_str();
    l->add_option("--angles", lhv.angles, "paper | theta,phi,theta_p,phi_p")->capture_default_str();
    l->add_option("--samples", lhv.samples, "Monte-Carlo samples")->capture_default_str();
    l->add_option("--seed", lhv.seed, "Random seed")->capture_default_str();
    l->add_option("--scan", lhv.scan, "Random angle quadruples for the exact max-S scan")
        ->capture_default_str();
    add_common(l, common);

    auto* h = app.add_subcommand("homodyne", "Finite local-oscillator S convergence");
    h->add_option("--r0", homodyne.r0, "Amplitude")->capture_default_str();
    h->add_option("--E", homodyne.E, "Oscillator amplitudes, comma separated")->capture_default_str();
    h->add_option("--angles", homodyne.angles, "paper | theta,phi,theta_p,phi_p")
        ->capture_default_str();
    h->add_option("--lo-cutoff", homodyne.lo_cutoff, "Oscillator photon cutoff (0 = automatic)")
        ->capture_default_str();
    h->add_option("--leakage-tol", homodyne.leakage_tol, "Maximum oscillator truncation leakage")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    h->add_option("--bin-width", homodyne.bin_width, "Also report S after binning outcomes");
    h->add_option("--table", homodyne.table_path, "Write the joint outcome table for the first E");
    h->add_option("--table-angles", homodyne.table_angles, "theta,phi for --table");
    add_common(h, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (s->parsed()) {
            emit(cmd_sweep(sweep, common), common, out, common.out_path);
        } else if (o->parsed()) {
            emit(cmd_optimize(optimize, common), common, out, common.out_path);
        } else if (d->parsed()) {
            emit(cmd_dist(dist, common), common, out, common.out_path);
        } else if (l->parsed()) {
            emit(cmd_lhv(lhv, common), common, out, common.out_path);
        } else if (h->parsed()) {
            HomodyneOutput res = cmd_homodyne(homodyne, common);
            emit(res.convergence, common, out, common.out_path);
            if (res.table) emit(*res.table, common, out, homodyne.table_path);
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitOk;
}

}  // namespace cvbell::cli
