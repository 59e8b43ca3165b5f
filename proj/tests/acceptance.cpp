// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "cvbell/bell.hpp"
#include "cvbell/homodyne.hpp"
#include "cvbell/lhv.hpp"
#include "cvbell/parallel.hpp"
#include "cvbell/quadrature.hpp"
#include "oracles.hpp"

using namespace cvbell;

namespace {

constexpr double kPi = std::numbers::pi;

int workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [x]");
    }
};

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

int failures = 0;

void criterion(int id, const char* title, const std::function<void(Verdict&)>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    body(v);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %d %s: %s (%.2f s)\n", v.pass ? "PASS" : "FAIL", id, title, v.detail.c_str(), secs);
    std::fflush(stdout);
    if (!v.pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
    criterion(1, "peak violation", [](Verdict& v) {
        const auto t0 = std::chrono::steady_clock::now();
        const double s = paper_angle_S(circle_state_coeffs(1.1)).S;
        const double t = seconds_since(t0);
        v.require(std::abs(s - 1.0157) <= 0.002, fmt("S(1.1) = %.6f vs 1.0157 +- 0.002", s));
        v.require(t < 1.0, fmt("runtime %.4f s < 1 s", t));
    });

    criterion(2, "violation window", [](Verdict& v) {
        SweepOptions opts;
        opts.r0_min = 0.0;
        opts.r0_max = 1.99;
        opts.step = 0.01;
        opts.jobs = workers();
        const auto t0 = std::chrono::steady_clock::now();
        const SweepResult res = sweep_r0(opts);
        const double t = seconds_since(t0);
        v.require(res.points.size() == 200, fmt("%zu sweep points", res.points.size()));
        v.require(res.windows.size() == 1, fmt("%zu interval(s) with S > 1", res.windows.size()));
        if (!res.windows.empty()) {
            const ViolationInterval& w = res.windows.front();
            v.require(w.lower_closed && w.upper_closed, "interval closed inside the range");
            v.require(std::abs(w.lower - 0.96) <= 0.03, fmt("lower %.4f vs 0.96 +- 0.03", w.lower));
            v.require(std::abs(w.upper - 1.41) <= 0.03, fmt("upper %.4f vs 1.41 +- 0.03", w.upper));
        }
        v.require(t < 10.0, fmt("runtime %.3f s < 10 s", t));
    });

    criterion(3, "classical endpoints", [](Verdict& v) {
        const double s0 = paper_angle_S(circle_state_coeffs(0.0)).S;
        v.require(std::abs(s0 - 0.5) <= 1e-12, fmt("|S(0) - 0.5| = %.2e", std::abs(s0 - 0.5)));
        const auto big = circle_state_coeffs(2.5);
        const double paper = paper_angle_S(big).S;
        OptimizerSettings opts;
        opts.grid_points = 64;
        opts.refine_starts = 12;
        const double best = optimize_angles(big, opts).S;
        v.require(paper <= 1.0, fmt("S(2.5) standard angles = %.6f <= 1", paper));
        v.require(best <= 1.0, fmt("S(2.5) optimized = %.10f <= 1", best));
    });

    criterion(4, "structural properties", [](Verdict& v) {
        std::mt19937_64 rng(404);
        std::uniform_real_distribution<double> r0d(0.0, 2.5), ang(-kPi, kPi);
        double worst_marginal = 0.0;
        for (int i = 0; i < 20; ++i) {
            const auto s = circle_state_coeffs(r0d(rng));
            const double theta = ang(rng), phi = ang(rng);
            // Site-A marginal two ways: directly, and by summing the joint over site B.
            const double direct = marginal_positive_prob(s);
            const double summed = joint_positive_prob(s, theta + phi) + joint_positive_negative_prob(s, theta + phi);
            worst_marginal = std::max({worst_marginal, std::abs(direct - 0.5), std::abs(summed - 0.5)});
        }
        v.require(worst_marginal <= 1e-12, fmt("max |P+ - 0.5| = %.2e over 20 (r0, theta)", worst_marginal));

        std::uniform_real_distribution<double> r0s(0.3, 2.0);
        double worst_reflect = 0.0, worst_sum = 0.0;
        for (int i = 0; i < 100; ++i) {
            const double r0 = r0s(rng);
            const auto s = circle_state_coeffs(r0);
            const double theta = ang(rng), phi = ang(rng), shift = ang(rng);
            const double chi = theta + phi;
            worst_reflect = std::max(worst_reflect, std::abs(joint_positive_prob(s, chi) - joint_positive_prob(s, -chi)));
            // Independent two-setting density; same sum, different individual angles.
            const double a = oracle::phase_integral_quadrant(r0, theta, phi);
            const double b = oracle::phase_integral_quadrant(r0, theta + shift, phi - shift);
            worst_sum = std::max(worst_sum, std::abs(a - b));
        }
        v.require(worst_reflect <= 1e-9, fmt("max |P(chi) - P(-chi)| = %.2e", worst_reflect));
        v.require(worst_sum <= 1e-9, fmt("max angle-sum deviation = %.2e over 100 sets", worst_sum));
    });

    criterion(5, "oracle triple agreement", [](Verdict& v) {
        const std::vector<std::pair<double, double>> points{
            {0.5, 0.0},      {0.5, kPi / 2},  {0.8, kPi / 4},     {1.1, kPi / 4}, {1.1, 3 * kPi / 4},
            {1.1, kPi},      {1.4, 0.3},      {1.7, 2.0},         {2.0, kPi / 4}, {2.5, 1.2}};
        std::vector<double> quad_gap(points.size()), z(points.size());
        parallel_for(points.size(), workers(), [&](std::size_t i) {
            const auto [r0, chi] = points[i];
            const auto s = circle_state_coeffs(r0);
            const double series = joint_positive_prob(s, chi);
            quad_gap[i] = std::abs(series - oracle::quadrant_integral(s, chi, 2.0 * r0 + 10.0));
            const auto mc = oracle::mc_positive_quadrant(s, chi, 1000000, 500 + i);
            z[i] = std::abs(series - mc.mean) / mc.standard_error;
        });
        const double worst_quad = *std::max_element(quad_gap.begin(), quad_gap.end());
        const double worst_z = *std::max_element(z.begin(), z.end());
        v.require(worst_quad <= 1e-6, fmt("max |series - quadrant integral| = %.2e at %zu points", worst_quad, points.size()));
        v.require(worst_z <= 3.0, fmt("max |series - MC| = %.2f SE with 1e6 samples each", worst_z));
    });

    criterion(6, "LHV bound", [](Verdict& v) {
        const auto t0 = std::chrono::steady_clock::now();
        std::mt19937_64 rng(606);
        std::uniform_real_distribution<double> ang(-kPi, kPi);
        double worst = 0.0;
        for (double r0 : {0.5, 1.1, 2.0}) {
            const auto s = circle_state_coeffs(r0);
            std::vector<BellAngles> quads(1000);
            for (auto& q : quads) q = BellAngles{ang(rng), ang(rng), ang(rng), ang(rng)};
            std::vector<double> vals(quads.size());
            parallel_for(quads.size(), workers(), [&](std::size_t i) { vals[i] = lhv_exact_S(s, quads[i]).S; });
            worst = std::max(worst, *std::max_element(vals.begin(), vals.end()));
        }
        v.require(worst <= 1.0 + 1e-9, fmt("max exact noisy S = %.9f over 3000 quadruples", worst));

        std::normal_distribution<double> g(0.0, 3.0);
        long negative = 0;
        for (double r0 : {0.5, 1.1, 2.5}) {
            const auto s = circle_state_coeffs(r0);
            for (int i = 0; i < 1000000; ++i) {
                if (husimi_density(s, {g(rng), g(rng)}, {g(rng), g(rng)}) < 0.0) ++negative;
            }
        }
        v.require(negative == 0, fmt("%ld negative Husimi values at 3e6 points", negative));
        const double t = seconds_since(t0);
        v.require(t < 300.0, fmt("runtime %.1f s < 300 s", t));
    });

    criterion(7, "noisy-statistics equivalence", [](Verdict& v) {
        // Husimi-sampled quadratures binned into a 21 x 21 grid of contiguous
        // boxes, compared against the integrated noisy density.
        const auto s = circle_state_coeffs(1.1);
        const double theta = 0.0, phi = -kPi / 4;
        const int side = 21;
        const double half = 4.0, width = 2.0 * half / (side - 1);
        const double lo = -half - 0.5 * width;
        const std::uint64_t n = 4000000, seed = 7;

        const std::size_t chunks = chunk_count(n);
        std::vector<std::vector<std::uint64_t>> counts(chunks, std::vector<std::uint64_t>(side * side, 0));
        parallel_for(chunks, workers(), [&](std::size_t k) {
            HusimiSampler sampler(s);
            auto engine = chunk_engine(seed, k);
            for (std::uint64_t i = 0; i < chunk_size(n, k); ++i) {
                const HiddenVariableSample l = sampler(engine);
                const double x = 2.0 * (l.alpha * std::polar(1.0, -theta)).real();
                const double y = 2.0 * (l.beta * std::polar(1.0, -phi)).real();
                const auto ix = static_cast<long>(std::floor((x - lo) / width));
                const auto iy = static_cast<long>(std::floor((y - lo) / width));
                if (ix >= 0 && ix < side && iy >= 0 && iy < side) ++counts[k][ix * side + iy];
            }
        });
        std::vector<double> z(side * side);
        parallel_for(static_cast<std::size_t>(side * side), workers(), [&](std::size_t cell) {
            const int ix = static_cast<int>(cell) / side, iy = static_cast<int>(cell) % side;
            std::uint64_t c = 0;
            for (const auto& chunk : counts) c += chunk[cell];
            const double x0 = lo + ix * width, y0 = lo + iy * width;
            const double p = oracle::noisy_box_integral(s, theta + phi, x0, x0 + width, y0, y0 + width);
            const double est = static_cast<double>(c) / static_cast<double>(n);
            z[cell] = std::abs(est - p) / std::sqrt(p * (1.0 - p) / static_cast<double>(n));
        });
        const double worst = *std::max_element(z.begin(), z.end());
        const auto over = std::count_if(z.begin(), z.end(), [](double zi) { return zi > 3.0; });
        double chi2 = 0.0;
        for (double zi : z) chi2 += zi * zi;
        v.require(worst <= 3.0, fmt("max |z| = %.2f over 441 probes (seed 7, 4e6 samples)", worst));
        v.detail += fmt("; %ld probes above 3 SE; sum z^2 = %.1f for 441 dof", static_cast<long>(over), chi2);
    });

    criterion(8, "homodyne convergence", [](Verdict& v) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto s = circle_state_coeffs(1.1);
        const double ideal = paper_angle_S(s).S;
        const std::vector<double> Es{2.0, 5.0, 10.0, 20.0};
        std::vector<double> err(Es.size());
        parallel_for(Es.size(), workers(), [&](std::size_t i) {
            err[i] = std::abs(finite_E_S(s, LocalOscillator::with_default_cutoff(Es[i]), BellAngles::paper()).S - ideal);
        });
        bool decreasing = true;
        for (std::size_t i = 1; i < err.size(); ++i) decreasing &= err[i] < err[i - 1];
        v.require(decreasing, fmt("|S_E - S_ideal| = %.2e, %.2e, %.2e, %.2e", err[0], err[1], err[2], err[3]));
        v.require(err[3] < 0.01, fmt("E = 20 error %.2e < 0.01", err[3]));

        const double E = 10.0;
        const OutcomeKernels k = outcome_kernels(photocurrent_decomposition(s.cutoff, LocalOscillator::with_default_cutoff(E), 0.0));
        const double ks = ks_distance(k.outcomes, site_outcome_distribution(s, k), E,
                                      [&](double x) { return marginal_cdf(s, x); });
        v.require(ks < 0.02, fmt("KS(mu / E, quadrature marginal) = %.4f < 0.02 at E = 10", ks));
        const double t = seconds_since(t0);
        v.require(t < 120.0, fmt("runtime %.1f s < 120 s", t));
    });

    criterion(9, "density structure at r0 = 2.5", [](Verdict& v) {
        const double r0 = 2.5;
        const JointDensityGrid g = joint_density_grid(circle_state_coeffs(r0), 0.0, GridSpec{}, workers());
        const Eigen::Index nx = g.values.rows(), ny = g.values.cols();
        struct Peak {
            double value, x, y;
        };
        std::vector<Peak> peaks;
        for (Eigen::Index i = 1; i + 1 < nx; ++i)
            for (Eigen::Index j = 1; j + 1 < ny; ++j) {
                const double c = g.values(i, j);
                bool is_max = true;
                for (int a = -1; a <= 1 && is_max; ++a)
                    for (int b = -1; b <= 1; ++b)
                        if ((a || b) && g.values(i + a, j + b) > c) is_max = false;
                if (is_max) peaks.push_back({c, g.x_grid[i], g.y_grid[j]});
            }
        std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.value > b.value; });
        bool located = peaks.size() >= 2;
        std::string where;
        for (std::size_t p = 0; p < std::min<std::size_t>(2, peaks.size()); ++p) {
            located &= std::abs(std::abs(peaks[p].x) - 2 * r0) <= 0.5 && std::abs(std::abs(peaks[p].y) - 2 * r0) <= 0.5;
            where += fmt("%s(%.1f, %.1f)", p ? ", " : "", peaks[p].x, peaks[p].y);
        }
        v.require(located, "two largest maxima " + where + " within 0.5 of (+-5, +-5)");

        // Slope sign changes along the anti-diagonal, above the rounding floor.
        const double floor = 1e-12 * g.values.maxCoeff();
        std::vector<double> anti;
        for (Eigen::Index i = 0; i < nx; ++i) anti.push_back(g.values(i, ny - 1 - i));
        int changes = 0, last = 0;
        for (std::size_t i = 1; i < anti.size(); ++i) {
            if (anti[i] < floor && anti[i - 1] < floor) continue;
            const int sign = anti[i] > anti[i - 1] ? 1 : (anti[i] < anti[i - 1] ? -1 : 0);
            if (sign != 0 && last != 0 && sign != last) ++changes;
            if (sign != 0) last = sign;
        }
        v.require(changes >= 3, fmt("%d slope sign changes along the anti-diagonal", changes));
    });

    std::printf("%s: %d criterion(s) failed\n", failures ? "FAILED" : "ALL PASSED", failures);
    return failures ? 1 : 0;
}
