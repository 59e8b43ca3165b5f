#include "cvbell/bell.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "cvbell/errors.hpp"
#include "cvbell/nelder_mead.hpp"
#include "cvbell/parallel.hpp"
#include "cvbell/quadrature.hpp"

namespace cvbell {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// x shifted by a multiple of 2pi into [lo, lo + 2pi).
double wrap_from(double x, double lo) {
    double w = x - kTwoPi * std::floor((x - lo) / kTwoPi);
    if (w >= lo + kTwoPi) w -= kTwoPi;
    return w;
}

void require_finite(const BellAngles& a) {
    if (!(std::isfinite(a.theta) && std::isfinite(a.theta_p) && std::isfinite(a.phi) &&
          std::isfinite(a.phi_p))) {
        throw InputError("Bell angles must be finite");
    }
}

}  // namespace

BellAngles BellAngles::paper() {
    return BellAngles{.theta = 0.0, .theta_p = kPi / 2, .phi = -kPi / 4, .phi_p = -3 * kPi / 4};
}

ReducedAngles reduce(const BellAngles& a) {
    return ReducedAngles{a.theta + a.phi, a.theta + a.phi_p, a.theta_p + a.phi};
}

BellAngles expand(const ReducedAngles& r) {
    return BellAngles{.theta = 0.0, .theta_p = r.chi3 - r.chi1, .phi = r.chi1, .phi_p = r.chi2};
}

ReducedAngles canonical(const ReducedAngles& r) {
    ReducedAngles out = r;
    double c1 = wrap_from(out.chi1, -kPi);
    if (c1 < 0.0) {
        out.chi1 = -out.chi1;
        out.chi2 = -out.chi2;
        out.chi3 = -out.chi3;
        c1 = -c1;
    }
    out.chi1 = c1;
    out.chi2 = wrap_from(out.chi2, out.chi1);
    out.chi3 = wrap_from(out.chi3, -kPi);
    return out;
}

BellResult ch_score(const std::function<double(double)>& p_pp, double p_plus_a, double p_plus_b,
                    const BellAngles& angles) {
    require_finite(angles);
    BellResult out;
    out.angles = angles;
    out.p_pp = {p_pp(angles.theta + angles.phi), p_pp(angles.theta + angles.phi_p),
                p_pp(angles.theta_p + angles.phi), p_pp(angles.theta_p + angles.phi_p)};
    out.p_plus_a = p_plus_a;
    out.p_plus_b = p_plus_b;
    out.S = (out.p_pp[0] - out.p_pp[1] + out.p_pp[2] + out.p_pp[3]) / (p_plus_a + p_plus_b);
    return out;
}

BellResult bell_S(const CircleStateCoeffs& coeffs, const BellAngles& angles) {
    const Eigen::MatrixXd k = overlap_block(coeffs.cutoff);
    const double marginal = marginal_positive_prob(coeffs);
    auto p = [&](double chi) { return binned_joint_prob(coeffs.values(), k, k, chi); };
    BellResult out = ch_score(p, marginal, marginal, angles);
    out.r0 = coeffs.r0;
    return out;
}

BellResult paper_angle_S(const CircleStateCoeffs& coeffs) {
    const double quarter = joint_positive_prob(coeffs, kPi / 4);
    const double three_quarter = joint_positive_prob(coeffs, 3 * kPi / 4);
    BellResult out;
    out.angles = BellAngles::paper();
    out.r0 = coeffs.r0;
    out.p_pp = {quarter, three_quarter, quarter, quarter};
    out.p_plus_a = out.p_plus_b = 0.5;
    out.S = 3.0 * quarter - three_quarter;
    return out;
}

BellResult optimize_ch(const std::function<double(double)>& p_pp, double p_plus_a,
                       double p_plus_b, const OptimizerSettings& opts) {
    if (opts.grid_points < 4 || opts.max_iterations < 1 || !(opts.tolerance > 0.0) ||
        opts.refine_starts < 1) {
        throw InputError("optimize_angles: invalid optimizer settings");
    }
    const int g = opts.grid_points;
    const double h = kTwoPi / g;
    const double denom = p_plus_a + p_plus_b;

    // On a uniform periodic lattice chi4 = chi2 + chi3 - chi1 is again a
    // lattice point, so the coarse stage only needs P++ at g angles.
    std::vector<double> lattice(g);
    for (int i = 0; i < g; ++i) lattice[i] = p_pp(-kPi + i * h);

    struct Candidate {
        double s;
        int i, j, k;
    };
    std::vector<Candidate> grid;
    grid.reserve(static_cast<std::size_t>(g) * g * g);
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j)
            for (int k = 0; k < g; ++k) {
                const int l = ((j + k - i) % g + g) % g;
                const double s = (lattice[i] - lattice[j] + lattice[k] + lattice[l]) / denom;
                grid.push_back({s, i, j, k});
            }
    const auto starts = std::min<std::size_t>(grid.size(), static_cast<std::size_t>(opts.refine_starts));
    std::partial_sort(grid.begin(), grid.begin() + static_cast<std::ptrdiff_t>(starts), grid.end(),
                      [](const Candidate& a, const Candidate& b) { return a.s > b.s; });

    auto negated_s = [&](const std::array<double, 3>& x) {
        const ReducedAngles r{x[0], x[1], x[2]};
        return -(p_pp(r.chi1) - p_pp(r.chi2) + p_pp(r.chi3) + p_pp(r.chi4())) / denom;
    };

    SimplexResult<3> best;
    best.value = 1.0;  // any -S is below this
    bool have_best = false;
    int total_iterations = 0;
    for (std::size_t s = 0; s < starts; ++s) {
        const auto& c = grid[s];
        const std::array<double, 3> x0{-kPi + c.i * h, -kPi + c.j * h, -kPi + c.k * h};
        auto run = nelder_mead<3>(negated_s, x0, 0.5 * h, opts.tolerance, opts.max_iterations);
        total_iterations += run.iterations;
        if (!have_best || run.value < best.value) {
            best = run;
            have_best = true;
        }
    }

    const ReducedAngles canon = canonical(ReducedAngles{best.x[0], best.x[1], best.x[2]});
    BellResult out = ch_score(p_pp, p_plus_a, p_plus_b, expand(canon));
    out.converged = best.converged;
    out.iterations = total_iterations;
    return out;
}

BellResult optimize_angles(const CircleStateCoeffs& coeffs, const OptimizerSettings& opts) {
    const Eigen::MatrixXd k = overlap_block(coeffs.cutoff);
    const double marginal = marginal_positive_prob(coeffs);
    auto p = [&](double chi) { return binned_joint_prob(coeffs.values(), k, k, chi); };
    BellResult out = optimize_ch(p, marginal, marginal, opts);
    out.r0 = coeffs.r0;
    return out;
}

BellResult evaluate_at(double r0, AngleMode mode, const OptimizerSettings& opts, double tail_tol) {
    const CircleStateCoeffs coeffs = circle_state_coeffs(r0, tail_tol);
    return mode == AngleMode::paper ? paper_angle_S(coeffs) : optimize_angles(coeffs, opts);
}

SweepResult sweep_r0(const SweepOptions& opts) {
    if (!(std::isfinite(opts.r0_min) && std::isfinite(opts.r0_max) && std::isfinite(opts.step))) {
        throw InputError("sweep_r0: non-finite range");
    }
    if (opts.r0_min < 0.0 || !(opts.r0_min < opts.r0_max) || !(opts.step > 0.0)) {
        throw InputError("sweep_r0: require 0 <= r0_min < r0_max and step > 0");
    }
    if (!(opts.window_tol > 0.0)) {
        throw InputError("sweep_r0: window tolerance must be positive");
    }

    const double span = opts.r0_max - opts.r0_min;
    const auto count = static_cast<std::size_t>(std::floor(span / opts.step + 1e-9)) + 1;
    SweepResult out;
    out.points.resize(count);
    parallel_for(count, opts.jobs, [&](std::size_t i) {
        const double r0 = opts.r0_min + static_cast<double>(i) * opts.step;
        out.points[i] = evaluate_at(r0, opts.mode, opts.optimizer, opts.tail_tol);
    });

    auto violates = [](const BellResult& r) { return r.S > 1.0; };
    auto bisect = [&](double lo, double hi, bool lo_violates) {
        while (hi - lo > opts.window_tol) {
            const double mid = 0.5 * (lo + hi);
            const bool v = evaluate_at(mid, opts.mode, opts.optimizer, opts.tail_tol).S > 1.0;
            if (v == lo_violates) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    };

    std::optional<ViolationInterval> open;
    for (std::size_t i = 0; i < count; ++i) {
        const bool v = violates(out.points[i]);
        if (v && !open) {
            ViolationInterval w;
            if (i == 0) {
                w.lower = out.points[0].r0;
                w.lower_closed = false;
            } else {
                w.lower = bisect(out.points[i - 1].r0, out.points[i].r0, false);
            }
            open = w;
        } else if (!v && open) {
            open->upper = bisect(out.points[i - 1].r0, out.points[i].r0, true);
            out.windows.push_back(*open);
            open.reset();
        }
    }
    if (open) {
        open->upper = out.points.back().r0;
        open->upper_closed = false;
        out.windows.push_back(*open);
    }
    return out;
}

}  // namespace cvbell
