#pragma once

#include <array>
#include <functional>
#include <vector>

#include "cvbell/fock.hpp"

namespace cvbell {

/// Measurement angles (radians): theta, theta' at site A and phi, phi' at site B.
struct BellAngles {
    double theta = 0.0;
    double theta_p = 0.0;
    double phi = 0.0;
    double phi_p = 0.0;

    /// (theta, phi, theta', phi') = (0, -pi/4, pi/2, -3pi/4).
    static BellAngles paper();
};

/// The CH score depends on the angle sums only:
/// chi1 = theta + phi, chi2 = theta + phi', chi3 = theta' + phi, and
/// theta' + phi' = chi2 + chi3 - chi1.
struct ReducedAngles {
    double chi1 = 0.0;
    double chi2 = 0.0;
    double chi3 = 0.0;

    double chi4() const { return chi2 + chi3 - chi1; }
};

ReducedAngles reduce(const BellAngles& a);
/// A representative quadruple with theta = 0.
BellAngles expand(const ReducedAngles& r);

/// Representative of the symmetry class of `r`: chi1 in [0, pi), chi2 in
/// [chi1, chi1 + 2pi), chi3 in [-pi, pi). Reflection of all sums and 2pi
/// shifts leave S unchanged.
ReducedAngles canonical(const ReducedAngles& r);

struct BellResult {
    double S = 0.0;
    /// P++ at (theta,phi), (theta,phi'), (theta',phi), (theta',phi').
    std::array<double, 4> p_pp{};
    /// Denominator terms P+(theta') at A and P+(phi) at B.
    double p_plus_a = 0.5;
    double p_plus_b = 0.5;
    BellAngles angles;
    double r0 = 0.0;
    /// Optimizer bookkeeping; always true for direct evaluations.
    bool converged = true;
    int iterations = 0;
};

/// S = [P++(t,f) - P++(t,f') + P++(t',f) + P++(t',f')] / [P+(t') + P+(f)]
/// for any pair of sign-binned statistics.
BellResult ch_score(const std::function<double(double chi)>& p_pp, double p_plus_a,
                    double p_plus_b, const BellAngles& angles);

BellResult bell_S(const CircleStateCoeffs& coeffs, const BellAngles& angles);

/// S = 3 P++(pi/4) - P++(3pi/4), the standard-angle shortcut.
BellResult paper_angle_S(const CircleStateCoeffs& coeffs);

struct OptimizerSettings {
    int grid_points = 32;      ///< per axis over [-pi, pi)
    double tolerance = 1e-10;  ///< simplex spread in S
    int max_iterations = 4000;
    int refine_starts = 6;     ///< best distinct grid points handed to the simplex
};

/// Maximizes S over (chi1, chi2, chi3): coarse grid then Nelder-Mead from
/// the best grid points. Non-convergence leaves `converged == false` with the
/// best point found.
BellResult optimize_angles(const CircleStateCoeffs& coeffs, const OptimizerSettings& opts = {});

/// Same search for an arbitrary even, 2pi-periodic P++(chi) and marginals.
BellResult optimize_ch(const std::function<double(double chi)>& p_pp, double p_plus_a,
                       double p_plus_b, const OptimizerSettings& opts);

enum class AngleMode { paper, optimized };

struct SweepOptions {
    double r0_min = 0.0;
    double r0_max = 2.0;
    double step = 0.01;
    AngleMode mode = AngleMode::paper;
    OptimizerSettings optimizer;
    double tail_tol = kDefaultTailTol;
    double window_tol = 1e-3;
    int jobs = 1;
};

struct ViolationInterval {
    double lower = 0.0;
    double upper = 0.0;
    /// False when the curve still violates at the sweep boundary.
    bool lower_closed = true;
    bool upper_closed = true;
};

struct SweepResult {
    std::vector<BellResult> points;
    std::vector<ViolationInterval> windows;
};

/// S(r0) over [r0_min, r0_max] and every maximal interval where S > 1, with
/// endpoints refined by bisection on sign(S - 1).
SweepResult sweep_r0(const SweepOptions& opts);

/// S at a single r0 in the given mode.
BellResult evaluate_at(double r0, AngleMode mode, const OptimizerSettings& opts = {},
                       double tail_tol = kDefaultTailTol);

}  // namespace cvbell
