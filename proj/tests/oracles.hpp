#pragma once

// Independent reference computations used only by tests. Nothing here calls
// into the library path it is used to check.

#include <complex>
#include <cstdint>
#include <vector>

#include "cvbell/fock.hpp"

namespace cvbell::oracle {

/// I_0(x) from its power series sum (x/2)^(2k) / (k!)^2.
double bessel_i0(double x);

/// Closed form psi_n(x) = (2pi)^(-1/4) (2^n n!)^(-1/2) H_n(x/sqrt2) e^(-x^2/4) via std::hermite.
double psi_closed_form(int n, double x);

/// <n, m| Psi> for the phase-integrated coherent-state product, from a
/// `points`-node periodic rule over the phase. Rows n, columns m.
std::vector<std::vector<double>> phase_integrated_projection(double r0, int n_max, int points);

/// Adaptive Gauss-Kronrod integral of psi_n psi_m over [0, inf).
double half_range_overlap_quadrature(int n, int m);

/// Coefficients normalized over an explicitly chosen cutoff.
CircleStateCoeffs coeffs_with_cutoff(double r0, int cutoff);

/// Tensor Gauss-Legendre integral of the joint density over the positive
/// quadrant [0, upper]^2.
double quadrant_integral(const CircleStateCoeffs& coeffs, double chi, double upper);

struct McEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
};

/// Rejection sampling of (x, y) from the joint density on a box with a
/// uniform proposal; returns the fraction with x >= 0 and y >= 0.
McEstimate mc_positive_quadrant(const CircleStateCoeffs& coeffs, double chi, std::uint64_t samples,
                                std::uint64_t seed);

/// 2D Gauss-Legendre integral of noisy_joint_density over a box.
double noisy_box_integral(const CircleStateCoeffs& coeffs, double chi, double x0, double x1,
                          double y0, double y1);

/// Joint density at separate settings (theta, phi) from the coherent-state
/// phase integral, using <x|alpha> = (2pi)^(-1/4) exp(-x^2/4 + alpha x - alpha^2/2 - |alpha|^2/2)
/// and a `points`-node periodic rule in the phase.
double density_from_phase_integral(double r0, double theta, double phi, double x, double y,
                                   int points = 64);

/// Positive-quadrant integral of density_from_phase_integral with a fixed
/// composite Gauss-Legendre rule on [0, 2 r0 + 8]^2.
double phase_integral_quadrant(double r0, double theta, double phi);

/// Noisy joint density by brute-force 2D convolution of
/// density_from_phase_integral with unit-variance Gaussians.
double noisy_density_by_convolution(double r0, double theta, double phi, double x, double y);

}  // namespace cvbell::oracle
