#pragma once

#include <span>
#include <vector>

namespace cvbell {

inline constexpr int kCutoffCap = 256;
inline constexpr double kDefaultTailTol = 1e-14;

/**
 * Number-basis coefficients of the phase-averaged two-mode coherent state
 *
 *     |Psi> = sum_n c_n |n>_A |n>_B,   c_n proportional to r0^(2n) / n!
 *
 * truncated at `cutoff`. The coefficients are renormalized after truncation;
 * `tail_bound` is a rigorous upper bound on the probability that was dropped.
 */
struct CircleStateCoeffs {
    double r0 = 0.0;
    int cutoff = 0;
    std::vector<double> c{1.0};
    double tail_bound = 0.0;

    std::size_t size() const noexcept { return c.size(); }
    std::span<const double> values() const noexcept { return c; }
};

/// Builds the truncated coefficients. The cutoff is the smallest index whose
/// discarded tail is below `tail_tol`; throws TruncationError past `hard_cap`.
CircleStateCoeffs circle_state_coeffs(double r0, double tail_tol = kDefaultTailTol,
                                      int hard_cap = kCutoffCap);

/// sum_k r0^(4k) / (k!)^2 summed to convergence. Equals I_0(2 r0^2).
double circle_normalizer_series(double r0);

/**
 * Harmonic-oscillator eigenfunctions in the convention where the vacuum
 * quadrature variance is 1:
 *
 *     psi_n(x) = (2 pi)^(-1/4) (2^n n!)^(-1/2) H_n(x / sqrt 2) exp(-x^2 / 4)
 *
 * Evaluated by the three-term recurrence on normalized functions
 *     psi_{n+1} = (x psi_n - sqrt(n) psi_{n-1}) / sqrt(n+1)
 * with the Gaussian carried as a separate log-scale so nothing underflows
 * before the final multiply.
 */
class OscillatorBasis {
public:
    explicit OscillatorBasis(int cutoff = kCutoffCap);

    int cutoff() const noexcept { return cutoff_; }

    double operator()(int n, double x) const;

    /// Fills out[n] = psi_n(x) for n = 0 .. out.size()-1 (size must not exceed cutoff+1).
    void evaluate(double x, std::span<double> out) const;

private:
    int cutoff_;
};

/// psi_n(x) against the hard cutoff cap.
double oscillator_eigenfunction(int n, double x);

/// Fills out[n] = psi_n(x) for every n in range; no cutoff validation.
void eigenfunctions_at(double x, std::span<double> out);

}  // namespace cvbell
