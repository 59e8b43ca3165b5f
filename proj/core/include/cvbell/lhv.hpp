#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "cvbell/bell.hpp"
#include "cvbell/fock.hpp"
#include "cvbell/quadrature.hpp"

namespace cvbell {

/// Hidden variable lambda = (alpha, beta): one complex amplitude per site.
struct HiddenVariableSample {
    std::complex<double> alpha;
    std::complex<double> beta;
};

/// Deterministic local response: +1 when 2 Re(amplitude e^{-i angle}) >= 0.
/// Site A calls it with (alpha, theta) and site B with (beta, phi); neither
/// argument list can see the other site's setting.
inline int local_response(std::complex<double> amplitude, double angle) {
    const double quadrature = 2.0 * (amplitude * std::polar(1.0, -angle)).real();
    return quadrature >= 0.0 ? +1 : -1;
}

/// pi^-2 exp(-|alpha|^2 - |beta|^2) |sum_n c_n (conj(alpha) conj(beta))^n / n!|^2
double husimi_density(const CircleStateCoeffs& coeffs, std::complex<double> alpha,
                      std::complex<double> beta);

/**
 * Exact rejection sampler for the two-site Husimi density.
 *
 * Proposal: the mixture sum_n (c_n / sum c) Q_n(alpha) Q_n(beta) of
 * number-state Husimi densities, drawn component-wise (|alpha|^2 is
 * Gamma(n+1), phase uniform). Cauchy-Schwarz bounds the target by
 * (sum c)^2 times the proposal, so the acceptance rate is 1 / (sum c)^2.
 */
class HusimiSampler {
public:
    explicit HusimiSampler(const CircleStateCoeffs& coeffs);

    template <class Engine>
    HiddenVariableSample operator()(Engine& engine);

    double expected_acceptance() const { return 1.0 / (coeff_sum_ * coeff_sum_); }
    std::uint64_t proposals() const { return proposals_; }
    std::uint64_t accepted() const { return accepted_; }

    /// Target / (bound * proposal) at a proposed point; in [0, 1].
    double acceptance_ratio(std::complex<double> alpha, std::complex<double> beta) const;

private:
    std::vector<double> c_;
    std::vector<double> log_c_;
    double coeff_sum_ = 1.0;
    std::discrete_distribution<int> component_;
    std::uint64_t proposals_ = 0;
    std::uint64_t accepted_ = 0;
    std::uint64_t max_consecutive_rejections_ = 0;
};

/// Independent engine for one chunk of a seeded run.
std::mt19937_64 chunk_engine(std::uint64_t seed, std::uint64_t chunk);

/// Number of fixed work chunks for a run of `n_samples`; independent of job count.
std::size_t chunk_count(std::uint64_t n_samples);
std::uint64_t chunk_size(std::uint64_t n_samples, std::size_t chunk);

/// G(n, m)(t) = integral psi_n(x) psi_m(x) N(t - x; 0, 1) dx, exact by Gauss-Hermite.
Eigen::MatrixXd noise_kernel(int cutoff, double t);

/// L(n, m) = integral psi_n(x) psi_m(x) Phi(x) dx: the probability of a noisy
/// result >= 0, resolved in the number basis.
Eigen::MatrixXd noisy_positive_kernel(int cutoff);

/// Joint density of (x + noise, y + noise) with independent unit-variance Gaussian noise.
double noisy_joint_density(const CircleStateCoeffs& coeffs, double theta, double phi, double x,
                           double y);

/// noisy_joint_density sampled on a grid at theta + phi = chi.
JointDensityGrid noisy_density_grid(const CircleStateCoeffs& coeffs, double chi,
                                    const GridSpec& grid = {}, int jobs = 1);

/// Noisy single-site density sum_n c_n^2 G(n, n)(x).
double noisy_marginal_density(const CircleStateCoeffs& coeffs, double x);

/// Exact CH score of the noisy (positive-Husimi) model from quadrant integrals.
BellResult lhv_exact_S(const CircleStateCoeffs& coeffs, const BellAngles& angles);

struct LhvEstimate {
    double S = 0.0;
    double standard_error = 0.0;
    std::array<double, 4> p_pp{};
    std::array<double, 4> p_pp_se{};
    double p_plus_a = 0.0;
    double p_plus_b = 0.0;
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;
    std::uint64_t proposals = 0;
    double acceptance = 0.0;
    double expected_acceptance = 0.0;
};

/// Monte-Carlo CH score of the hidden-variable model: lambda drawn from the
/// Husimi density, deterministic sign responses at each site.
LhvEstimate lhv_noisy_S(const CircleStateCoeffs& coeffs, const BellAngles& angles,
                        std::uint64_t n_samples, std::uint64_t seed, int jobs = 1);

struct MacroscopicCheck {
    double r0 = 0.0;
    double max_S = 0.0;
    BellResult best;
};

/// Noise-free S maximized over a dense angle grid plus simplex refinement.
BellResult dense_angle_search(const CircleStateCoeffs& coeffs, int grid_points = 64);

/// dense_angle_search restricted to the large-amplitude regime (r0 >= 2.5).
MacroscopicCheck macroscopic_limit_check(double r0, int grid_points = 64,
                                         double tail_tol = kDefaultTailTol);

// ---------------------------------------------------------------------------

[[noreturn]] void throw_sampler_stall(std::uint64_t proposals, std::uint64_t accepted,
                                      double expected_acceptance);

template <class Engine>
HiddenVariableSample HusimiSampler::operator()(Engine& engine) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uint64_t rejections = 0;
    while (true) {
        const int n = component_(engine);
        std::gamma_distribution<double> radial(n + 1.0, 1.0);
        const double ra = std::sqrt(radial(engine));
        const double rb = std::sqrt(radial(engine));
        const double pa = 2.0 * std::numbers::pi * unit(engine);
        const double pb = 2.0 * std::numbers::pi * unit(engine);
        const HiddenVariableSample s{std::polar(ra, pa), std::polar(rb, pb)};
        ++proposals_;
        if (unit(engine) < acceptance_ratio(s.alpha, s.beta)) {
            ++accepted_;
            return s;
        }
        if (++rejections > max_consecutive_rejections_) {
            throw_sampler_stall(proposals_, accepted_, expected_acceptance());
        }
    }
}

}  // namespace cvbell
