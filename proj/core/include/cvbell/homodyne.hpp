#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "cvbell/bell.hpp"
#include "cvbell/fock.hpp"

namespace cvbell {

inline constexpr double kDefaultLeakageTol = 1e-9;

/// Coherent local oscillator of real amplitude E, truncated at lo_cutoff photons.
struct LocalOscillator {
    double E = 0.0;
    int lo_cutoff = 20;

    /// Cutoff ceil(E^2 + 8E + 20).
    static LocalOscillator with_default_cutoff(double E);

    /// Poisson(E^2) probability above lo_cutoff.
    double tail() const;
};

/**
 * Spectral data of the photocurrent difference
 *
 *     I_D = c+^dag c+ - c-^dag c- = a2^dag a1 e^{-i theta} + a2 a1^dag e^{i theta}
 *
 * on signal (a1) and oscillator (a2). I_D conserves n1 + n2, so each block of
 * fixed total photon number N (basis |n1, N - n1>, n1 = 0..N) is an
 * independent real tridiagonal problem. theta only rotates the eigenvectors
 * by e^{i n1 theta}; `amplitudes` holds the theta = 0 overlaps
 *
 *     amplitudes(n, k) = <k | n>_1 |E>_2   at theta = 0
 *
 * for signal index n <= signal_cutoff and eigenvector k.
 */
struct PhotocurrentDecomposition {
    int signal_cutoff = 0;
    LocalOscillator lo;
    double theta = 0.0;
    std::vector<double> eigenvalues;  ///< outcome of eigenvector k
    std::vector<int> block;           ///< total photon number of eigenvector k
    Eigen::MatrixXd amplitudes;       ///< (signal_cutoff + 1) x eigenvector count
    double leakage = 0.0;             ///< probability missing from every signal row

    std::size_t size() const { return eigenvalues.size(); }
    /// Integer photocurrent difference of eigenvector k.
    int outcome(std::size_t k) const;
    /// <k | n>_1 |E>_2 including the phase e^{-i n theta}.
    std::complex<double> amplitude(int n, std::size_t k) const;
};

PhotocurrentDecomposition photocurrent_decomposition(int signal_cutoff, const LocalOscillator& lo,
                                                     double theta,
                                                     double leakage_tol = kDefaultLeakageTol);

/// R_mu(n, m) = sum over eigenvectors k with outcome mu of M(n, k) M(m, k).
/// Joint and binned statistics follow by contracting these with the state.
struct OutcomeKernels {
    int signal_cutoff = 0;
    std::vector<int> outcomes;                ///< ascending
    std::vector<Eigen::MatrixXd> per_outcome; ///< aligned with `outcomes`
    double leakage = 0.0;

    /// sum of R_mu over outcomes accepted by `keep`.
    Eigen::MatrixXd sum_where(const std::function<bool(int)>& keep) const;
    /// Kernel of the sign-binned result: outcomes >= 0 count as +1.
    Eigen::MatrixXd positive() const;
};

OutcomeKernels outcome_kernels(const PhotocurrentDecomposition& decomposition);

struct JointOutcomeTable {
    std::vector<int> mu;
    std::vector<int> nu;
    Eigen::MatrixXd probability;  ///< rows mu, columns nu
    double leakage = 0.0;         ///< total probability missing (both sites)

    double total() const { return probability.sum(); }
};

/// Joint photocurrent statistics at both sites; depends on theta + phi only.
JointOutcomeTable joint_photocurrent_dist(const CircleStateCoeffs& coeffs,
                                          const LocalOscillator& lo, double theta, double phi);
JointOutcomeTable joint_photocurrent_dist(const CircleStateCoeffs& coeffs,
                                          const OutcomeKernels& site_a,
                                          const OutcomeKernels& site_b, double chi);

/// Single-site distribution of the outcome mu (the reduced state is diagonal).
std::vector<double> site_outcome_distribution(const CircleStateCoeffs& coeffs,
                                              const OutcomeKernels& kernels);

/// CH score from sign-binned photocurrents (outcome 0 counts as +1).
BellResult finite_E_S(const CircleStateCoeffs& coeffs, const LocalOscillator& lo,
                      const BellAngles& angles);
BellResult finite_E_S(const CircleStateCoeffs& coeffs, const OutcomeKernels& kernels,
                      const BellAngles& angles);

/// Outcomes grouped into bins of width `bin_width` centred on multiples of
/// the width (bin index round(mu / w)) before sign classification.
BellResult coarse_grained_S(const CircleStateCoeffs& coeffs, const OutcomeKernels& kernels,
                            const BellAngles& angles, double bin_width);

/// Kolmogorov-Smirnov distance between the lattice distribution of mu / scale
/// and a continuous CDF. With `continuity_correction`, each lattice point is
/// spread over its cell [(mu - 1/2)/scale, (mu + 1/2)/scale) and the CDFs are
/// compared at cell edges; otherwise the raw step CDF is compared on both
/// sides of every jump.
double ks_distance(const std::vector<int>& outcomes, const std::vector<double>& probabilities,
                   double scale, const std::function<double(double)>& cdf,
                   bool continuity_correction = false);

}  // namespace cvbell
