#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "cvbell/fock.hpp"

namespace cvbell {

/// K(n, m) = integral over [0, inf) of psi_n(x) psi_m(x) dx.
///
/// Diagonal entries are exactly 1/2 and entries with n - m even (off the
/// diagonal) are exactly zero. The remaining entries follow from the
/// Wronskian of the two eigenfunctions at the origin.
struct OverlapMatrix {
    int cutoff = 0;
    Eigen::MatrixXd k;

    double operator()(int n, int m) const { return k(n, m); }
};

OverlapMatrix half_range_overlaps(int cutoff);

/// Process-wide overlap matrix at the hard cap; initialized once, read-only after.
const OverlapMatrix& shared_overlaps();

/// Leading (cutoff+1)^2 block of the shared overlap matrix.
Eigen::MatrixXd overlap_block(int cutoff);

/// sum_{n,m} c_n c_m cos((n-m) chi) A(n,m) B(n,m)
///
/// Sign-binned joint probability for any pair of single-site kernels that
/// are diagonal in the number basis up to a phase e^{-i n angle}.
double binned_joint_prob(std::span<const double> c, const Eigen::MatrixXd& kernel_a,
                         const Eigen::MatrixXd& kernel_b, double chi);

/// |sum_n c_n e^{-i n chi} psi_n(x) psi_n(y)|^2
double joint_density(const CircleStateCoeffs& coeffs, double chi, double x, double y);

/// Probability that both quadrature results are >= 0; depends on chi = theta + phi only.
double joint_positive_prob(const CircleStateCoeffs& coeffs, double chi);

/// Probability of x >= 0 and y < 0, from the complementary kernel 1 - K.
double joint_positive_negative_prob(const CircleStateCoeffs& coeffs, double chi);

/// Probability of x >= 0 at one site, via sum_n c_n^2 K(n, n).
double marginal_positive_prob(const CircleStateCoeffs& coeffs);

/// Single-site quadrature density sum_n c_n^2 psi_n(x)^2.
double marginal_density(const CircleStateCoeffs& coeffs, double x);

/// Cumulative distribution of the single-site quadrature result.
double marginal_cdf(const CircleStateCoeffs& coeffs, double x);

struct GridSpec {
    double x_min = -12.0;
    double x_max = 12.0;
    int nx = 241;
    double y_min = -12.0;
    double y_max = 12.0;
    int ny = 241;

    double dx() const { return (x_max - x_min) / (nx - 1); }
    double dy() const { return (y_max - y_min) / (ny - 1); }
    double x(int i) const { return x_min + i * dx(); }
    double y(int j) const { return y_min + j * dy(); }
    void validate() const;
};

/// Sampled joint density; values(i, j) is the density at (x_i, y_j).
struct JointDensityGrid {
    double chi = 0.0;
    double r0 = 0.0;
    bool noisy = false;
    GridSpec grid;
    std::vector<double> x_grid;
    std::vector<double> y_grid;
    Eigen::MatrixXd values;

    /// Trapezoid-rule integral of the sampled values.
    double mass() const;
};

JointDensityGrid joint_density_grid(const CircleStateCoeffs& coeffs, double chi,
                                    const GridSpec& grid = {}, int jobs = 1);

}  // namespace cvbell
