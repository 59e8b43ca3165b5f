#include "oracles.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "cvbell/lhv.hpp"
#include "cvbell/quadrature.hpp"

namespace cvbell::oracle {

double bessel_i0(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 10000; ++k) {
        term *= q / (double(k) * k);
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return sum;
}

double psi_closed_form(int n, double x) {
    const double norm = std::pow(2.0 * std::numbers::pi, -0.25) /
                        std::sqrt(std::pow(2.0, n) * std::tgamma(n + 1.0));
    return norm * std::hermite(static_cast<unsigned>(n), x / std::numbers::sqrt2) *
           std::exp(-0.25 * x * x);
}

std::vector<std::vector<double>> phase_integrated_projection(double r0, int n_max, int points) {
    // <n|alpha> = e^{-|alpha|^2/2} alpha^n / sqrt(n!)
    auto fock_overlap = [](std::complex<double> alpha, int n) {
        return std::exp(-0.5 * std::norm(alpha)) * std::pow(alpha, n) /
               std::sqrt(std::tgamma(n + 1.0));
    };
    std::vector<std::vector<std::complex<double>>> acc(
        n_max + 1, std::vector<std::complex<double>>(n_max + 1, 0.0));
    for (int j = 0; j < points; ++j) {
        const double phase = 2.0 * std::numbers::pi * j / points;
        const auto a = std::polar(r0, phase);
        const auto b = std::polar(r0, -phase);
        for (int n = 0; n <= n_max; ++n)
            for (int m = 0; m <= n_max; ++m) acc[n][m] += fock_overlap(a, n) * fock_overlap(b, m);
    }
    double norm = 0.0;
    for (const auto& row : acc)
        for (const auto& v : row) norm += std::norm(v);
    norm = std::sqrt(norm);
    std::vector<std::vector<double>> out(n_max + 1, std::vector<double>(n_max + 1));
    for (int n = 0; n <= n_max; ++n)
        for (int m = 0; m <= n_max; ++m) out[n][m] = std::abs(acc[n][m]) / norm;
    return out;
}

double half_range_overlap_quadrature(int n, int m) {
    auto f = [&](double x) { return psi_closed_form(n, x) * psi_closed_form(m, x); };
    const double upper = 2.0 * std::sqrt(std::max(n, m) + 1.0) + 16.0;
    double total = 0.0;
    for (double a = 0.0; a < upper; a += 1.0) {
        total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, a + 1.0, 3,
                                                                               1e-12);
    }
    return total;
}

CircleStateCoeffs coeffs_with_cutoff(double r0, int cutoff) {
    CircleStateCoeffs out;
    out.r0 = r0;
    out.cutoff = cutoff;
    out.c.assign(static_cast<std::size_t>(cutoff) + 1, 0.0);
    double norm = 0.0;
    for (int n = 0; n <= cutoff; ++n) {
        const double v =
            r0 == 0.0 ? (n == 0 ? 1.0 : 0.0)
                      : std::exp(2.0 * n * std::log(r0) - std::lgamma(n + 1.0));
        out.c[n] = v;
        norm += v * v;
    }
    for (double& v : out.c) v /= std::sqrt(norm);
    out.tail_bound = 0.0;
    return out;
}

double quadrant_integral(const CircleStateCoeffs& coeffs, double chi, double upper) {
    using rule = boost::math::quadrature::gauss<double, 30>;
    const int panels = static_cast<int>(std::ceil(upper / 1.0));
    const double width = upper / panels;
    std::vector<double> nodes;
    std::vector<double> weights;
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * width;
        const double half = 0.5 * width;
        for (std::size_t i = 0; i < rule::abscissa().size(); ++i) {
            const double a = rule::abscissa()[i];
            const double w = rule::weights()[i] * half;
            nodes.push_back(mid + half * a);
            weights.push_back(w);
            if (a != 0.0) {
                nodes.push_back(mid - half * a);
                weights.push_back(w);
            }
        }
    }
    double total = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = 0; j < nodes.size(); ++j)
            total += weights[i] * weights[j] * joint_density(coeffs, chi, nodes[i], nodes[j]);
    return total;
}

namespace {

// Allocation-free density for the sampling loop; plain recurrence is fine
// for |x| < 30 and the cutoffs used in tests.
struct FastDensity {
    const CircleStateCoeffs& coeffs;
    std::vector<double> re, im;
    mutable std::vector<double> px, py;

    FastDensity(const CircleStateCoeffs& c, double chi)
        : coeffs(c), re(c.size()), im(c.size()), px(c.size()), py(c.size()) {
        for (std::size_t n = 0; n < c.size(); ++n) {
            re[n] = c.c[n] * std::cos(-double(n) * chi);
            im[n] = c.c[n] * std::sin(-double(n) * chi);
        }
    }
    static void fill(double x, std::vector<double>& p) {
        p[0] = std::pow(2.0 * std::numbers::pi, -0.25) * std::exp(-0.25 * x * x);
        if (p.size() > 1) p[1] = x * p[0];
        for (std::size_t n = 1; n + 1 < p.size(); ++n)
            p[n + 1] = (x * p[n] - std::sqrt(double(n)) * p[n - 1]) / std::sqrt(n + 1.0);
    }
    double operator()(double x, double y) const {
        fill(x, px);
        fill(y, py);
        double ar = 0.0, ai = 0.0;
        for (std::size_t n = 0; n < px.size(); ++n) {
            const double q = px[n] * py[n];
            ar += re[n] * q;
            ai += im[n] * q;
        }
        return ar * ar + ai * ai;
    }
};

}  // namespace

McEstimate mc_positive_quadrant(const CircleStateCoeffs& coeffs, double chi,
                                std::uint64_t samples, std::uint64_t seed) {
    const FastDensity density(coeffs, chi);
    const double half_width = 2.0 * coeffs.r0 + 7.5;
    // Envelope from a fine scan, padded; the density is smooth on this scale.
    double peak = 0.0;
    const int scan = 400;
    for (int i = 0; i <= scan; ++i)
        for (int j = 0; j <= scan; ++j) {
            const double x = -half_width + 2.0 * half_width * i / scan;
            const double y = -half_width + 2.0 * half_width * j / scan;
            peak = std::max(peak, density(x, y));
        }
    const double bound = 1.25 * peak;

    std::mt19937_64 engine(seed);
    std::uniform_real_distribution<double> coord(-half_width, half_width);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uint64_t accepted = 0;
    std::uint64_t hits = 0;
    while (accepted < samples) {
        const double x = coord(engine);
        const double y = coord(engine);
        const double p = density(x, y);
        if (p > bound) throw std::runtime_error("mc_positive_quadrant: envelope violated");
        if (unit(engine) * bound < p) {
            ++accepted;
            if (x >= 0.0 && y >= 0.0) ++hits;
        }
    }
    McEstimate out;
    out.mean = double(hits) / double(samples);
    out.standard_error = std::sqrt(out.mean * (1.0 - out.mean) / double(samples));
    return out;
}

double noisy_box_integral(const CircleStateCoeffs& coeffs, double chi, double x0, double x1,
                          double y0, double y1) {
    using rule = boost::math::quadrature::gauss<double, 7>;
    auto inner = [&](double x) {
        return rule::integrate([&](double y) { return noisy_joint_density(coeffs, chi, 0.0, x, y); },
                               y0, y1);
    };
    return rule::integrate(inner, x0, x1);
}

double density_from_phase_integral(double r0, double theta, double phi, double x, double y,
                                   int points) {
    using cd = std::complex<double>;
    auto wavefunction = [](cd alpha, double q) {
        return std::pow(2.0 * std::numbers::pi, -0.25) *
               std::exp(-0.25 * q * q + alpha * q - 0.5 * alpha * alpha - 0.5 * std::norm(alpha));
    };
    cd sum = 0.0;
    for (int j = 0; j < points; ++j) {
        const double s = 2.0 * std::numbers::pi * j / points;
        // Rotating the measured quadrature by theta is alpha -> alpha e^{-i theta}.
        sum += wavefunction(std::polar(r0, s - theta), x) * wavefunction(std::polar(r0, -s - phi), y);
    }
    sum *= 2.0 * std::numbers::pi / points;
    // N^2 (2 pi)^2 e^{-2 r0^2} I_0(2 r0^2) = 1
    const double norm2 =
        1.0 / (4.0 * std::numbers::pi * std::numbers::pi * std::exp(-2.0 * r0 * r0) *
               bessel_i0(2.0 * r0 * r0));
    return norm2 * std::norm(sum);
}

double phase_integral_quadrant(double r0, double theta, double phi) {
    using rule = boost::math::quadrature::gauss<double, 10>;
    const double upper = 2.0 * r0 + 8.0;
    const int panels = 8;
    const double width = upper / panels;
    std::vector<double> nodes, weights;
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * width;
        for (std::size_t i = 0; i < rule::abscissa().size(); ++i) {
            const double a = rule::abscissa()[i] * 0.5 * width;
            const double w = rule::weights()[i] * 0.5 * width;
            nodes.push_back(mid + a);
            weights.push_back(w);
            if (a != 0.0) {
                nodes.push_back(mid - a);
                weights.push_back(w);
            }
        }
    }
    double total = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = 0; j < nodes.size(); ++j)
            total += weights[i] * weights[j] *
                     density_from_phase_integral(r0, theta, phi, nodes[i], nodes[j], 48);
    return total;
}

double noisy_density_by_convolution(double r0, double theta, double phi, double x, double y) {
    using rule = boost::math::quadrature::gauss<double, 10>;
    const double half_width = 2.0 * r0 + 9.0;
    const int panels = 24;
    const double width = 2.0 * half_width / panels;
    std::vector<double> nodes, weights;
    for (int p = 0; p < panels; ++p) {
        const double mid = -half_width + (p + 0.5) * width;
        for (std::size_t i = 0; i < rule::abscissa().size(); ++i) {
            const double a = rule::abscissa()[i] * 0.5 * width;
            const double w = rule::weights()[i] * 0.5 * width;
            nodes.push_back(mid + a);
            weights.push_back(w);
            nodes.push_back(mid - a);
            weights.push_back(w);
        }
    }
    auto gauss = [](double d) { return std::exp(-0.5 * d * d) / std::sqrt(2.0 * std::numbers::pi); };
    double total = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double gx = weights[i] * gauss(x - nodes[i]);
        if (gx < 1e-30) continue;
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            const double gy = weights[j] * gauss(y - nodes[j]);
            if (gy < 1e-30) continue;
            total += gx * gy * density_from_phase_integral(r0, theta, phi, nodes[i], nodes[j], 48);
        }
    }
    return total;
}

}  // namespace cvbell::oracle
