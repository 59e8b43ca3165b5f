#include "cvbell/lhv.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cvbell/errors.hpp"
#include "cvbell/gauss_hermite.hpp"
#include "cvbell/parallel.hpp"
#include "cvbell/quadrature.hpp"

namespace cvbell {

namespace {

constexpr std::size_t kMaxChunks = 64;
constexpr std::uint64_t kMinChunkSamples = 4096;

}  // namespace

double husimi_density(const CircleStateCoeffs& coeffs, std::complex<double> alpha,
                      std::complex<double> beta) {
    const std::complex<double> z = std::conj(alpha) * std::conj(beta);
    std::complex<double> sum = 0.0;
    std::complex<double> power = 1.0;
    for (std::size_t n = 0; n < coeffs.size(); ++n) {
        if (n > 0) power *= z / static_cast<double>(n);
        sum += coeffs.c[n] * power;
    }
    const double envelope = std::exp(-std::norm(alpha) - std::norm(beta));
    return envelope * std::norm(sum) / (std::numbers::pi * std::numbers::pi);
}

HusimiSampler::HusimiSampler(const CircleStateCoeffs& coeffs)
    : c_(coeffs.c), component_(coeffs.c.begin(), coeffs.c.end()) {
    log_c_.resize(c_.size());
    coeff_sum_ = 0.0;
    for (std::size_t n = 0; n < c_.size(); ++n) {
        if (!(c_[n] > 0.0)) throw InputError("HusimiSampler: coefficients must be positive");
        log_c_[n] = std::log(c_[n]);
        coeff_sum_ += c_[n];
    }
    const double inverse_rate = coeff_sum_ * coeff_sum_;
    max_consecutive_rejections_ =
        static_cast<std::uint64_t>(std::max(1e6, 1000.0 * inverse_rate));
}

double HusimiSampler::acceptance_ratio(std::complex<double> alpha,
                                       std::complex<double> beta) const {
    const double rho = std::abs(alpha) * std::abs(beta);
    if (rho == 0.0) return c_[0] / coeff_sum_;
    const double angle = std::arg(std::conj(alpha) * std::conj(beta));
    const double log_rho = std::log(rho);

    // a_n = c_n rho^n / n!, scaled by its largest term.
    std::vector<double> log_a(c_.size());
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < c_.size(); ++n) {
        log_a[n] = log_c_[n] + n * log_rho - std::lgamma(n + 1.0);
        top = std::max(top, log_a[n]);
    }
    std::complex<double> numerator = 0.0;
    double denominator = 0.0;
    for (std::size_t n = 0; n < c_.size(); ++n) {
        const double a = std::exp(log_a[n] - top);
        numerator += a * std::polar(1.0, static_cast<double>(n) * angle);
        denominator += a * a / c_[n];
    }
    return std::min(1.0, std::norm(numerator) / (coeff_sum_ * denominator));
}

void throw_sampler_stall(std::uint64_t proposals, std::uint64_t accepted,
                         double expected_acceptance) {
    std::ostringstream msg;
    msg << "Husimi sampler stalled: " << accepted << " accepted of " << proposals
        << " proposals (expected acceptance " << expected_acceptance << ")";
    throw SamplerError(msg.str());
}

std::mt19937_64 chunk_engine(std::uint64_t seed, std::uint64_t chunk) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
    return std::mt19937_64(seq);
}

std::size_t chunk_count(std::uint64_t n_samples) {
    const std::uint64_t by_size = std::max<std::uint64_t>(1, n_samples / kMinChunkSamples);
    return static_cast<std::size_t>(std::min<std::uint64_t>(kMaxChunks, by_size));
}

std::uint64_t chunk_size(std::uint64_t n_samples, std::size_t chunk) {
    const std::uint64_t chunks = chunk_count(n_samples);
    return n_samples / chunks + (chunk < n_samples % chunks ? 1 : 0);
}

Eigen::MatrixXd noise_kernel(int cutoff, double t) {
    // psi_n psi_m(x) N(t - x) = exp(-(x - t/2)^2) * polynomial of degree n + m,
    // so cutoff + 1 Hermite nodes integrate it exactly.
    static thread_local int cached_points = -1;
    static thread_local GaussHermiteRule rule;
    const int points = cutoff + 2;
    if (points != cached_points) {
        rule = gauss_hermite(points);
        cached_points = points;
    }

    const auto size = static_cast<Eigen::Index>(cutoff + 1);
    Eigen::MatrixXd weighted(points, size);
    std::vector<double> psi(static_cast<std::size_t>(size));
    const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    for (int k = 0; k < points; ++k) {
        const double u = rule.nodes[k];
        const double x = 0.5 * t + u;
        eigenfunctions_at(x, psi);
        const double gap = t - x;
        const double w = rule.weights[k] * std::exp(u * u - 0.5 * gap * gap) * inv_sqrt_2pi;
        const double root = std::sqrt(w);
        for (Eigen::Index n = 0; n < size; ++n) weighted(k, n) = root * psi[n];
    }
    return weighted.transpose() * weighted;
}

Eigen::MatrixXd noisy_positive_kernel(int cutoff) {
    if (cutoff < 0 || cutoff > kCutoffCap) {
        throw InputError("noisy_positive_kernel: cutoff out of range");
    }
    const auto size = static_cast<Eigen::Index>(cutoff + 1);
    Eigen::MatrixXd l = 0.5 * Eigen::MatrixXd::Identity(size, size);

    // Phi - 1/2 is odd, so only n + m odd survives, and those are twice the
    // half-line integral. Integrate well past the classical turning point.
    using rule = boost::math::quadrature::gauss<double, 20>;
    const double upper = 2.0 * std::sqrt(cutoff + 1.0) + 14.0;
    const int panels = static_cast<int>(std::ceil(upper / 0.5));
    const double width = upper / panels;
    std::vector<double> psi(static_cast<std::size_t>(size));
    Eigen::MatrixXd odd = Eigen::MatrixXd::Zero(size, size);
    const auto& abscissa = rule::abscissa();
    const auto& weights = rule::weights();
    auto accumulate = [&](double x, double w) {
        eigenfunctions_at(x, psi);
        const double g = w * 0.5 * std::erf(x / std::numbers::sqrt2);
        for (Eigen::Index n = 0; n < size; ++n)
            for (Eigen::Index m = n + 1; m < size; m += 2) odd(n, m) += g * psi[n] * psi[m];
    };
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * width;
        const double half = 0.5 * width;
        for (std::size_t i = 0; i < abscissa.size(); ++i) {
            if (abscissa[i] == 0.0) {
                accumulate(mid, half * weights[i]);
            } else {
                accumulate(mid + half * abscissa[i], half * weights[i]);
                accumulate(mid - half * abscissa[i], half * weights[i]);
            }
        }
    }
    for (Eigen::Index n = 0; n < size; ++n)
        for (Eigen::Index m = n + 1; m < size; m += 2) {
            l(n, m) = 2.0 * odd(n, m);
            l(m, n) = l(n, m);
        }
    return l;
}

double noisy_joint_density(const CircleStateCoeffs& coeffs, double theta, double phi, double x,
                           double y) {
    if (!(std::isfinite(theta) && std::isfinite(phi) && std::isfinite(x) && std::isfinite(y))) {
        throw InputError("noisy_joint_density: non-finite input");
    }
    const Eigen::MatrixXd gx = noise_kernel(coeffs.cutoff, x);
    const Eigen::MatrixXd gy = noise_kernel(coeffs.cutoff, y);
    return binned_joint_prob(coeffs.values(), gx, gy, theta + phi);
}

JointDensityGrid noisy_density_grid(const CircleStateCoeffs& coeffs, double chi,
                                    const GridSpec& grid, int jobs) {
    grid.validate();
    if (!std::isfinite(chi)) throw InputError("noisy_density_grid: non-finite angle");
    JointDensityGrid out;
    out.chi = chi;
    out.r0 = coeffs.r0;
    out.noisy = true;
    out.grid = grid;
    out.x_grid.resize(grid.nx);
    out.y_grid.resize(grid.ny);
    for (int i = 0; i < grid.nx; ++i) out.x_grid[i] = grid.x(i);
    for (int j = 0; j < grid.ny; ++j) out.y_grid[j] = grid.y(j);

    std::vector<Eigen::MatrixXd> gx(grid.nx), gy(grid.ny);
    parallel_for(static_cast<std::size_t>(grid.nx), jobs,
                 [&](std::size_t i) { gx[i] = noise_kernel(coeffs.cutoff, out.x_grid[i]); });
    parallel_for(static_cast<std::size_t>(grid.ny), jobs,
                 [&](std::size_t j) { gy[j] = noise_kernel(coeffs.cutoff, out.y_grid[j]); });

    out.values.resize(grid.nx, grid.ny);
    parallel_for(static_cast<std::size_t>(grid.nx), jobs, [&](std::size_t i) {
        for (int j = 0; j < grid.ny; ++j) {
            out.values(static_cast<Eigen::Index>(i), j) =
                binned_joint_prob(coeffs.values(), gx[i], gy[j], chi);
        }
    });
    return out;
}

double noisy_marginal_density(const CircleStateCoeffs& coeffs, double x) {
    const Eigen::MatrixXd g = noise_kernel(coeffs.cutoff, x);
    double total = 0.0;
    for (std::size_t n = 0; n < coeffs.size(); ++n) {
        total += coeffs.c[n] * coeffs.c[n] * g(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    }
    return total;
}

BellResult lhv_exact_S(const CircleStateCoeffs& coeffs, const BellAngles& angles) {
    const Eigen::MatrixXd l = noisy_positive_kernel(coeffs.cutoff);
    double marginal = 0.0;
    for (std::size_t n = 0; n < coeffs.size(); ++n) {
        marginal += coeffs.c[n] * coeffs.c[n] * l(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    }
    auto p = [&](double chi) { return binned_joint_prob(coeffs.values(), l, l, chi); };
    BellResult out = ch_score(p, marginal, marginal, angles);
    out.r0 = coeffs.r0;
    return out;
}

LhvEstimate lhv_noisy_S(const CircleStateCoeffs& coeffs, const BellAngles& angles,
                        std::uint64_t n_samples, std::uint64_t seed, int jobs) {
    if (n_samples < 10000) throw InputError("lhv_noisy_S: need at least 1e4 samples");
    if (!(std::isfinite(angles.theta) && std::isfinite(angles.theta_p) &&
          std::isfinite(angles.phi) && std::isfinite(angles.phi_p))) {
        throw InputError("lhv_noisy_S: angles must be finite");
    }

    // Per-chunk sums: the four joint indicators, both marginals, and the
    // moments needed for the ratio's delta-method error.
    struct Sums {
        std::array<double, 4> joint{};
        double a_plus = 0.0;
        double b_plus = 0.0;
        double num = 0.0, num2 = 0.0, den = 0.0, den2 = 0.0, cross = 0.0;
        std::uint64_t proposals = 0;
    };
    const std::size_t chunks = chunk_count(n_samples);
    std::vector<Sums> sums(chunks);
    parallel_for(chunks, jobs, [&](std::size_t chunk) {
        HusimiSampler sampler(coeffs);
        auto engine = chunk_engine(seed, chunk);
        Sums& s = sums[chunk];
        const std::uint64_t count = chunk_size(n_samples, chunk);
        for (std::uint64_t i = 0; i < count; ++i) {
            const HiddenVariableSample lambda = sampler(engine);
            // Site A decides from alpha alone, before any B setting is read.
            const bool a = local_response(lambda.alpha, angles.theta) > 0;
            const bool a_p = local_response(lambda.alpha, angles.theta_p) > 0;
            const bool b = local_response(lambda.beta, angles.phi) > 0;
            const bool b_p = local_response(lambda.beta, angles.phi_p) > 0;
            const std::array<double, 4> j{double(a && b), double(a && b_p), double(a_p && b),
                                          double(a_p && b_p)};
            for (int k = 0; k < 4; ++k) s.joint[k] += j[k];
            s.a_plus += a_p;
            s.b_plus += b;
            const double u = j[0] - j[1] + j[2] + j[3];
            const double v = double(a_p) + double(b);
            s.num += u;
            s.num2 += u * u;
            s.den += v;
            s.den2 += v * v;
            s.cross += u * v;
        }
        s.proposals = sampler.proposals();
    });

    Sums total;
    for (const Sums& s : sums) {
        for (int k = 0; k < 4; ++k) total.joint[k] += s.joint[k];
        total.a_plus += s.a_plus;
        total.b_plus += s.b_plus;
        total.num += s.num;
        total.num2 += s.num2;
        total.den += s.den;
        total.den2 += s.den2;
        total.cross += s.cross;
        total.proposals += s.proposals;
    }

    const double n = static_cast<double>(n_samples);
    LhvEstimate out;
    out.n_samples = n_samples;
    out.seed = seed;
    out.proposals = total.proposals;
    out.acceptance = n / static_cast<double>(total.proposals);
    out.expected_acceptance = HusimiSampler(coeffs).expected_acceptance();
    for (int k = 0; k < 4; ++k) {
        const double p = total.joint[k] / n;
        out.p_pp[k] = p;
        out.p_pp_se[k] = std::sqrt(p * (1.0 - p) / n);
    }
    out.p_plus_a = total.a_plus / n;
    out.p_plus_b = total.b_plus / n;

    const double mu = total.num / n;
    const double mv = total.den / n;
    out.S = mu / mv;
    // Var(u - S v) / (n mean(v)^2)
    const double var_u = total.num2 / n - mu * mu;
    const double var_v = total.den2 / n - mv * mv;
    const double cov = total.cross / n - mu * mv;
    const double var_ratio = (var_u - 2.0 * out.S * cov + out.S * out.S * var_v) / (mv * mv);
    out.standard_error = std::sqrt(std::max(var_ratio, 0.0) / n);
    return out;
}

BellResult dense_angle_search(const CircleStateCoeffs& coeffs, int grid_points) {
    OptimizerSettings opts;
    opts.grid_points = grid_points;
    opts.refine_starts = 12;
    return optimize_angles(coeffs, opts);
}

MacroscopicCheck macroscopic_limit_check(double r0, int grid_points, double tail_tol) {
    if (!std::isfinite(r0) || r0 < 2.5) {
        throw InputError("macroscopic_limit_check: intended for r0 >= 2.5");
    }
    MacroscopicCheck out;
    out.r0 = r0;
    out.best = dense_angle_search(circle_state_coeffs(r0, tail_tol), grid_points);
    out.max_S = out.best.S;
    return out;
}

}  // namespace cvbell
