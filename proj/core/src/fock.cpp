#include "cvbell/fock.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "cvbell/errors.hpp"

namespace cvbell {

namespace {

// log of r0^(4n) / (n!)^2
double log_weight(double r0, int n) {
    return 4.0 * n * std::log(r0) - 2.0 * std::lgamma(n + 1.0);
}

}  // namespace

CircleStateCoeffs circle_state_coeffs(double r0, double tail_tol, int hard_cap) {
    if (!std::isfinite(r0) || r0 < 0.0) {
        throw InputError("circle_state_coeffs: r0 must be finite and non-negative");
    }
    if (!(tail_tol > 0.0 && tail_tol < 1.0)) {
        throw InputError("circle_state_coeffs: tail_tol must lie in (0, 1)");
    }
    if (hard_cap < 0 || hard_cap > kCutoffCap) {
        throw InputError("circle_state_coeffs: hard_cap out of range");
    }

    CircleStateCoeffs out;
    out.r0 = r0;
    if (r0 == 0.0) {
        return out;
    }

    // Terms are scaled by the largest one; the peak sits near n = r0^2.
    const int peak = std::min(hard_cap + 1, static_cast<int>(std::floor(r0 * r0)));
    const double log_scale = log_weight(r0, peak);
    const double r4 = std::pow(r0, 4);

    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(hard_cap) + 2);
    double partial = 0.0;
    for (int n = 0; n <= hard_cap; ++n) {
        const double t = std::exp(log_weight(r0, n) - log_scale);
        terms.push_back(t);
        partial += t;

        // For k > n+1 the ratio t_{k}/t_{k-1} = r0^4/k^2 is at most q, so the
        // discarded tail is dominated by a geometric series.
        const double q = r4 / ((n + 2.0) * (n + 2.0));
        if (q >= 1.0) {
            continue;
        }
        const double next = std::exp(log_weight(r0, n + 1) - log_scale);
        const double tail_upper = next / (1.0 - q);
        const double dropped = tail_upper / partial;
        if (dropped < tail_tol) {
            out.cutoff = n;
            out.tail_bound = dropped;
            out.c.resize(terms.size());
            for (std::size_t k = 0; k < terms.size(); ++k) {
                out.c[k] = std::sqrt(terms[k] / partial);
            }
            // Final renormalization against rounding in the accumulation.
            double norm = 0.0;
            for (double v : out.c) norm += v * v;
            norm = std::sqrt(norm);
            for (double& v : out.c) v /= norm;
            return out;
        }
    }

    std::ostringstream msg;
    msg << "circle_state_coeffs: r0 = " << r0 << " needs a number-basis cutoff above the hard cap "
        << hard_cap << " for tail tolerance " << tail_tol;
    throw TruncationError(msg.str(), r0);
}

double circle_normalizer_series(double r0) {
    if (!std::isfinite(r0) || r0 < 0.0) {
        throw InputError("circle_normalizer_series: r0 must be finite and non-negative");
    }
    const double r4 = std::pow(r0, 4);
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 100000; ++k) {
        term *= r4 / (static_cast<double>(k) * k);
        sum += term;
        if (term < 1e-17 * sum && k > r0 * r0) break;
    }
    return sum;
}

OscillatorBasis::OscillatorBasis(int cutoff) : cutoff_(cutoff) {
    if (cutoff < 0 || cutoff > kCutoffCap) {
        throw InputError("OscillatorBasis: cutoff out of range");
    }
}

double OscillatorBasis::operator()(int n, double x) const {
    if (n < 0 || n > cutoff_) {
        throw InputError("oscillator eigenfunction index " + std::to_string(n) +
                         " outside [0, " + std::to_string(cutoff_) + "]");
    }
    if (!std::isfinite(x)) {
        throw InputError("oscillator eigenfunction: non-finite argument");
    }
    std::vector<double> values(static_cast<std::size_t>(n) + 1);
    eigenfunctions_at(x, values);
    return values.back();
}

void OscillatorBasis::evaluate(double x, std::span<double> out) const {
    if (out.size() > static_cast<std::size_t>(cutoff_) + 1) {
        throw InputError("OscillatorBasis::evaluate: request exceeds cutoff");
    }
    if (!std::isfinite(x)) {
        throw InputError("oscillator eigenfunction: non-finite argument");
    }
    eigenfunctions_at(x, out);
}

double oscillator_eigenfunction(int n, double x) {
    return OscillatorBasis(kCutoffCap)(n, x);
}

void eigenfunctions_at(double x, std::span<double> out) {
    if (out.empty()) return;

    constexpr double kRescale = 1e150;
    const double log_rescale = std::log(kRescale);
    // log of (2 pi)^(-1/4) exp(-x^2/4); the recurrence runs on the polynomial part.
    double log_scale = -0.25 * std::log(2.0 * std::numbers::pi) - 0.25 * x * x;

    auto emit = [&](std::size_t n, double mantissa) {
        if (mantissa == 0.0) {
            out[n] = 0.0;
        } else if (log_scale > -700.0) {
            out[n] = mantissa * std::exp(log_scale);
        } else {
            out[n] = std::copysign(std::exp(log_scale + std::log(std::abs(mantissa))), mantissa);
        }
    };

    double prev = 0.0;
    double cur = 1.0;
    emit(0, cur);
    for (std::size_t n = 0; n + 1 < out.size(); ++n) {
        const double dn = static_cast<double>(n);
        const double next = (x * cur - std::sqrt(dn) * prev) / std::sqrt(dn + 1.0);
        prev = cur;
        cur = next;
        if (std::abs(cur) > kRescale) {
            cur /= kRescale;
            prev /= kRescale;
            log_scale += log_rescale;
        }
        emit(n + 1, cur);
    }
}

}  // namespace cvbell
