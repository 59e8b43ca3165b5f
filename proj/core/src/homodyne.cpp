#include "cvbell/homodyne.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "cvbell/errors.hpp"
#include "cvbell/quadrature.hpp"
#include "cvbell/tridiagonal.hpp"

namespace cvbell {

namespace {

// <m|E> for a real coherent amplitude.
double coherent_amplitude(double E, int m) {
    if (E == 0.0) return m == 0 ? 1.0 : 0.0;
    return std::exp(-0.5 * E * E + m * std::log(E) - 0.5 * std::lgamma(m + 1.0));
}

void check_lo(const LocalOscillator& lo) {
    if (!std::isfinite(lo.E) || lo.E < 0.0) {
        throw InputError("local oscillator amplitude must be finite and non-negative");
    }
    if (lo.lo_cutoff < 0 || lo.lo_cutoff > 4096) {
        throw InputError("local oscillator cutoff out of range [0, 4096]");
    }
}

}  // namespace

LocalOscillator LocalOscillator::with_default_cutoff(double E) {
    if (!std::isfinite(E) || E < 0.0) {
        throw InputError("local oscillator amplitude must be finite and non-negative");
    }
    return LocalOscillator{E, static_cast<int>(std::ceil(E * E + 8.0 * E + 20.0))};
}

double LocalOscillator::tail() const {
    if (E == 0.0) return 0.0;
    const double mean = E * E;
    double total = 0.0;
    for (int m = lo_cutoff + 1;; ++m) {
        const double log_p = -mean + m * std::log(mean) - std::lgamma(m + 1.0);
        const double p = std::exp(log_p);
        total += p;
        if (m > mean && p < 1e-18 * std::max(total, 1e-300)) break;
        if (m > lo_cutoff + 100000) break;
    }
    return total;
}

int PhotocurrentDecomposition::outcome(std::size_t k) const {
    return static_cast<int>(std::lround(eigenvalues[k]));
}

std::complex<double> PhotocurrentDecomposition::amplitude(int n, std::size_t k) const {
    return amplitudes(n, static_cast<Eigen::Index>(k)) * std::polar(1.0, -n * theta);
}

PhotocurrentDecomposition photocurrent_decomposition(int signal_cutoff, const LocalOscillator& lo,
                                                     double theta, double leakage_tol) {
    check_lo(lo);
    if (signal_cutoff < 0 || signal_cutoff > kCutoffCap) {
        throw InputError("photocurrent_decomposition: signal cutoff out of range");
    }
    if (!std::isfinite(theta)) throw InputError("photocurrent_decomposition: non-finite theta");

    PhotocurrentDecomposition out;
    out.signal_cutoff = signal_cutoff;
    out.lo = lo;
    out.theta = theta;
    out.leakage = lo.tail();
    if (out.leakage > leakage_tol) {
        std::ostringstream msg;
        msg << "local-oscillator truncation leaks " << out.leakage << " > " << leakage_tol
            << " at E = " << lo.E << "; raise lo_cutoff above " << lo.lo_cutoff;
        throw LeakageError(msg.str(), lo.lo_cutoff);
    }

    const int max_total = signal_cutoff + lo.lo_cutoff;
    const auto total_vectors =
        static_cast<Eigen::Index>((max_total + 1)) * (max_total + 2) / 2;
    out.eigenvalues.reserve(static_cast<std::size_t>(total_vectors));
    out.block.reserve(static_cast<std::size_t>(total_vectors));
    out.amplitudes = Eigen::MatrixXd::Zero(signal_cutoff + 1, total_vectors);

    std::vector<double> coherent(static_cast<std::size_t>(lo.lo_cutoff) + 1);
    for (int m = 0; m <= lo.lo_cutoff; ++m) coherent[m] = coherent_amplitude(lo.E, m);

    Eigen::Index column = 0;
    for (int total = 0; total <= max_total; ++total) {
        // <n1 - 1, N - n1 + 1| a2^dag a1 |n1, N - n1> = sqrt(n1 (N - n1 + 1))
        std::vector<double> diag(static_cast<std::size_t>(total) + 1, 0.0);
        std::vector<double> off(static_cast<std::size_t>(total));
        for (int n1 = 1; n1 <= total; ++n1) {
            off[n1 - 1] = std::sqrt(static_cast<double>(n1) * (total - n1 + 1));
        }
        const TridiagonalEigen eig = tridiagonal_eigen(diag, off);

        const int n_lo = std::max(0, total - lo.lo_cutoff);
        const int n_hi = std::min(signal_cutoff, total);
        for (int k = 0; k <= total; ++k, ++column) {
            const double value = eig.values(k);
            if (std::abs(value - std::round(value)) > 1e-6) {
                throw NumericalError("photocurrent eigenvalue is not an integer");
            }
            out.eigenvalues.push_back(value);
            out.block.push_back(total);
            for (int n = n_lo; n <= n_hi; ++n) {
                out.amplitudes(n, column) = eig.vectors(n, k) * coherent[total - n];
            }
        }
    }
    return out;
}

Eigen::MatrixXd OutcomeKernels::sum_where(const std::function<bool(int)>& keep) const {
    Eigen::MatrixXd total = Eigen::MatrixXd::Zero(signal_cutoff + 1, signal_cutoff + 1);
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (keep(outcomes[i])) total += per_outcome[i];
    }
    return total;
}

Eigen::MatrixXd OutcomeKernels::positive() const {
    return sum_where([](int mu) { return mu >= 0; });
}

OutcomeKernels outcome_kernels(const PhotocurrentDecomposition& d) {
    const Eigen::Index size = d.signal_cutoff + 1;
    std::map<int, Eigen::MatrixXd> grouped;
    for (std::size_t k = 0; k < d.size(); ++k) {
        const Eigen::VectorXd col = d.amplitudes.col(static_cast<Eigen::Index>(k));
        if (col.squaredNorm() == 0.0) continue;
        auto [it, inserted] = grouped.try_emplace(d.outcome(k));
        if (inserted) it->second = Eigen::MatrixXd::Zero(size, size);
        it->second.selfadjointView<Eigen::Lower>().rankUpdate(col);
    }
    OutcomeKernels out;
    out.signal_cutoff = d.signal_cutoff;
    out.leakage = d.leakage;
    out.outcomes.reserve(grouped.size());
    out.per_outcome.reserve(grouped.size());
    for (auto& [mu, r] : grouped) {
        out.outcomes.push_back(mu);
        r.triangularView<Eigen::StrictlyUpper>() = r.transpose();
        out.per_outcome.push_back(std::move(r));
    }
    return out;
}

JointOutcomeTable joint_photocurrent_dist(const CircleStateCoeffs& coeffs,
                                          const OutcomeKernels& site_a,
                                          const OutcomeKernels& site_b, double chi) {
    if (site_a.signal_cutoff != coeffs.cutoff || site_b.signal_cutoff != coeffs.cutoff) {
        throw InputError("joint_photocurrent_dist: kernels built for a different signal cutoff");
    }
    if (!std::isfinite(chi)) throw InputError("joint_photocurrent_dist: non-finite angle");
    const Eigen::Index size = coeffs.cutoff + 1;
    const Eigen::Index cells = size * size;

    // P(mu, nu) = sum_{n,m} c_n c_m cos((n-m) chi) R_mu(n,m) R_nu(n,m)
    Eigen::VectorXd weight(cells);
    for (Eigen::Index n = 0; n < size; ++n)
        for (Eigen::Index m = 0; m < size; ++m)
            weight(n * size + m) = coeffs.c[n] * coeffs.c[m] * std::cos(double(n - m) * chi);

    auto flatten = [&](const OutcomeKernels& k, bool weighted) {
        Eigen::MatrixXd rows(static_cast<Eigen::Index>(k.outcomes.size()), cells);
        for (std::size_t i = 0; i < k.outcomes.size(); ++i) {
            for (Eigen::Index n = 0; n < size; ++n)
                for (Eigen::Index m = 0; m < size; ++m) {
                    const double v = k.per_outcome[i](n, m);
                    rows(static_cast<Eigen::Index>(i), n * size + m) =
                        weighted ? v * weight(n * size + m) : v;
                }
        }
        return rows;
    };

    JointOutcomeTable out;
    out.mu = site_a.outcomes;
    out.nu = site_b.outcomes;
    out.probability = flatten(site_a, true) * flatten(site_b, false).transpose();
    out.leakage = 1.0 - (1.0 - site_a.leakage) * (1.0 - site_b.leakage);
    return out;
}

JointOutcomeTable joint_photocurrent_dist(const CircleStateCoeffs& coeffs,
                                          const LocalOscillator& lo, double theta, double phi) {
    const OutcomeKernels a = outcome_kernels(photocurrent_decomposition(coeffs.cutoff, lo, theta));
    const OutcomeKernels b = outcome_kernels(photocurrent_decomposition(coeffs.cutoff, lo, phi));
    return joint_photocurrent_dist(coeffs, a, b, theta + phi);
}

std::vector<double> site_outcome_distribution(const CircleStateCoeffs& coeffs,
                                              const OutcomeKernels& kernels) {
    std::vector<double> p(kernels.outcomes.size(), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t n = 0; n < coeffs.size(); ++n) {
            const auto idx = static_cast<Eigen::Index>(n);
            p[i] += coeffs.c[n] * coeffs.c[n] * kernels.per_outcome[i](idx, idx);
        }
    }
    return p;
}

namespace {

BellResult score_with_kernel(const CircleStateCoeffs& coeffs, const Eigen::MatrixXd& plus,
                             const BellAngles& angles) {
    double marginal = 0.0;
    for (std::size_t n = 0; n < coeffs.size(); ++n) {
        const auto idx = static_cast<Eigen::Index>(n);
        marginal += coeffs.c[n] * coeffs.c[n] * plus(idx, idx);
    }
    auto p = [&](double chi) { return binned_joint_prob(coeffs.values(), plus, plus, chi); };
    BellResult out = ch_score(p, marginal, marginal, angles);
    out.r0 = coeffs.r0;
    return out;
}

}  // namespace

BellResult finite_E_S(const CircleStateCoeffs& coeffs, const OutcomeKernels& kernels,
                      const BellAngles& angles) {
    if (kernels.signal_cutoff != coeffs.cutoff) {
        throw InputError("finite_E_S: kernels built for a different signal cutoff");
    }
    return score_with_kernel(coeffs, kernels.positive(), angles);
}

BellResult finite_E_S(const CircleStateCoeffs& coeffs, const LocalOscillator& lo,
                      const BellAngles& angles) {
    const OutcomeKernels k = outcome_kernels(photocurrent_decomposition(coeffs.cutoff, lo, 0.0));
    return finite_E_S(coeffs, k, angles);
}

BellResult coarse_grained_S(const CircleStateCoeffs& coeffs, const OutcomeKernels& kernels,
                            const BellAngles& angles, double bin_width) {
    if (!(bin_width >= 1.0) || !std::isfinite(bin_width)) {
        throw InputError("coarse_grained_S: bin width must be >= 1 photon");
    }
    const Eigen::MatrixXd plus =
        kernels.sum_where([&](int mu) { return std::round(mu / bin_width) >= 0.0; });
    return score_with_kernel(coeffs, plus, angles);
}

double ks_distance(const std::vector<int>& outcomes, const std::vector<double>& probabilities,
                   double scale, const std::function<double(double)>& cdf,
                   bool continuity_correction) {
    if (outcomes.size() != probabilities.size() || !(scale > 0.0)) {
        throw InputError("ks_distance: mismatched inputs");
    }
    if (!std::is_sorted(outcomes.begin(), outcomes.end())) {
        throw InputError("ks_distance: outcomes must be ascending");
    }
    double before = 0.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const double after = before + probabilities[i];
        if (continuity_correction) {
            worst = std::max(worst, std::abs(before - cdf((outcomes[i] - 0.5) / scale)));
            worst = std::max(worst, std::abs(after - cdf((outcomes[i] + 0.5) / scale)));
        } else {
            const double f = cdf(outcomes[i] / scale);
            worst = std::max({worst, std::abs(before - f), std::abs(after - f)});
        }
        before = after;
    }
    return worst;
}

}  // namespace cvbell
