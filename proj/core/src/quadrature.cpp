#include "cvbell/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <complex>
#include <numbers>

#include "cvbell/errors.hpp"
#include "cvbell/parallel.hpp"

namespace cvbell {

OverlapMatrix half_range_overlaps(int cutoff) {
    if (cutoff < 0 || cutoff > kCutoffCap) {
        throw InputError("half_range_overlaps: cutoff out of range");
    }
    const int n_max = cutoff + 1;
    std::vector<double> at_zero(static_cast<std::size_t>(n_max) + 1);
    eigenfunctions_at(0.0, at_zero);

    // psi_n'(x) = (sqrt(n) psi_{n-1}(x) - sqrt(n+1) psi_{n+1}(x)) / 2
    std::vector<double> slope(static_cast<std::size_t>(cutoff) + 1);
    for (int n = 0; n <= cutoff; ++n) {
        const double lower = n > 0 ? std::sqrt(static_cast<double>(n)) * at_zero[n - 1] : 0.0;
        slope[n] = 0.5 * (lower - std::sqrt(n + 1.0) * at_zero[n + 1]);
    }

    OverlapMatrix out;
    out.cutoff = cutoff;
    out.k = Eigen::MatrixXd::Zero(cutoff + 1, cutoff + 1);
    for (int n = 0; n <= cutoff; ++n) {
        out.k(n, n) = 0.5;
        for (int m = n + 1; m <= cutoff; m += 2) {
            // psi'' = (x^2/4 - n - 1/2) psi, so integrating the Wronskian
            // identity over [0, inf) leaves only the boundary term at 0.
            const double v = (at_zero[m] * slope[n] - at_zero[n] * slope[m]) / (n - m);
            out.k(n, m) = v;
            out.k(m, n) = v;
        }
    }
    return out;
}

const OverlapMatrix& shared_overlaps() {
    static const OverlapMatrix cache = half_range_overlaps(kCutoffCap);
    return cache;
}

Eigen::MatrixXd overlap_block(int cutoff) {
    return shared_overlaps().k.topLeftCorner(cutoff + 1, cutoff + 1);
}

double binned_joint_prob(std::span<const double> c, const Eigen::MatrixXd& kernel_a,
                         const Eigen::MatrixXd& kernel_b, double chi) {
    const auto n = static_cast<Eigen::Index>(c.size());
    if (kernel_a.rows() < n || kernel_b.rows() < n) {
        throw InputError("binned_joint_prob: kernel smaller than coefficient vector");
    }
    std::vector<double> cos_d(c.size());
    for (std::size_t d = 0; d < c.size(); ++d) cos_d[d] = std::cos(static_cast<double>(d) * chi);

    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        total += c[i] * c[i] * kernel_a(i, i) * kernel_b(i, i);
        for (Eigen::Index j = i + 1; j < n; ++j) {
            total += 2.0 * c[i] * c[j] * cos_d[j - i] * kernel_a(i, j) * kernel_b(i, j);
        }
    }
    return total;
}

double joint_density(const CircleStateCoeffs& coeffs, double chi, double x, double y) {
    const std::size_t n = coeffs.size();
    std::vector<double> px(n);
    std::vector<double> py(n);
    eigenfunctions_at(x, px);
    eigenfunctions_at(y, py);
    std::complex<double> amp = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        amp += coeffs.c[k] * std::polar(1.0, -static_cast<double>(k) * chi) * px[k] * py[k];
    }
    return std::norm(amp);
}

double joint_positive_prob(const CircleStateCoeffs& coeffs, double chi) {
    const Eigen::MatrixXd k = overlap_block(coeffs.cutoff);
    return binned_joint_prob(coeffs.values(), k, k, chi);
}

double joint_positive_negative_prob(const CircleStateCoeffs& coeffs, double chi) {
    const Eigen::MatrixXd k = overlap_block(coeffs.cutoff);
    const Eigen::MatrixXd complement =
        Eigen::MatrixXd::Identity(k.rows(), k.cols()) - k;
    return binned_joint_prob(coeffs.values(), k, complement, chi);
}

double marginal_positive_prob(const CircleStateCoeffs& coeffs) {
    const OverlapMatrix& k = shared_overlaps();
    double total = 0.0;
    for (std::size_t n = 0; n < coeffs.size(); ++n) {
        total += coeffs.c[n] * coeffs.c[n] * k(static_cast<int>(n), static_cast<int>(n));
    }
    return total;
}

double marginal_density(const CircleStateCoeffs& coeffs, double x) {
    std::vector<double> p(coeffs.size());
    eigenfunctions_at(x, p);
    double total = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) total += coeffs.c[n] * coeffs.c[n] * p[n] * p[n];
    return total;
}

double marginal_cdf(const CircleStateCoeffs& coeffs, double x) {
    if (!std::isfinite(x)) {
        if (std::isnan(x)) throw InputError("marginal_cdf: NaN argument");
        return x > 0 ? 1.0 : 0.0;
    }
    // The density is even, so F(x) = 1/2 + sign(x) * integral over [0, |x|].
    using rule = boost::math::quadrature::gauss<double, 20>;
    const double upper = std::abs(x);
    const int panels = std::max(1, static_cast<int>(std::ceil(upper / 0.5)));
    const double width = upper / panels;
    double half = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = p * width;
        half += rule::integrate([&](double t) { return marginal_density(coeffs, t); }, a, a + width);
    }
    return 0.5 + std::copysign(half, x);
}

void GridSpec::validate() const {
    if (!(std::isfinite(x_min) && std::isfinite(x_max) && std::isfinite(y_min) &&
          std::isfinite(y_max))) {
        throw InputError("grid bounds must be finite");
    }
    if (!(x_max > x_min) || !(y_max > y_min)) {
        throw InputError("grid bounds must be increasing");
    }
    if (nx < 2 || ny < 2) {
        throw InputError("grid needs at least two points per axis");
    }
}

double JointDensityGrid::mass() const {
    const auto nx = values.rows();
    const auto ny = values.cols();
    double total = 0.0;
    for (Eigen::Index i = 0; i < nx; ++i) {
        const double wi = (i == 0 || i == nx - 1) ? 0.5 : 1.0;
        for (Eigen::Index j = 0; j < ny; ++j) {
            const double wj = (j == 0 || j == ny - 1) ? 0.5 : 1.0;
            total += wi * wj * values(i, j);
        }
    }
    return total * grid.dx() * grid.dy();
}

JointDensityGrid joint_density_grid(const CircleStateCoeffs& coeffs, double chi,
                                    const GridSpec& grid, int jobs) {
    grid.validate();
    JointDensityGrid out;
    out.chi = chi;
    out.r0 = coeffs.r0;
    out.grid = grid;
    out.x_grid.resize(grid.nx);
    out.y_grid.resize(grid.ny);
    for (int i = 0; i < grid.nx; ++i) out.x_grid[i] = grid.x(i);
    for (int j = 0; j < grid.ny; ++j) out.y_grid[j] = grid.y(j);

    // Precompute psi_n on both axes; the density is then a rank-N sum per point.
    const auto n = static_cast<Eigen::Index>(coeffs.size());
    Eigen::MatrixXd px(grid.nx, n);
    Eigen::MatrixXd py(grid.ny, n);
    std::vector<double> buf(coeffs.size());
    for (int i = 0; i < grid.nx; ++i) {
        eigenfunctions_at(out.x_grid[i], buf);
        for (Eigen::Index k = 0; k < n; ++k) px(i, k) = buf[k];
    }
    for (int j = 0; j < grid.ny; ++j) {
        eigenfunctions_at(out.y_grid[j], buf);
        for (Eigen::Index k = 0; k < n; ++k) py(j, k) = buf[k];
    }
    Eigen::VectorXd re(n);
    Eigen::VectorXd im(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        re(k) = coeffs.c[k] * std::cos(-static_cast<double>(k) * chi);
        im(k) = coeffs.c[k] * std::sin(-static_cast<double>(k) * chi);
    }

    out.values.resize(grid.nx, grid.ny);
    parallel_for(static_cast<std::size_t>(grid.nx), jobs, [&](std::size_t i) {
        const Eigen::VectorXd wr = px.row(static_cast<Eigen::Index>(i)).transpose().cwiseProduct(re);
        const Eigen::VectorXd wi = px.row(static_cast<Eigen::Index>(i)).transpose().cwiseProduct(im);
        const Eigen::VectorXd ar = py * wr;
        const Eigen::VectorXd ai = py * wi;
        out.values.row(static_cast<Eigen::Index>(i)) =
            (ar.array().square() + ai.array().square()).matrix().transpose();
    });
    return out;
}

}  // namespace cvbell
