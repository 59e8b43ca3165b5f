#include "cvbell/gauss_hermite.hpp"

#include <cmath>
#include <numbers>

#include "cvbell/errors.hpp"
#include "cvbell/tridiagonal.hpp"

namespace cvbell {

GaussHermiteRule gauss_hermite(int points) {
    if (points < 1) throw InputError("gauss_hermite: need at least one node");
    std::vector<double> diag(points, 0.0);
    std::vector<double> off(points - 1);
    for (int k = 1; k < points; ++k) off[k - 1] = std::sqrt(0.5 * k);

    const TridiagonalEigen eig = tridiagonal_eigen(diag, off);
    GaussHermiteRule rule;
    rule.nodes.resize(points);
    rule.weights.resize(points);
    // Weights from the Christoffel function 1 / sum_j p_j(u)^2 over the
    // orthonormal Hermite polynomials; unlike the squared first eigenvector
    // component this keeps full relative accuracy in the tails.
    const double p0 = std::pow(std::numbers::pi, -0.25);
    for (int k = 0; k < points; ++k) {
        const double u = eig.values(k);
        double prev = 0.0;
        double cur = p0;
        double sum = cur * cur;
        for (int j = 0; j + 1 < points; ++j) {
            const double next = (std::sqrt(2.0) * u * cur - std::sqrt(static_cast<double>(j)) * prev) /
                                std::sqrt(j + 1.0);
            prev = cur;
            cur = next;
            sum += cur * cur;
        }
        rule.nodes[k] = u;
        rule.weights[k] = 1.0 / sum;
    }
    return rule;
}

}  // namespace cvbell
