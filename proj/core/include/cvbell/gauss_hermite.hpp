#pragma once

#include <vector>

namespace cvbell {

/// Nodes and weights for integral of exp(-u^2) f(u) du over the real line;
/// exact for polynomial f of degree <= 2 * nodes.size() - 1.
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Golub-Welsch construction from the Hermite Jacobi matrix.
GaussHermiteRule gauss_hermite(int points);

}  // namespace cvbell
