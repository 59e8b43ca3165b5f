#pragma once

#include <Eigen/Dense>
#include <span>

namespace cvbell {

struct TridiagonalEigen {
    Eigen::VectorXd values;   ///< ascending
    Eigen::MatrixXd vectors;  ///< column k is the unit eigenvector of values(k)
};

/// Full spectral decomposition of the real symmetric tridiagonal matrix with
/// the given diagonal and sub-diagonal (LAPACK dstevr, relatively robust
/// representations).
TridiagonalEigen tridiagonal_eigen(std::span<const double> diagonal,
                                   std::span<const double> off_diagonal);

}  // namespace cvbell
