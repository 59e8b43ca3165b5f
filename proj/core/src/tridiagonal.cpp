#include "cvbell/tridiagonal.hpp"

#include <lapacke.h>

#include <string>
#include <vector>

#include "cvbell/errors.hpp"

namespace cvbell {

TridiagonalEigen tridiagonal_eigen(std::span<const double> diagonal,
                                   std::span<const double> off_diagonal) {
    const auto n = static_cast<lapack_int>(diagonal.size());
    if (n == 0 || off_diagonal.size() + 1 != diagonal.size()) {
        throw InputError("tridiagonal_eigen: inconsistent band sizes");
    }
    TridiagonalEigen out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    if (n == 1) {
        out.values(0) = diagonal[0];
        out.vectors(0, 0) = 1.0;
        return out;
    }

    // dstevr overwrites both bands; the off-diagonal workspace needs length n.
    std::vector<double> d(diagonal.begin(), diagonal.end());
    std::vector<double> e(off_diagonal.begin(), off_diagonal.end());
    e.push_back(0.0);
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
    lapack_int found = 0;
    const lapack_int info =
        LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'A', n, d.data(), e.data(), 0.0, 0.0, 0, 0, 0.0,
                       &found, out.values.data(), out.vectors.data(), n, support.data());
    if (info != 0 || found != n) {
        throw NumericalError("tridiagonal_eigen: LAPACK dstevr failed (info " +
                             std::to_string(info) + ")");
    }
    return out;
}

}  // namespace cvbell
