#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <lapacke.h>

#include "errors.hpp"

namespace kgedmd::lapack {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline void check(lapack_int info, const char* routine) {
    if (info != 0) throw NumericalError(std::string(routine) + " failed, info = " + std::to_string(info));
}

// All eigenpairs of a symmetric matrix, ascending. A is overwritten by the eigenvectors.
inline Vec syevd(Mat& A) {
    const auto n = static_cast<lapack_int>(A.rows());
    Vec w(n);
    if (n == 0) return w;
    check(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, A.data(), n, w.data()), "dsyevd");
    return w;
}

// Eigenpairs il..iu (1-based, ascending) of a symmetric matrix.
inline Vec syevr_range(Mat& A, lapack_int il, lapack_int iu, Mat& Z) {
    const auto n = static_cast<lapack_int>(A.rows());
    lapack_int found = 0;
    Vec w(n);
    Z.resize(n, iu - il + 1);
    std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n));
    check(LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, A.data(), n, 0.0, 0.0, il, iu, 0.0, &found, w.data(),
                         Z.data(), n, isuppz.data()),
          "dsyevr");
    Z.conservativeResize(n, found);
    return w.head(found);
}

// Symmetric-definite pencil A x = l B x, ascending. A receives the eigenvectors.
inline Vec sygvd(Mat& A, Mat& B) {
    const auto n = static_cast<lapack_int>(A.rows());
    Vec w(n);
    check(LAPACKE_dsygvd(LAPACK_COL_MAJOR, 1, 'V', 'L', n, A.data(), n, B.data(), n, w.data()), "dsygvd");
    return w;
}

struct GeneralEig {
    std::vector<std::complex<double>> values;
    Eigen::MatrixXcd vectors;
};

// Right eigenpairs of a general real matrix. A is destroyed.
inline GeneralEig geev(Mat& A) {
    const auto n = static_cast<lapack_int>(A.rows());
    Vec wr(n), wi(n);
    Mat vr(n, n);
    double dummy = 0.0;
    check(LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'V', n, A.data(), n, wr.data(), wi.data(), &dummy, 1, vr.data(), n),
          "dgeev");
    GeneralEig out;
    out.values.resize(static_cast<std::size_t>(n));
    out.vectors.resize(n, n);
    for (lapack_int j = 0; j < n; ++j) {
        out.values[static_cast<std::size_t>(j)] = {wr(j), wi(j)};
        if (wi(j) == 0.0) {
            out.vectors.col(j) = vr.col(j).cast<std::complex<double>>();
        } else if (j + 1 < n) {
            out.values[static_cast<std::size_t>(j + 1)] = {wr(j + 1), wi(j + 1)};
            for (lapack_int i = 0; i < n; ++i) {
                out.vectors(i, j) = {vr(i, j), vr(i, j + 1)};
                out.vectors(i, j + 1) = {vr(i, j), -vr(i, j + 1)};
            }
            ++j;
        }
    }
    return out;
}

}  // namespace kgedmd::lapack
