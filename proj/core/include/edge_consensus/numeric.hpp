#pragma once

#include "edge_consensus/types.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace edge_consensus {

/// Dense Kronecker product a ⊗ b.
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> kron(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    using Out = Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    Out out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// Numerical rank from singular values, relative threshold against the largest one.
template <typename Derived>
int numeric_rank(const Eigen::MatrixBase<Derived>& m, double rel_tol = 1e-9) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    Eigen::JacobiSVD<Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>>
        svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) <= 0.0) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) >= rel_tol * sv(0)) ++rank;
    }
    return rank;
}

/// Flip the sign of each column so its first component above threshold is positive.
inline void normalize_column_signs(Matrix& m, double tol = 1e-9) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            if (std::abs(m(i, j)) > tol) {
                if (m(i, j) < 0.0) m.col(j) = -m.col(j);
                break;
            }
        }
    }
}

/// Rotate each column by a unit phase so its first significant component is real positive.
inline void normalize_column_phases(ComplexMatrix& m, double tol = 1e-9) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            if (std::abs(m(i, j)) > tol) {
                m.col(j) *= std::conj(m(i, j)) / std::abs(m(i, j));
                break;
            }
        }
    }
}

/// Symmetric PSD square root via spectral decomposition; tiny negative
/// eigenvalues from rounding are clamped to zero.
Matrix symmetric_sqrt(const Matrix& m);
ComplexMatrix hermitian_sqrt(const ComplexMatrix& m);

/// Max pairing distance between two equally sized complex multisets under the
/// assignment that minimizes it (Hungarian algorithm on |a_i - b_j|).
double multiset_match_distance(const Spectrum& a, const Spectrum& b);

/// Eigenvalues sorted by (real, imaginary) ascending.
Spectrum sorted_eigenvalues(const Matrix& m);
Spectrum sorted_eigenvalues(const ComplexMatrix& m);

inline void sort_spectrum(Spectrum& s) {
    std::sort(s.begin(), s.end(), [](const Complex& x, const Complex& y) {
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() < y.imag();
    });
}

inline double max_real_part(const Spectrum& s) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& v : s) m = std::max(m, v.real());
    return m;
}

}  // namespace edge_consensus
