#include "edge_consensus/linear_systems.hpp"

#include "edge_consensus/errors.hpp"
#include "edge_consensus/numeric.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace edge_consensus {

namespace {

void require_square(const Matrix& m, const char* name) {
    if (m.rows() != m.cols()) {
        throw InputError(std::string(name) + " must be square");
    }
}

bool is_symmetric(const Matrix& m, double tol = 1e-10) {
    return (m - m.transpose()).norm() <= tol * std::max(1.0, m.norm());
}

// Swap the leading diagonal entries of the 2x2 block at (i, i) of an upper
// triangular complex Schur form, keeping it triangular. Unitary update is
// accumulated into u.
void swap_adjacent_diagonal(ComplexMatrix& t, ComplexMatrix& u, Eigen::Index i) {
    const Complex a = t(i, i);
    const Complex b = t(i, i + 1);
    const Complex d = t(i + 1, i + 1);
    // Eigenvector of [[a, b], [0, d]] for eigenvalue d is (b, d - a).
    const double r = std::hypot(std::abs(b), std::abs(d - a));
    if (r == 0.0) return;  // identical eigenvalues, order is immaterial
    const Complex c1 = b / r;
    const Complex s1 = (d - a) / r;
    Eigen::Matrix2cd g;
    g << std::conj(c1), std::conj(s1), -s1, c1;
    t.middleRows(i, 2) = g * t.middleRows(i, 2);
    t.middleCols(i, 2) = t.middleCols(i, 2) * g.adjoint();
    u.middleCols(i, 2) = u.middleCols(i, 2) * g.adjoint();
    t(i + 1, i) = 0.0;
}

// Bubble every eigenvalue with negative real part to the top-left corner.
// Returns how many there are.
int reorder_stable_first(ComplexMatrix& t, ComplexMatrix& u) {
    const Eigen::Index n = t.rows();
    const auto stable = [&](Eigen::Index k) { return t(k, k).real() < 0.0; };
    int n_stable = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
        if (stable(k)) ++n_stable;
    }
    bool moved = true;
    while (moved) {
        moved = false;
        for (Eigen::Index i = 0; i + 1 < n; ++i) {
            if (!stable(i) && stable(i + 1)) {
                swap_adjacent_diagonal(t, u, i);
                moved = true;
            }
        }
    }
    return n_stable;
}

double care_residual(const ComplexMatrix& a, const ComplexMatrix& s, const ComplexMatrix& q,
                     const ComplexMatrix& p) {
    return (p * a + a.adjoint() * p + q - p * s * p).norm();
}

}  // namespace

LtiModel make_model(Matrix a, Matrix b, std::optional<RowVector> c) {
    require_square(a, "A");
    if (b.rows() != a.rows()) {
        throw InputError("B must have as many rows as A");
    }
    if (b.cols() < 1) {
        throw InputError("B must have at least one column");
    }
    if (c && c->cols() != a.cols()) {
        throw InputError("C row length must match the state dimension");
    }
    return LtiModel{std::move(a), std::move(b), std::move(c)};
}

AssumptionReport check_assumptions(const LtiModel& model, double tol) {
    AssumptionReport report;
    report.spectrum_of_a = eig(model.a);

    double max_re = -std::numeric_limits<double>::infinity();
    for (const auto& lambda : report.spectrum_of_a) {
        max_re = std::max(max_re, lambda.real());
        if (std::abs(lambda.real()) <= tol) {
            report.imaginary_axis_eigs.push_back(lambda);
        }
    }
    report.a1_holds = (max_re <= tol) && !report.imaginary_axis_eigs.empty();

    // Controllability through the rank of [B, AB, ..., A^{n-1}B]. Columns are
    // normalized first so stiff systems do not shadow the small directions.
    const int n = model.state_dim();
    const int m = model.input_dim();
    Matrix ctrb(n, n * m);
    ctrb.leftCols(m) = model.b;
    for (int k = 1; k < n; ++k) {
        ctrb.middleCols(k * m, m) = model.a * ctrb.middleCols((k - 1) * m, m);
    }
    for (Eigen::Index j = 0; j < ctrb.cols(); ++j) {
        const double len = ctrb.col(j).norm();
        if (len > 0.0) ctrb.col(j) /= len;
    }
    report.a2_holds = (numeric_rank(ctrb, tol) == n);
    return report;
}

Spectrum eig(const Matrix& m) {
    require_square(m, "matrix");
    Eigen::EigenSolver<Matrix> es(m, false);
    Spectrum out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    sort_spectrum(out);
    return out;
}

Spectrum eig(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) {
        throw InputError("matrix must be square");
    }
    Eigen::ComplexEigenSolver<ComplexMatrix> es(m, false);
    Spectrum out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    sort_spectrum(out);
    return out;
}

EigenPairs eig_pairs(const Matrix& m) {
    require_square(m, "matrix");
    Eigen::EigenSolver<Matrix> es(m, true);
    const Eigen::Index n = m.rows();
    std::vector<Eigen::Index> order(n);
    for (Eigen::Index i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
        const Complex a = es.eigenvalues()(x);
        const Complex b = es.eigenvalues()(y);
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    EigenPairs pairs;
    pairs.values = ComplexVector(n);
    pairs.vectors = ComplexMatrix(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        pairs.values(i) = es.eigenvalues()(order[i]);
        pairs.vectors.col(i) = es.eigenvectors().col(order[i]);
    }
    normalize_column_phases(pairs.vectors);
    return pairs;
}

bool pbh_stabilizable(const ComplexMatrix& a, const ComplexMatrix& b, double tol) {
    const Eigen::Index n = a.rows();
    ComplexMatrix pencil(n, n + b.cols());
    for (const auto& lambda : eig(a)) {
        if (lambda.real() < -tol) continue;
        pencil.leftCols(n) = a - lambda * ComplexMatrix::Identity(n, n);
        pencil.rightCols(b.cols()) = b;
        if (numeric_rank(pencil, tol) < n) return false;
    }
    return true;
}

bool pbh_detectable(const ComplexMatrix& a, const ComplexMatrix& c, double tol) {
    return pbh_stabilizable(ComplexMatrix(a.adjoint()), ComplexMatrix(c.adjoint()), tol);
}

bool pbh_stabilizable(const Matrix& a, const Matrix& b, double tol) {
    return pbh_stabilizable(ComplexMatrix(a.cast<Complex>()), ComplexMatrix(b.cast<Complex>()),
                            tol);
}

bool pbh_detectable(const Matrix& a, const Matrix& c, double tol) {
    return pbh_stabilizable(ComplexMatrix(a.transpose().cast<Complex>()),
                            ComplexMatrix(c.transpose().cast<Complex>()), tol);
}

ComplexMatrix solve_lyapunov(const ComplexMatrix& a, const ComplexMatrix& w) {
    const Eigen::Index n = a.rows();
    Eigen::ComplexSchur<ComplexMatrix> schur(a, true);
    const ComplexMatrix& t = schur.matrixT();
    const ComplexMatrix& u = schur.matrixU();

    // Transformed equation: T^* Y + Y T + U^* W U = 0, solved column by column.
    ComplexMatrix wt = u.adjoint() * w * u;
    ComplexMatrix y = ComplexMatrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        ComplexVector rhs = -wt.col(j);
        if (j > 0) {
            rhs.noalias() -= y.leftCols(j) * t.topRows(j).col(j);
        }
        ComplexMatrix lhs = t.adjoint();
        lhs.diagonal().array() += t(j, j);
        y.col(j) = lhs.triangularView<Eigen::Lower>().solve(rhs);
    }
    return u * y * u.adjoint();
}

Matrix solve_lyapunov(const Matrix& a, const Matrix& w) {
    ComplexMatrix x =
        solve_lyapunov(ComplexMatrix(a.cast<Complex>()), ComplexMatrix(w.cast<Complex>()));
    return x.real();
}

ComplexMatrix solve_care_hermitian(const ComplexMatrix& a, const ComplexMatrix& s,
                                   const ComplexMatrix& q, double* residual_out) {
    const Eigen::Index n = a.rows();
    ComplexMatrix ham(2 * n, 2 * n);
    ham.topLeftCorner(n, n) = a;
    ham.topRightCorner(n, n) = -s;
    ham.bottomLeftCorner(n, n) = -q;
    ham.bottomRightCorner(n, n) = -a.adjoint();

    Eigen::ComplexSchur<ComplexMatrix> schur(ham, true);
    ComplexMatrix t = schur.matrixT();
    ComplexMatrix u = schur.matrixU();
    const int n_stable = reorder_stable_first(t, u);
    if (n_stable != n) {
        throw ConvergenceFailure(
            "Hamiltonian spectrum does not split: " + std::to_string(n_stable) + " of " +
                std::to_string(2 * n) + " eigenvalues are stable",
            std::numeric_limits<double>::quiet_NaN());
    }

    ComplexMatrix x1 = u.topLeftCorner(n, n);
    ComplexMatrix x2 = u.bottomLeftCorner(n, n);
    Eigen::FullPivLU<ComplexMatrix> lu(x1);
    if (!lu.isInvertible()) {
        throw ConvergenceFailure("stable invariant subspace has singular leading block",
                                 std::numeric_limits<double>::quiet_NaN());
    }
    ComplexMatrix p = x2 * lu.inverse();
    p = 0.5 * (p + p.adjoint()).eval();

    // Newton refinement, kept while it reduces the residual. Usually a single
    // step reaches the floating-point floor; badly scaled solutions need a few.
    double residual = care_residual(a, s, q, p);
    for (int iter = 0; iter < 10 && residual > 0.0; ++iter) {
        ComplexMatrix a_cl = a - s * p;
        ComplexMatrix refined = solve_lyapunov(a_cl, ComplexMatrix(q + p * s * p));
        refined = 0.5 * (refined + refined.adjoint()).eval();
        const double refined_residual = care_residual(a, s, q, refined);
        if (refined_residual >= residual) break;
        p = std::move(refined);
        residual = refined_residual;
    }
    if (residual_out) {
        *residual_out = residual;
    }
    return p;
}

RiccatiSolution solve_care(const Matrix& a, const Matrix& b, const Matrix& q,
                           const Matrix& r1) {
    require_square(a, "A");
    require_square(q, "Q");
    require_square(r1, "R1");
    const int n = static_cast<int>(a.rows());
    if (b.rows() != n || q.rows() != n || r1.rows() != b.cols()) {
        throw InputError("CARE dimension mismatch");
    }
    if (!is_symmetric(q)) {
        throw InputError("Q must be symmetric");
    }
    if (!is_symmetric(r1)) {
        throw InputError("R1 must be symmetric");
    }
    {
        Eigen::SelfAdjointEigenSolver<Matrix> es(q, Eigen::EigenvaluesOnly);
        if (es.eigenvalues()(0) < -1e-10 * std::max(1.0, q.norm())) {
            throw InputError("Q must be positive semidefinite");
        }
        Eigen::SelfAdjointEigenSolver<Matrix> er(r1, Eigen::EigenvaluesOnly);
        if (er.eigenvalues()(0) <= 0.0) {
            throw InputError("R1 must be positive definite");
        }
    }
    if (!pbh_stabilizable(a, b)) {
        throw NotStabilizable("(A, B) is not stabilizable");
    }
    const Matrix q_half = symmetric_sqrt(q);
    if (!pbh_detectable(a, q_half)) {
        throw NotDetectable("(Q^{1/2}, A) is not detectable");
    }

    Matrix s = b * r1 * b.transpose();
    s = 0.5 * (s + s.transpose()).eval();

    double residual = 0.0;
    ComplexMatrix pc = solve_care_hermitian(a.cast<Complex>(), s.cast<Complex>(),
                                            q.cast<Complex>(), &residual);
    Matrix p = pc.real();
    p = 0.5 * (p + p.transpose()).eval();

    RiccatiSolution sol;
    sol.p = p;
    sol.residual_norm = (p * a + a.transpose() * p + q - p * s * p).norm();
    sol.gain = r1 * b.transpose() * p;

    // Tolerance scales with the terms the residual is assembled from, which
    // for well-scaled problems collapses to 1e-9 * max(1, |Q|).
    const double term_scale =
        q.norm() + 2.0 * (p * a).norm() + (p * s * p).norm();
    const double tol = 1e-9 * std::max(1.0, term_scale);
    if (!(sol.residual_norm < tol)) {
        throw ConvergenceFailure("CARE residual " + std::to_string(sol.residual_norm) +
                                     " above tolerance " + std::to_string(tol),
                                 sol.residual_norm);
    }
    const Spectrum cl = eig(Matrix(a - b * sol.gain));
    if (max_real_part(cl) >= 0.0) {
        throw ConvergenceFailure("closed loop not Hurwitz after CARE solve",
                                 sol.residual_norm);
    }
    return sol;
}

Matrix symmetric_sqrt(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    Vector vals = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().transpose();
}

ComplexMatrix hermitian_sqrt(const ComplexMatrix& m) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m);
    Vector vals = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
}

Spectrum sorted_eigenvalues(const Matrix& m) { return eig(m); }
Spectrum sorted_eigenvalues(const ComplexMatrix& m) { return eig(m); }

double multiset_match_distance(const Spectrum& a, const Spectrum& b) {
    if (a.size() != b.size()) {
        throw InputError("multiset sizes differ");
    }
    const int n = static_cast<int>(a.size());
    if (n == 0) return 0.0;

    // Hungarian algorithm (Jonker-style with potentials) on the cost
    // matrix |a_i - b_j|, then report the largest matched distance.
    std::vector<std::vector<double>> cost(n, std::vector<double>(n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            cost[i][j] = std::abs(a[i] - b[j]);
        }
    }
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> pot_u(n + 1, 0.0), pot_v(n + 1, 0.0);
    std::vector<int> way(n + 1, 0), matched(n + 1, -1);
    for (int i = 0; i < n; ++i) {
        matched[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = matched[j0];
            double delta = inf;
            int j1 = -1;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0][j - 1] - pot_u[i0 + 1] - pot_v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    pot_u[matched[j] + 1] += delta;
                    pot_v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (matched[j0] != -1);
        do {
            const int j1 = way[j0];
            matched[j0] = matched[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    double worst = 0.0;
    for (int j = 1; j <= n; ++j) {
        worst = std::max(worst, cost[matched[j]][j - 1]);
    }
    return worst;
}

}  // namespace edge_consensus
