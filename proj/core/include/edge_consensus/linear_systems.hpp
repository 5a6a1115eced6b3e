#pragma once

#include "edge_consensus/types.hpp"

#include <optional>

namespace edge_consensus {

/// Agent dynamics x' = A x + B u, with an optional scalar output row C.
struct LtiModel {
    Matrix a;
    Matrix b;
    std::optional<RowVector> c;

    int state_dim() const { return static_cast<int>(a.rows()); }
    int input_dim() const { return static_cast<int>(b.cols()); }
};

/// Validates dimension consistency between A, B and the optional C row.
LtiModel make_model(Matrix a, Matrix b, std::optional<RowVector> c = std::nullopt);

/// A1: spectrum in the closed left half plane with at least one eigenvalue on
/// the imaginary axis. A2: (A, B) controllable.
struct AssumptionReport {
    bool a1_holds = false;
    bool a2_holds = false;
    Spectrum spectrum_of_a;
    Spectrum imaginary_axis_eigs;
};

AssumptionReport check_assumptions(const LtiModel& model, double tol = 1e-9);

struct RiccatiSolution {
    Matrix p;             // symmetric stabilizing solution
    double residual_norm; // Frobenius norm of the Riccati residual
    Matrix gain;          // R1 B^T P
};

/// Stabilizing solution of P A + A^T P + Q - P B R1 B^T P = 0. R1 plays the
/// role of the inverted input weight, i.e. the feedback gain is R1 B^T P.
/// Solved through the stable invariant subspace of the Hamiltonian matrix,
/// followed by one Newton refinement step.
RiccatiSolution solve_care(const Matrix& a, const Matrix& b, const Matrix& q,
                           const Matrix& r1);

/// Hermitian variant, P A + A^* P + Q - P S P = 0 with S, Q Hermitian PSD.
ComplexMatrix solve_care_hermitian(const ComplexMatrix& a, const ComplexMatrix& s,
                                   const ComplexMatrix& q, double* residual_out = nullptr);

/// A^T X + X A + W = 0 for stable A (Bartels-Stewart via complex Schur).
Matrix solve_lyapunov(const Matrix& a, const Matrix& w);
/// A^* X + X A + W = 0.
ComplexMatrix solve_lyapunov(const ComplexMatrix& a, const ComplexMatrix& w);

/// Eigenvalues with multiplicity, sorted by (real, imaginary).
Spectrum eig(const Matrix& m);
Spectrum eig(const ComplexMatrix& m);

/// Eigenvalues together with right eigenvectors, in the same deterministic
/// order as eig().
struct EigenPairs {
    ComplexVector values;
    ComplexMatrix vectors;  // one column per eigenvalue
};
EigenPairs eig_pairs(const Matrix& m);

/// PBH rank tests, evaluated at every eigenvalue with real part >= -tol.
bool pbh_stabilizable(const Matrix& a, const Matrix& b, double tol = 1e-9);
bool pbh_detectable(const Matrix& a, const Matrix& c, double tol = 1e-9);
bool pbh_stabilizable(const ComplexMatrix& a, const ComplexMatrix& b, double tol = 1e-9);
bool pbh_detectable(const ComplexMatrix& a, const ComplexMatrix& c, double tol = 1e-9);

}  // namespace edge_consensus
