#pragma once

#include "edge_consensus/graph_algebra.hpp"
#include "edge_consensus/linear_systems.hpp"
#include "edge_consensus/types.hpp"

#include <utility>

namespace edge_consensus {

/// The multi-agent system rewritten on inter-agent differences:
/// z = (E^T ⊗ I_n) x evolves as z' = (Lbar ⊗ A) z + (I_M ⊗ B) w.
struct EdgeDynamics {
    Matrix lbar_kron_a;  // Mn x Mn
    Matrix input_map;    // Mn x Mm
    Matrix z_projector;  // Mn x Nn, maps stacked agent states to edge states
    int edge_state_dim = 0;
};

/// Orthogonal change of basis U = [U1 U2] that block-diagonalizes Lbar.
/// U2 = E^T V2 Gamma^{-1/2}; U1 spans the cycle space (kernel of E) and is
/// empty exactly when the graph is a spanning tree.
struct EdgeTransform {
    Matrix u1;     // M x (M-N+1)
    Matrix u2;     // M x (N-1)
    Vector gamma;  // N-1 nonzero Laplacian eigenvalues
    bool is_tree = false;

    Matrix u() const {
        Matrix out(u2.rows(), u1.cols() + u2.cols());
        out << u1, u2;
        return out;
    }
};

/// The (N-1)-block subsystem every design operates on:
/// z2' = (I_{N-1} ⊗ A) z2 + (I_{N-1} ⊗ B) w2.
struct ReducedEdgeSystem {
    Matrix a_block;       // (N-1)n x (N-1)n
    Matrix b_block;       // (N-1)n x (N-1)m
    Matrix z2_projector;  // (N-1)n x Nn, equals (Gamma^{1/2} V2^T) ⊗ I_n
};

EdgeDynamics build_edge_dynamics(const GraphMatrices& gm, const LtiModel& model);

EdgeTransform build_transform(const GraphMatrices& gm, const LaplacianSpectrum& sp);

ReducedEdgeSystem build_reduced_system(const GraphMatrices& gm, const LaplacianSpectrum& sp,
                                       const EdgeTransform& tf, const LtiModel& model);

/// Splits an initial agent-state vector into the transformed edge coordinates
/// (z1(0), z2(0)). The first component is zero for every x0 since E U1 = 0.
std::pair<Vector, Vector> project_initial_state(const EdgeTransform& tf, const EdgeDynamics& ed,
                                                const Vector& x0);

}  // namespace edge_consensus
