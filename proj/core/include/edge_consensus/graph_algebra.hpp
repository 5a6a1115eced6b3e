#pragma once

#include "edge_consensus/types.hpp"

#include <utility>
#include <vector>

namespace edge_consensus {

/// Undirected weighted communication graph with 1-based node indices.
/// Edges are canonicalized on construction: endpoints ordered low-high and
/// the list sorted lexicographically.
struct Graph {
    int node_count = 0;
    std::vector<std::pair<int, int>> edges;
    std::vector<double> weights;

    int edge_count() const { return static_cast<int>(edges.size()); }
};

/// The matrices derived from a graph. The incidence matrix carries ±sqrt(a_ij)
/// at the edge endpoints (+ at the lower index), so laplacian = E E^T holds for
/// weighted graphs as well.
struct GraphMatrices {
    Matrix incidence;       // N x M
    Matrix laplacian;       // N x N, E E^T
    Matrix edge_laplacian;  // M x M, E^T E
    Matrix pseudoinverse;   // N x N, Moore-Penrose inverse of the Laplacian
    Matrix lbar;            // M x M, E^T L^+ E
    int node_count = 0;
    int edge_count = 0;
    bool connected = false;
};

/// Spectral decomposition of the Laplacian of a connected graph:
/// V = [v1 V2] orthogonal, v1 = 1/sqrt(N), V^T L V = diag(0, gamma).
struct LaplacianSpectrum {
    Vector eigenvalues;  // all N, ascending, first is 0
    Vector v1;           // N
    Matrix v2;           // N x (N-1), sign-normalized columns
    Vector gamma;        // N-1 nonzero eigenvalues, ascending
    double lambda_min = 0.0;
};

/// Validates and canonicalizes the edge list. Weights default to all ones.
/// Rejects self-loops, duplicate edges, non-positive weights and N < 2.
Graph build_graph(int node_count, std::vector<std::pair<int, int>> edge_list,
                  std::vector<double> weights = {});

/// True iff the graph is connected (breadth-first traversal; no tolerance).
bool is_connected(const Graph& g);

GraphMatrices compute_matrices(const Graph& g);

/// Throws DisconnectedGraph when the traversal-based connectivity check fails.
LaplacianSpectrum spectrum(const GraphMatrices& gm);

}  // namespace edge_consensus
