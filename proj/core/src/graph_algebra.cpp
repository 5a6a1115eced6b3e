#include "edge_consensus/graph_algebra.hpp"

#include "edge_consensus/errors.hpp"
#include "edge_consensus/numeric.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

namespace edge_consensus {

Graph build_graph(int node_count, std::vector<std::pair<int, int>> edge_list,
                  std::vector<double> weights) {
    if (node_count < 2) {
        throw InputError("graph needs at least 2 nodes, got " + std::to_string(node_count));
    }
    if (weights.empty()) {
        weights.assign(edge_list.size(), 1.0);
    }
    if (weights.size() != edge_list.size()) {
        throw InputError("weight count does not match edge count");
    }

    // Canonicalize endpoints, then sort edges and weights together.
    std::vector<std::size_t> order(edge_list.size());
    for (std::size_t k = 0; k < edge_list.size(); ++k) {
        auto& [i, j] = edge_list[k];
        if (i < 1 || i > node_count || j < 1 || j > node_count) {
            throw InputError("edge endpoint out of range: (" + std::to_string(i) + ", " +
                             std::to_string(j) + ")");
        }
        if (i == j) {
            throw InputError("self-loop at node " + std::to_string(i));
        }
        if (i > j) std::swap(i, j);
        if (weights[k] <= 0.0) {
            throw InputError("edge weight must be positive, got " + std::to_string(weights[k]));
        }
        order[k] = k;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return edge_list[a] < edge_list[b];
    });

    Graph g;
    g.node_count = node_count;
    g.edges.reserve(edge_list.size());
    g.weights.reserve(edge_list.size());
    for (std::size_t k : order) {
        g.edges.push_back(edge_list[k]);
        g.weights.push_back(weights[k]);
    }
    for (std::size_t k = 1; k < g.edges.size(); ++k) {
        if (g.edges[k] == g.edges[k - 1]) {
            throw InputError("duplicate edge (" + std::to_string(g.edges[k].first) + ", " +
                             std::to_string(g.edges[k].second) + ")");
        }
    }
    return g;
}

bool is_connected(const Graph& g) {
    if (g.node_count < 1) return false;
    std::vector<std::vector<int>> adj(g.node_count);
    for (const auto& [i, j] : g.edges) {
        adj[i - 1].push_back(j - 1);
        adj[j - 1].push_back(i - 1);
    }
    std::vector<char> seen(g.node_count, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : adj[u]) {
            if (!seen[v]) {
                seen[v] = 1;
                ++reached;
                stack.push_back(v);
            }
        }
    }
    return reached == g.node_count;
}

GraphMatrices compute_matrices(const Graph& g) {
    const int n = g.node_count;
    const int m = g.edge_count();

    GraphMatrices gm;
    gm.node_count = n;
    gm.edge_count = m;
    gm.connected = is_connected(g);

    gm.incidence = Matrix::Zero(n, m);
    for (int k = 0; k < m; ++k) {
        const double s = std::sqrt(g.weights[k]);
        gm.incidence(g.edges[k].first - 1, k) = s;
        gm.incidence(g.edges[k].second - 1, k) = -s;
    }
    gm.laplacian = gm.incidence * gm.incidence.transpose();
    gm.edge_laplacian = gm.incidence.transpose() * gm.incidence;

    // Pseudoinverse by inverting the nonzero part of the spectrum.
    Eigen::SelfAdjointEigenSolver<Matrix> es(gm.laplacian);
    const Vector& vals = es.eigenvalues();
    const Matrix& vecs = es.eigenvectors();
    const double cutoff = 1e-9 * std::max(1.0, vals.size() > 0 ? vals(vals.size() - 1) : 0.0);
    Vector inv = Vector::Zero(vals.size());
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        if (vals(i) > cutoff) inv(i) = 1.0 / vals(i);
    }
    gm.pseudoinverse = vecs * inv.asDiagonal() * vecs.transpose();
    gm.lbar = gm.incidence.transpose() * gm.pseudoinverse * gm.incidence;
    return gm;
}

LaplacianSpectrum spectrum(const GraphMatrices& gm) {
    if (!gm.connected) {
        throw DisconnectedGraph("graph not connected");
    }
    const int n = gm.node_count;
    Eigen::SelfAdjointEigenSolver<Matrix> es(gm.laplacian);

    LaplacianSpectrum sp;
    sp.eigenvalues = es.eigenvalues();
    sp.v1 = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    sp.v2 = es.eigenvectors().rightCols(n - 1);
    normalize_column_signs(sp.v2);
    sp.gamma = sp.eigenvalues.tail(n - 1);
    sp.lambda_min = sp.gamma(0);
    return sp;
}

}  // namespace edge_consensus
