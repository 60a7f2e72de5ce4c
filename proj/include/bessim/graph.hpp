#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bessim/errors.hpp"
#include "bessim/linalg.hpp"

namespace bessim {

/// Undirected communication graph over the battery units plus the per-unit
/// access flags marking which units see the fleet-level demand reference.
/// Immutable once built; safe to share across concurrent runs.
class Topology {
public:
    Topology() = default;

    std::size_t size() const { return n_; }
    bool valid() const { return n_ > 0; }

    bool adjacent(std::size_t i, std::size_t j) const { return adjacency_[i * n_ + j] != 0; }
    const std::vector<std::size_t>& neighbors(std::size_t i) const { return neighbors_[i]; }

    /// 1 when unit i has access to the total desired power, else 0.
    int access_flag(std::size_t i) const { return access_[i]; }
    bool pinned(std::size_t i) const { return access_[i] != 0; }

    std::size_t edge_count() const { return edge_count_; }

    /// Edges as 1-based unordered pairs (i < j), in row-major order.
    std::vector<std::pair<int, int>> edges() const {
        std::vector<std::pair<int, int>> out;
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i + 1; j < n_; ++j)
                if (adjacent(i, j)) out.emplace_back(int(i) + 1, int(j) + 1);
        return out;
    }

    std::vector<int> access_flags() const {
        return std::vector<int>(access_.begin(), access_.end());
    }

    bool operator==(const Topology&) const = default;

    friend Topology build_topology(std::size_t n,
                                   const std::vector<std::pair<int, int>>& edges,
                                   const std::vector<int>& access_flags);

private:
    std::size_t n_ = 0;
    std::vector<std::uint8_t> adjacency_;
    std::vector<std::uint8_t> access_;
    std::vector<std::vector<std::size_t>> neighbors_;
    std::size_t edge_count_ = 0;
};

/// Builds and validates a Topology. Edge endpoints are 1-based unit ids, as
/// scenario files write them. Rejects self-loops, disconnected graphs, and
/// all-zero access flags.
inline Topology build_topology(std::size_t n,
                               const std::vector<std::pair<int, int>>& edges,
                               const std::vector<int>& access_flags) {
    if (n == 0) throw Error("build_topology: unit count must be positive");
    if (access_flags.size() != n)
        throw Error("build_topology: expected " + std::to_string(n) + " access flags, got " +
                    std::to_string(access_flags.size()));

    Topology t;
    t.n_ = n;
    t.adjacency_.assign(n * n, 0);
    t.access_.resize(n);

    bool any_access = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (access_flags[i] != 0 && access_flags[i] != 1)
            throw Error("build_topology: access flag for unit " + std::to_string(i + 1) +
                        " must be 0 or 1");
        t.access_[i] = static_cast<std::uint8_t>(access_flags[i]);
        any_access = any_access || access_flags[i] == 1;
    }
    if (!any_access)
        throw NoAccessUnit("build_topology: no unit has access to the total desired power");

    for (const auto& [a, b] : edges) {
        if (a < 1 || b < 1 || std::size_t(a) > n || std::size_t(b) > n)
            throw Error("build_topology: edge (" + std::to_string(a) + "," + std::to_string(b) +
                        ") out of range 1.." + std::to_string(n));
        if (a == b)
            throw SelfLoop("build_topology: self-loop at unit " + std::to_string(a));
        t.adjacency_[std::size_t(a - 1) * n + std::size_t(b - 1)] = 1;
        t.adjacency_[std::size_t(b - 1) * n + std::size_t(a - 1)] = 1;
    }

    t.neighbors_.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (t.adjacency_[i * n + j]) t.neighbors_[i].push_back(j);
    for (std::size_t i = 0; i < n; ++i) t.edge_count_ += t.neighbors_[i].size();
    t.edge_count_ /= 2;

    // Connectivity by traversal from unit 1.
    std::vector<std::uint8_t> seen(n, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
        const std::size_t i = stack.back();
        stack.pop_back();
        for (std::size_t j : t.neighbors_[i]) {
            if (!seen[j]) {
                seen[j] = 1;
                ++reached;
                stack.push_back(j);
            }
        }
    }
    if (reached != n)
        throw DisconnectedGraph("build_topology: graph is disconnected (" +
                                std::to_string(reached) + " of " + std::to_string(n) +
                                " units reachable from unit 1)");
    return t;
}

/// Graph Laplacian L with l_ij = -a_ij (i != j) and l_ii = sum_k a_ik.
/// Entries are exact small integers; every row sums to zero exactly.
inline Matrix laplacian(const Topology& t) {
    const std::size_t n = t.size();
    Matrix l(n);
    for (std::size_t i = 0; i < n; ++i) {
        double degree = 0.0;
        for (std::size_t j : t.neighbors(i)) {
            l(i, j) = -1.0;
            degree += 1.0;
        }
        l(i, i) = degree;
    }
    return l;
}

/// H = L + diag(access flags); positive definite for a connected graph with
/// at least one pinned unit.
inline Matrix h_matrix(const Topology& t) {
    Matrix h = laplacian(t);
    for (std::size_t i = 0; i < t.size(); ++i) h(i, i) += t.access_flag(i);
    return h;
}

/// Second-smallest Laplacian eigenvalue; positive iff the graph is connected.
inline double fiedler_value(const Topology& t) {
    const Vector eig = symmetric_eigenvalues(laplacian(t));
    return eig.size() > 1 ? eig[1] : 0.0;
}

/// Spectral quantities the observer gain bounds and gain caps need.
struct SpectralSummary {
    double lambda2_L = 0.0;
    double lambda_max_L = 0.0;
    double lambda_min_H = 0.0;
    double lambda_max_H = 0.0;
};

inline SpectralSummary spectral_summary(const Topology& t) {
    SpectralSummary s;
    const Vector eig_l = symmetric_eigenvalues(laplacian(t));
    const Vector eig_h = symmetric_eigenvalues(h_matrix(t));
    s.lambda2_L = eig_l.size() > 1 ? eig_l[1] : 0.0;
    s.lambda_max_L = eig_l.back();
    s.lambda_min_H = eig_h.front();
    s.lambda_max_H = eig_h.back();
    return s;
}

} // namespace bessim
