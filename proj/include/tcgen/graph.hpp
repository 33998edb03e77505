#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace tcgen {

/// Stable node identity across timesteps. Never recycled.
using NodeId = std::uint64_t;

struct Node {
    NodeId id = 0;
    int degree = 0;    // d
    int intra = 0;     // e
    int community = 0; // local community index within its snapshot
    int born_at = 0;

    int inter() const { return degree - intra; }
};

/// Undirected link between two local node indices, stored with a < b.
struct Link {
    std::uint32_t a = 0;
    std::uint32_t b = 0;

    Link() = default;
    Link(std::uint32_t u, std::uint32_t v) : a(std::min(u, v)), b(std::max(u, v)) {}

    friend bool operator==(const Link&, const Link&) = default;
    friend auto operator<=>(const Link&, const Link&) = default;
};

/// One realized timestep: nodes, links and the ground-truth clustering
/// (every node's `community`). `community_labels[c]` is the label community
/// c carries across timesteps.
struct Snapshot {
    int t = 0;
    std::vector<Node> nodes;
    std::vector<Link> links;
    std::vector<long long> community_labels;

    std::size_t community_count() const { return community_labels.size(); }

    std::vector<std::vector<std::uint32_t>> members() const {
        std::vector<std::vector<std::uint32_t>> m(community_count());
        for (std::uint32_t i = 0; i < nodes.size(); ++i)
            m.at(static_cast<std::size_t>(nodes[i].community)).push_back(i);
        return m;
    }

    std::vector<int> sizes() const {
        std::vector<int> s(community_count(), 0);
        for (const auto& n : nodes)
            ++s.at(static_cast<std::size_t>(n.community));
        return s;
    }

    std::vector<int> realized_degrees() const {
        std::vector<int> d(nodes.size(), 0);
        for (const auto& l : links) {
            ++d[l.a];
            ++d[l.b];
        }
        return d;
    }
};

/// Throws InvariantViolation unless the snapshot is a simple graph whose
/// realized total and intra degrees equal the assigned ones and whose
/// clustering is a partition of the node set.
inline void verify_snapshot(const Snapshot& s) {
    const std::size_t n = s.nodes.size();
    std::vector<int> deg(n, 0);
    std::vector<int> intra(n, 0);
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    for (const auto& l : s.links) {
        if (l.a >= n || l.b >= n)
            throw InvariantViolation("link refers to a missing node");
        if (l.a == l.b)
            throw InvariantViolation("self-loop on node " + std::to_string(s.nodes[l.a].id));
        if (!seen.emplace(l.a, l.b).second)
            throw InvariantViolation("duplicate link " + std::to_string(s.nodes[l.a].id) + "-" +
                                     std::to_string(s.nodes[l.b].id));
        ++deg[l.a];
        ++deg[l.b];
        if (s.nodes[l.a].community == s.nodes[l.b].community) {
            ++intra[l.a];
            ++intra[l.b];
        }
    }
    std::set<NodeId> ids;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& nd = s.nodes[i];
        if (nd.community < 0 || static_cast<std::size_t>(nd.community) >= s.community_count())
            throw InvariantViolation("node outside the clustering");
        if (!ids.insert(nd.id).second)
            throw InvariantViolation("duplicate node id " + std::to_string(nd.id));
        if (deg[i] != nd.degree || intra[i] != nd.intra)
            throw InvariantViolation("node " + std::to_string(nd.id) + " realized (" + std::to_string(deg[i]) +
                                     "," + std::to_string(intra[i]) + ") instead of (" +
                                     std::to_string(nd.degree) + "," + std::to_string(nd.intra) + ")");
    }
}

/// Union-find over 0..n-1.
class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0), components_(n) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b)
            return;
        if (rank_[a] < rank_[b])
            std::swap(a, b);
        parent_[b] = a;
        if (rank_[a] == rank_[b])
            ++rank_[a];
        --components_;
    }

    std::size_t components() const { return components_; }

private:
    std::vector<std::size_t> parent_;
    std::vector<unsigned char> rank_;
    std::size_t components_;
};

} // namespace tcgen
