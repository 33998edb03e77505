#pragma once

// Realizability of (community sizes, intra degrees, inter degrees) as a
// simple clustered graph.
//
// Intra links only join members of the same community and inter links only
// join members of different communities, so the two parts are independent:
//   - every community's intra sequence must be graphic (Erdos-Gallai);
//   - the inter sequence must be realizable inside the complete multipartite
//     graph whose parts are the communities. The per-community aggregate
//     condition (even sum, max <= sum - max) is necessary. The exact test
//     first tries a greedy construction and otherwise, up to a size limit,
//     reduces the inter part to a perfect matching problem (Tutte's f-factor
//     gadget).

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/max_cardinality_matching.hpp>

#include "error.hpp"
#include "sequences.hpp"

namespace tcgen {

/// Erdos-Gallai test. Accepts any order; sorts a copy internally.
inline bool erdos_gallai(std::vector<int> degrees) {
    const auto n = static_cast<long long>(degrees.size());
    long long sum = 0;
    for (int d : degrees) {
        if (d < 0 || d > n - 1)
            return false;
        sum += d;
    }
    if (sum % 2 != 0)
        return false;
    std::sort(degrees.begin(), degrees.end(), std::greater<>());
    std::vector<long long> suffix(degrees.size() + 1, 0);
    for (long long i = n - 1; i >= 0; --i)
        suffix[i] = suffix[i + 1] + degrees[i];
    long long lhs = 0;
    for (long long k = 1; k <= n; ++k) {
        lhs += degrees[k - 1];
        // entries after position k that are >= k contribute k, the rest themselves
        auto first_small = std::partition_point(degrees.begin() + k, degrees.end(),
                                                [k](int d) { return d >= k; }) -
                           degrees.begin();
        long long rhs = k * (k - 1) + k * (first_small - k) + suffix[first_small];
        if (lhs > rhs)
            return false;
    }
    return true;
}

/// Aggregate condition on per-community inter degrees: even sum and
/// max <= sum - max.
inline bool inter_graphable(std::span<const long long> aggregates) {
    long long sum = 0;
    long long mx = 0;
    for (auto f : aggregates) {
        if (f < 0)
            return false;
        sum += f;
        mx = std::max(mx, f);
    }
    return sum % 2 == 0 && mx <= sum - mx;
}

inline bool inter_graphable(const std::vector<long long>& aggregates) {
    return inter_graphable(std::span<const long long>(aggregates));
}

/// Can every node be placed into a community slot of size > e_i?
/// Largest intra degrees first; any community admissible for a node is also
/// admissible for every later (smaller) node, so the greedy is exact.
inline bool assignment_feasible(const CommunitySpec& sizes, std::span<const int> intra) {
    std::vector<int> e(intra.begin(), intra.end());
    std::vector<int> s = sizes.sizes;
    std::sort(e.begin(), e.end(), std::greater<>());
    std::sort(s.begin(), s.end(), std::greater<>());
    long long slots = 0;
    std::size_t next = 0;
    long long used = 0;
    for (int ei : e) {
        while (next < s.size() && s[next] > ei)
            slots += s[next++];
        if (++used > slots)
            return false;
    }
    return true;
}

enum class GraphabilityCondition {
    intra_parity,
    intra_erdos_gallai,
    inter_parity,
    inter_max,
    inter_realization,
    assignment_infeasible,
};

inline const char* to_string(GraphabilityCondition c) {
    switch (c) {
    case GraphabilityCondition::intra_parity: return "intra_parity";
    case GraphabilityCondition::intra_erdos_gallai: return "intra_erdos_gallai";
    case GraphabilityCondition::inter_parity: return "inter_parity";
    case GraphabilityCondition::inter_max: return "inter_max";
    case GraphabilityCondition::inter_realization: return "inter_realization";
    case GraphabilityCondition::assignment_infeasible: return "assignment_infeasible";
    }
    return "?";
}

struct GraphabilityReport {
    bool ok = true;
    std::optional<std::size_t> failing_community;
    std::optional<GraphabilityCondition> failing_condition;
    /// False when the inter part was only checked with the aggregate
    /// condition because the instance exceeded the exact-check limit.
    bool inter_exact = true;

    static GraphabilityReport fail(GraphabilityCondition c, std::optional<std::size_t> community = {}) {
        GraphabilityReport r;
        r.ok = false;
        r.failing_condition = c;
        r.failing_community = community;
        return r;
    }

    std::string describe() const {
        if (ok)
            return "graphable";
        std::string s = std::string("not graphable: ") + to_string(*failing_condition);
        if (failing_community)
            s += " (community " + std::to_string(*failing_community) + ")";
        return s;
    }
};

struct GraphabilityOptions {
    /// Upper bound on gadget vertices for the exact inter check.
    std::size_t exact_vertex_limit = 20000;
    std::size_t exact_edge_limit = 1000000;
};

namespace detail {

// Havel-Hakimi style construction in the complete multipartite graph: the
// largest remaining demand of the community with the largest remaining
// aggregate demand is joined to the largest remaining demands outside that
// community. Success is a realization; failure proves nothing.
inline bool inter_greedy_realizes(std::span<const int> community_of, std::span<const int> inter) {
    const std::size_t n = inter.size();
    int top = 0;
    std::size_t k = 0;
    for (std::size_t v = 0; v < n; ++v) {
        top = std::max(top, inter[v]);
        k = std::max(k, static_cast<std::size_t>(community_of[v]) + 1);
    }
    std::vector<std::vector<std::size_t>> bucket(static_cast<std::size_t>(top) + 1);
    std::vector<std::vector<std::size_t>> members(k);
    std::vector<long long> agg(k, 0);
    std::vector<std::size_t> pos(n);
    std::vector<int> r(inter.begin(), inter.end());
    for (std::size_t v = 0; v < n; ++v)
        if (r[v] > 0) {
            pos[v] = bucket[static_cast<std::size_t>(r[v])].size();
            bucket[static_cast<std::size_t>(r[v])].push_back(v);
            members[static_cast<std::size_t>(community_of[v])].push_back(v);
            agg[static_cast<std::size_t>(community_of[v])] += r[v];
        }
    auto detach = [&](std::size_t v) {
        auto& b = bucket[static_cast<std::size_t>(r[v])];
        auto last = b.back();
        b[pos[v]] = last;
        pos[last] = pos[v];
        b.pop_back();
    };
    std::vector<std::size_t> targets;
    while (true) {
        const auto c = static_cast<std::size_t>(std::max_element(agg.begin(), agg.end()) - agg.begin());
        if (agg[c] == 0)
            return true;
        auto& mem = members[c];
        std::size_t best = 0;
        for (std::size_t i = 1; i < mem.size(); ++i)
            if (r[mem[i]] > r[mem[best]])
                best = i;
        const std::size_t v = mem[best];
        mem[best] = mem.back();
        mem.pop_back();
        detach(v);
        const int need = r[v];
        r[v] = 0;
        agg[c] -= need;
        targets.clear();
        for (auto h = static_cast<std::size_t>(top); h > 0 && static_cast<int>(targets.size()) < need; --h)
            for (auto w : bucket[h]) {
                if (static_cast<std::size_t>(community_of[w]) == c)
                    continue;
                targets.push_back(w);
                if (static_cast<int>(targets.size()) == need)
                    break;
            }
        if (static_cast<int>(targets.size()) < need)
            return false;
        for (auto w : targets) {
            detach(w);
            --agg[static_cast<std::size_t>(community_of[w])];
            if (--r[w] > 0) {
                pos[w] = bucket[static_cast<std::size_t>(r[w])].size();
                bucket[static_cast<std::size_t>(r[w])].push_back(w);
            } else {
                auto& m = members[static_cast<std::size_t>(community_of[w])];
                m.erase(std::find(m.begin(), m.end(), w));
            }
        }
    }
}

} // namespace detail

/// Exact test: is `inter` realizable as a simple graph that only uses pairs
/// of nodes in different communities? A greedy construction is tried first;
/// if it fails, the matching gadget decides. Returns nullopt when the gadget
/// would exceed the limits.
inline std::optional<bool> inter_realizable(std::span<const int> community_of, std::span<const int> inter,
                                            const GraphabilityOptions& opt = {}) {
    const std::size_t n = inter.size();
    std::vector<std::size_t> active;
    for (std::size_t v = 0; v < n; ++v)
        if (inter[v] > 0)
            active.push_back(v);
    long long sum = 0;
    for (auto v : active)
        sum += inter[v];
    if (sum % 2 != 0)
        return false;
    if (active.empty())
        return true;

    // active nodes per community; partners of v = active outside its community
    std::vector<long long> per_comm;
    for (auto v : active) {
        auto c = static_cast<std::size_t>(community_of[v]);
        if (c >= per_comm.size())
            per_comm.resize(c + 1, 0);
        ++per_comm[c];
    }
    const auto total_active = static_cast<long long>(active.size());
    for (auto v : active)
        if (inter[v] > total_active - per_comm[static_cast<std::size_t>(community_of[v])])
            return false;

    if (detail::inter_greedy_realizes(community_of, inter))
        return true;

    long long same = 0;
    for (auto a : per_comm)
        same += a * a;
    const auto pairs = static_cast<std::size_t>((total_active * total_active - same) / 2);
    // every pair contributes its two gadget vertices and 1 + f_u + f_v edges
    std::size_t gadget_edges = pairs;
    for (auto v : active)
        gadget_edges += static_cast<std::size_t>(inter[v]) *
                        static_cast<std::size_t>(total_active - per_comm[static_cast<std::size_t>(community_of[v])]);
    const std::size_t vertices = static_cast<std::size_t>(sum) + 2 * pairs;
    if (vertices > opt.exact_vertex_limit || gadget_edges > opt.exact_edge_limit)
        return std::nullopt;

    using Graph = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS>;
    Graph g(vertices);
    std::vector<std::size_t> first_copy(n, 0);
    std::size_t next = 0;
    for (auto v : active) {
        first_copy[v] = next;
        next += static_cast<std::size_t>(inter[v]);
    }
    for (std::size_t a = 0; a < active.size(); ++a) {
        for (std::size_t b = a + 1; b < active.size(); ++b) {
            auto u = active[a];
            auto v = active[b];
            if (community_of[u] == community_of[v])
                continue;
            auto near_u = next++;
            auto near_v = next++;
            boost::add_edge(near_u, near_v, g);
            for (int c = 0; c < inter[u]; ++c)
                boost::add_edge(first_copy[u] + c, near_u, g);
            for (int c = 0; c < inter[v]; ++c)
                boost::add_edge(first_copy[v] + c, near_v, g);
        }
    }
    std::vector<boost::graph_traits<Graph>::vertex_descriptor> mate(vertices);
    boost::edmonds_maximum_cardinality_matching(g, &mate[0]);
    return 2 * boost::matching_size(g, &mate[0]) == vertices;
}

/// Full check. Without a membership only the pre-assignment conditions can
/// be evaluated: global parities and whether every node fits a community
/// larger than its intra degree. With a membership (community index per node
/// slot) every community's intra sequence and the inter part are checked.
inline GraphabilityReport check_graphable(const CommunitySpec& sizes, const DegreeSpec& spec,
                                          std::optional<std::span<const int>> membership = std::nullopt,
                                          const GraphabilityOptions& opt = {}) {
    sizes.validate();
    spec.validate_shape();
    if (sizes.node_count() != static_cast<long long>(spec.size()))
        throw ValidationError("community sizes sum to " + std::to_string(sizes.node_count()) + " but there are " +
                              std::to_string(spec.size()) + " degree entries");

    if (!membership) {
        if (spec.intra_sum() % 2 != 0)
            return GraphabilityReport::fail(GraphabilityCondition::intra_parity);
        if (spec.inter_sum() % 2 != 0)
            return GraphabilityReport::fail(GraphabilityCondition::inter_parity);
        if (!assignment_feasible(sizes, spec.intra))
            return GraphabilityReport::fail(GraphabilityCondition::assignment_infeasible);
        return {};
    }

    const auto& member = *membership;
    if (member.size() != spec.size())
        throw ValidationError("membership length differs from the degree sequence length");
    const std::size_t k = sizes.count();
    std::vector<std::vector<int>> intra_by(k);
    std::vector<long long> inter_by(k, 0);
    for (std::size_t i = 0; i < member.size(); ++i) {
        if (member[i] < 0 || static_cast<std::size_t>(member[i]) >= k)
            throw ValidationError("membership refers to an unknown community");
        intra_by[member[i]].push_back(spec.intra[i]);
        inter_by[member[i]] += spec.inter(i);
    }
    for (std::size_t c = 0; c < k; ++c)
        if (intra_by[c].size() != static_cast<std::size_t>(sizes.sizes[c]))
            throw ValidationError("membership does not match the size of community " + std::to_string(c));

    for (std::size_t c = 0; c < k; ++c) {
        const auto& e = intra_by[c];
        if (std::accumulate(e.begin(), e.end(), 0LL) % 2 != 0)
            return GraphabilityReport::fail(GraphabilityCondition::intra_parity, c);
        for (int ei : e)
            if (ei >= sizes.sizes[c])
                return GraphabilityReport::fail(GraphabilityCondition::assignment_infeasible, c);
        if (!erdos_gallai(e))
            return GraphabilityReport::fail(GraphabilityCondition::intra_erdos_gallai, c);
    }
    long long fsum = std::accumulate(inter_by.begin(), inter_by.end(), 0LL);
    if (fsum % 2 != 0)
        return GraphabilityReport::fail(GraphabilityCondition::inter_parity);
    if (!inter_graphable(inter_by)) {
        auto worst = static_cast<std::size_t>(std::max_element(inter_by.begin(), inter_by.end()) - inter_by.begin());
        return GraphabilityReport::fail(GraphabilityCondition::inter_max, worst);
    }
    auto inter = spec.inter_sequence();
    auto exact = inter_realizable(member, inter, opt);
    if (!exact) {
        GraphabilityReport r;
        r.inter_exact = false;
        return r;
    }
    if (!*exact)
        return GraphabilityReport::fail(GraphabilityCondition::inter_realization);
    return {};
}

} // namespace tcgen
