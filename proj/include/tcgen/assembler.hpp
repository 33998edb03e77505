#pragma once

// Snapshot assembly: degree tuples are assigned to nodes, nodes to
// communities, then intra links are wired one community at a time and inter
// links over the whole network.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "graph.hpp"
#include "graphability.hpp"
#include "random.hpp"
#include "sequences.hpp"
#include "wiring.hpp"

namespace tcgen {

/// Degree tuple (d, e) held by one node slot.
struct DegreePair {
    int total = 0;
    int intra = 0;

    friend bool operator==(const DegreePair&, const DegreePair&) = default;
};

/// Result of node assignment: community and degree tuple per node slot.
struct NodeAssignment {
    std::vector<int> community;
    std::vector<DegreePair> degrees;

    DegreeSpec degree_spec() const {
        DegreeSpec s;
        for (const auto& p : degrees) {
            s.total.push_back(p.total);
            s.intra.push_back(p.intra);
        }
        return s;
    }
};

/// Snapshot-independent description of surviving nodes at t > 0: every node
/// slot already has its community (from the flow solution); `previous_degree`
/// is the node's total degree at t (nullopt for newborn nodes).
struct Survivors {
    std::vector<int> community;
    std::vector<std::optional<int>> previous_degree;
};

namespace detail {

inline std::vector<DegreePair> pairs_of(const DegreeSpec& spec) {
    std::vector<DegreePair> p(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i)
        p[i] = {spec.total[i], spec.intra[i]};
    return p;
}

// Swap tuples between communities with odd intra sums. Prefers partners of
// equal total degree; returns false if some odd community has no partner.
inline bool repair_intra_parity(const CommunitySpec& sizes, NodeAssignment& a, Rng& rng) {
    const std::size_t k = sizes.count();
    std::vector<long long> sum(k, 0);
    for (std::size_t i = 0; i < a.community.size(); ++i)
        sum[static_cast<std::size_t>(a.community[i])] += a.degrees[i].intra;
    std::vector<std::size_t> odd;
    for (std::size_t c = 0; c < k; ++c)
        if (sum[c] % 2 != 0)
            odd.push_back(c);
    if (odd.empty())
        return true;
    if (odd.size() % 2 != 0)
        return false;
    std::shuffle(odd.begin(), odd.end(), rng);
    std::vector<std::vector<std::size_t>> members(k);
    for (std::size_t i = 0; i < a.community.size(); ++i)
        members[static_cast<std::size_t>(a.community[i])].push_back(i);

    for (std::size_t p = 0; p + 1 < odd.size(); p += 2) {
        const auto ca = odd[p];
        const auto cb = odd[p + 1];
        std::optional<std::pair<std::size_t, std::size_t>> any;
        std::optional<std::pair<std::size_t, std::size_t>> equal_total;
        for (auto i : members[ca]) {
            for (auto j : members[cb]) {
                const auto& di = a.degrees[i];
                const auto& dj = a.degrees[j];
                if ((di.intra - dj.intra) % 2 == 0)
                    continue;
                if (di.intra >= sizes.sizes[cb] || dj.intra >= sizes.sizes[ca])
                    continue;
                if (di.total == dj.total) {
                    equal_total = {i, j};
                    break;
                }
                if (!any)
                    any = {i, j};
            }
            if (equal_total)
                break;
        }
        auto chosen = equal_total ? equal_total : any;
        if (!chosen)
            return false;
        std::swap(a.degrees[chosen->first], a.degrees[chosen->second]);
    }
    return true;
}

// Random placement at the first timestep: slots in descending intra degree,
// each into a uniformly random free slot of a community larger than e.
inline std::optional<NodeAssignment> place_initial(const CommunitySpec& sizes, const DegreeSpec& spec, Rng& rng) {
    const std::size_t n = spec.size();
    std::vector<std::size_t> slots(n);
    std::iota(slots.begin(), slots.end(), std::size_t{0});
    std::shuffle(slots.begin(), slots.end(), rng);
    std::stable_sort(slots.begin(), slots.end(),
                     [&](std::size_t a, std::size_t b) { return spec.intra[a] > spec.intra[b]; });

    std::vector<std::size_t> by_size(sizes.count());
    std::iota(by_size.begin(), by_size.end(), std::size_t{0});
    std::stable_sort(by_size.begin(), by_size.end(),
                     [&](std::size_t a, std::size_t b) { return sizes.sizes[a] > sizes.sizes[b]; });
    std::vector<long long> free(sizes.sizes.begin(), sizes.sizes.end());

    NodeAssignment out;
    out.community.assign(n, -1);
    out.degrees = pairs_of(spec);
    // node i of the result keeps slot i's tuple; the shuffle only fixes the
    // processing order, which is what randomizes the membership
    for (auto s : slots) {
        long long avail = 0;
        std::size_t prefix = 0;
        while (prefix < by_size.size() && sizes.sizes[by_size[prefix]] > spec.intra[s])
            avail += free[by_size[prefix++]];
        if (avail == 0)
            return std::nullopt;
        auto r = static_cast<long long>(uniform_index(rng, static_cast<std::size_t>(avail)));
        for (std::size_t q = 0; q < prefix; ++q) {
            auto c = by_size[q];
            if (r < free[c]) {
                out.community[s] = static_cast<int>(c);
                --free[c];
                break;
            }
            r -= free[c];
        }
    }
    return out;
}

// Temporal assignment: communities are fixed; nodes pick tuples.
inline std::optional<NodeAssignment> place_temporal(const CommunitySpec& sizes, const DegreeSpec& spec,
                                                    const Survivors& surv, ShapeParams shape, Rng& rng) {
    const std::size_t n = spec.size();
    std::vector<DegreePair> tuples = pairs_of(spec);
    // tuple positions ordered by total degree ascending
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (tuples[a].total != tuples[b].total)
            return tuples[a].total < tuples[b].total;
        return tuples[a].intra < tuples[b].intra;
    });
    std::vector<DegreePair> sorted(n);
    for (std::size_t i = 0; i < n; ++i)
        sorted[i] = tuples[order[i]];

    // nodes: survivors by previous degree descending, newborns after, ties random
    std::vector<std::size_t> nodes(n);
    std::iota(nodes.begin(), nodes.end(), std::size_t{0});
    std::shuffle(nodes.begin(), nodes.end(), rng);
    std::stable_sort(nodes.begin(), nodes.end(), [&](std::size_t a, std::size_t b) {
        const auto& pa = surv.previous_degree[a];
        const auto& pb = surv.previous_degree[b];
        if (pa.has_value() != pb.has_value())
            return pa.has_value();
        return pa.has_value() && *pa > *pb;
    });

    // Hall slack on the nested capacity structure: for threshold x,
    // nodes_with_cap_ge[x] - tuples_with_e_ge[x] must stay >= 0.
    int max_e = 0;
    for (const auto& t : tuples)
        max_e = std::max(max_e, t.intra);
    const std::size_t X = static_cast<std::size_t>(max_e) + 2;
    std::vector<long long> cap_count(X, 0), e_count(X, 0);
    auto cap_of = [&](std::size_t v) {
        return std::min<long long>(sizes.sizes[static_cast<std::size_t>(surv.community[v])] - 1,
                                   static_cast<long long>(X) - 1);
    };
    for (std::size_t v = 0; v < n; ++v)
        ++cap_count[static_cast<std::size_t>(cap_of(v))];
    for (const auto& t : tuples)
        ++e_count[static_cast<std::size_t>(t.intra)];
    // suffix sums -> counts of "value >= x"
    for (std::size_t x = X - 1; x-- > 0;) {
        cap_count[x] += cap_count[x + 1];
        e_count[x] += e_count[x + 1];
    }
    for (std::size_t x = 0; x < X; ++x)
        if (cap_count[x] < e_count[x])
            return std::nullopt;

    Fenwick alive(n);
    for (std::size_t i = 0; i < n; ++i)
        alive.add(i, 1);
    std::vector<bool> taken(n, false);

    NodeAssignment out;
    out.community = surv.community;
    out.degrees.assign(n, {});
    std::vector<std::size_t> candidates;
    for (auto v : nodes) {
        const long long cap = cap_of(v);
        // e must be >= the largest x in [1, cap] with zero slack
        long long lo = 0;
        for (long long x = cap; x >= 1; --x)
            if (cap_count[static_cast<std::size_t>(x)] == e_count[static_cast<std::size_t>(x)]) {
                lo = x;
                break;
            }
        std::size_t pick = 0;
        if (lo == 0 && cap >= max_e) {
            auto k = static_cast<long long>(beta_index(rng, shape, static_cast<std::size_t>(alive.total())));
            pick = alive.select(k);
        } else {
            candidates.clear();
            for (std::size_t i = 0; i < n; ++i)
                if (!taken[i] && sorted[i].intra >= lo && sorted[i].intra <= cap)
                    candidates.push_back(i);
            if (candidates.empty())
                return std::nullopt;
            pick = candidates[beta_index(rng, shape, candidates.size())];
        }
        taken[pick] = true;
        alive.add(pick, -1);
        out.degrees[v] = sorted[pick];
        for (long long x = 0; x <= cap; ++x)
            --cap_count[static_cast<std::size_t>(x)];
        for (long long x = 0; x <= sorted[pick].intra; ++x)
            --e_count[static_cast<std::size_t>(x)];
    }
    return out;
}

} // namespace detail

struct AssignOptions {
    ShapeParams temporal_shape{};
    std::size_t retries = 20;
    GraphabilityOptions graphability{};
};

/// Assigns degree tuples and communities to node slots.
///
/// Without survivors (first timestep) nodes are placed uniformly at random,
/// never into a community of size <= e. With survivors the community of
/// every slot is given and each node draws its tuple from the
/// degree-ordered remaining sequence with a Beta-scaled index; nodes are
/// visited by descending previous degree, so alpha >> beta hands high
/// degrees back to previously high-degree nodes.
///
/// Communities left with an odd intra sum are fixed by swapping tuples of
/// differing intra parity between them. The result passes check_graphable
/// with its membership; otherwise the assignment is retried and finally a
/// GraphabilityError is thrown.
inline NodeAssignment assign_nodes(const CommunitySpec& sizes, const DegreeSpec& spec,
                                   const std::optional<Survivors>& survivors, const AssignOptions& opt, Rng& rng) {
    sizes.validate();
    spec.validate();
    opt.temporal_shape.validate();
    if (sizes.node_count() != static_cast<long long>(spec.size()))
        throw ValidationError("community sizes do not sum to the number of degree tuples");
    if (survivors) {
        if (survivors->community.size() != spec.size() || survivors->previous_degree.size() != spec.size())
            throw ValidationError("survivor description does not match the node count");
        std::vector<long long> count(sizes.count(), 0);
        for (int c : survivors->community) {
            if (c < 0 || static_cast<std::size_t>(c) >= sizes.count())
                throw ValidationError("survivor assigned to an unknown community");
            ++count[static_cast<std::size_t>(c)];
        }
        for (std::size_t c = 0; c < sizes.count(); ++c)
            if (count[c] != sizes.sizes[c])
                throw ValidationError("survivor membership does not match community sizes");
    }
    if (!assignment_feasible(sizes, spec.intra))
        throw GraphabilityError(GraphabilityReport::fail(GraphabilityCondition::assignment_infeasible).describe());

    GraphabilityReport last;
    for (std::size_t attempt = 0; attempt <= opt.retries; ++attempt) {
        auto placed = survivors ? detail::place_temporal(sizes, spec, *survivors, opt.temporal_shape, rng)
                                : detail::place_initial(sizes, spec, rng);
        if (!placed) {
            last = GraphabilityReport::fail(GraphabilityCondition::assignment_infeasible);
            continue;
        }
        if (!detail::repair_intra_parity(sizes, *placed, rng)) {
            last = GraphabilityReport::fail(GraphabilityCondition::intra_parity);
            continue;
        }
        auto report = check_graphable(sizes, placed->degree_spec(), std::span<const int>(placed->community),
                                      opt.graphability);
        if (report.ok)
            return std::move(*placed);
        last = report;
    }
    throw GraphabilityError(last.describe() + " after " + std::to_string(opt.retries + 1) + " assignment attempts");
}

struct WiringOptions {
    ShapeParams pairing_shape{};
    /// Repair steps allowed per wiring phase, as a multiple of its node count.
    std::size_t repair_budget_factor = 50;
};

/// Links inside one community. `members` are snapshot-local node indices.
inline std::vector<Link> wire_intra(std::span<const Node> nodes, std::span<const std::uint32_t> members,
                                    const WiringOptions& opt, Rng& rng, WiringStats* stats = nullptr) {
    std::vector<int> key, stubs, group(members.size(), 0);
    for (auto m : members) {
        key.push_back(nodes[m].degree);
        stubs.push_back(nodes[m].intra);
    }
    WiringState st(std::move(key), std::move(stubs), std::move(group), false);
    auto s = complete_wiring(st, opt.pairing_shape, opt.repair_budget_factor * std::max<std::size_t>(members.size(), 1),
                             rng);
    if (stats)
        stats->repairs += s.repairs;
    std::vector<Link> out;
    out.reserve(st.links().size());
    for (const auto& l : st.links())
        out.emplace_back(members[l.a], members[l.b]);
    return out;
}

/// Links between communities over the whole node set.
inline std::vector<Link> wire_inter(std::span<const Node> nodes, const WiringOptions& opt, Rng& rng,
                                    WiringStats* stats = nullptr) {
    std::vector<int> key, stubs, group;
    for (const auto& nd : nodes) {
        key.push_back(nd.degree);
        stubs.push_back(nd.inter());
        group.push_back(nd.community);
    }
    WiringState st(std::move(key), std::move(stubs), std::move(group), true);
    auto s = complete_wiring(st, opt.pairing_shape, opt.repair_budget_factor * std::max<std::size_t>(nodes.size(), 1),
                             rng);
    if (stats)
        stats->repairs += s.repairs;
    return st.links();
}

/// Number of connected components of the subgraph induced by `members`
/// (equal to the multiplicity of the Laplacian's zero eigenvalue).
inline std::size_t check_connectivity(std::span<const std::uint32_t> members, std::span<const Link> links) {
    std::vector<std::size_t> local_of;
    std::uint32_t max_id = 0;
    for (auto m : members)
        max_id = std::max(max_id, m);
    local_of.assign(members.empty() ? 0 : max_id + 1, static_cast<std::size_t>(-1));
    for (std::size_t i = 0; i < members.size(); ++i)
        local_of[members[i]] = i;
    DisjointSets ds(members.size());
    for (const auto& l : links) {
        if (l.a >= local_of.size() || l.b >= local_of.size())
            continue;
        auto a = local_of[l.a];
        auto b = local_of[l.b];
        if (a == static_cast<std::size_t>(-1) || b == static_cast<std::size_t>(-1))
            continue;
        ds.unite(a, b);
    }
    return ds.components();
}

/// Expected number of links between every pair under the plain
/// configuration model, p_ij = k_i k_j / (S - 1). Self pairs are set to 0.
inline std::vector<std::vector<double>> degree_joint_distribution_baseline(std::span<const int> degrees) {
    const double S = std::accumulate(degrees.begin(), degrees.end(), 0.0);
    std::vector<std::vector<double>> p(degrees.size(), std::vector<double>(degrees.size(), 0.0));
    if (S <= 1.0)
        return p;
    for (std::size_t i = 0; i < degrees.size(); ++i)
        for (std::size_t j = 0; j < degrees.size(); ++j)
            if (i != j)
                p[i][j] = static_cast<double>(degrees[i]) * degrees[j] / (S - 1.0);
    return p;
}

struct AssemblyStats {
    std::size_t repairs = 0;
    /// Communities whose intra subgraph has more than one component.
    std::vector<std::size_t> disconnected_communities;
};

/// Wires a snapshot whose nodes already carry (d, e, community).
/// Postcondition (checked): degree exactness, simplicity, partition.
inline Snapshot build_snapshot(int t, std::vector<Node> nodes, std::vector<long long> labels,
                               const WiringOptions& opt, Rng& rng, AssemblyStats* stats = nullptr) {
    Snapshot s;
    s.t = t;
    s.nodes = std::move(nodes);
    s.community_labels = std::move(labels);
    WiringStats ws;
    auto members = s.members();
    for (const auto& m : members) {
        auto links = wire_intra(s.nodes, m, opt, rng, &ws);
        s.links.insert(s.links.end(), links.begin(), links.end());
    }
    std::vector<Link> intra_links = s.links;
    auto inter = wire_inter(s.nodes, opt, rng, &ws);
    s.links.insert(s.links.end(), inter.begin(), inter.end());
    std::sort(s.links.begin(), s.links.end());
    verify_snapshot(s);
    if (stats) {
        stats->repairs += ws.repairs;
        for (std::size_t c = 0; c < members.size(); ++c)
            if (members[c].size() > 1 && check_connectivity(members[c], intra_links) > 1)
                stats->disconnected_communities.push_back(c);
    }
    return s;
}

} // namespace tcgen
