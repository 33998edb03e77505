#pragma once

// Modified configuration model.
//
// Linking nodes are processed by descending total degree (random order for
// uniform draws) and exhaust all of their stubs before the next node starts. Each partner is the owner of the
// k-th admissible open stub, where k is a Beta(alpha, beta) draw scaled to
// the number of admissible open stubs ordered by owner degree. Admissible
// means: not the linking node, not already a neighbour and, for inter
// wiring, not in the linking node's community. With alpha = beta = 1 this
// is uniform stub pairing without self-loops and multi-edges.
//
// When a node still has stubs but no admissible open partner, existing links
// of the phase are broken and rewired (repair_rewire).

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "graph.hpp"
#include "random.hpp"
#include "stub_pool.hpp"

namespace tcgen {

/// Mutable state of one wiring phase over local nodes 0..n-1.
class WiringState {
public:
    /// `order_key`: total degree used for ordering; `stubs`: degree to realize
    /// in this phase; `group`: community per node; `forbid_same_group`: inter
    /// phase when true.
    WiringState(std::vector<int> order_key, std::vector<int> stubs, std::vector<int> group, bool forbid_same_group)
        : key_(std::move(order_key)), target_(stubs), remaining_(std::move(stubs)), group_(std::move(group)),
          forbid_same_group_(forbid_same_group), adj_(key_.size()) {
        if (target_.size() != key_.size() || group_.size() != key_.size())
            throw InvariantViolation("wiring inputs differ in length");
        for (int s : target_)
            if (s < 0)
                throw InvariantViolation("negative stub count");
    }

    std::size_t size() const { return key_.size(); }
    int remaining(std::size_t v) const { return remaining_[v]; }
    int target(std::size_t v) const { return target_[v]; }
    int key(std::size_t v) const { return key_[v]; }
    int group(std::size_t v) const { return group_[v]; }
    bool forbid_same_group() const { return forbid_same_group_; }
    const std::vector<Link>& links() const { return links_; }
    const std::vector<std::uint32_t>& neighbours(std::size_t v) const { return adj_[v]; }

    bool adjacent(std::size_t u, std::size_t v) const {
        const auto& a = adj_[u].size() <= adj_[v].size() ? adj_[u] : adj_[v];
        auto other = static_cast<std::uint32_t>(adj_[u].size() <= adj_[v].size() ? v : u);
        return std::find(a.begin(), a.end(), other) != a.end();
    }

    /// Could u and v be linked in this phase (ignoring open stubs)?
    bool admissible(std::size_t u, std::size_t v) const {
        if (u == v)
            return false;
        if (forbid_same_group_ && group_[u] == group_[v])
            return false;
        return !adjacent(u, v);
    }

    void link(std::size_t u, std::size_t v) {
        if (!admissible(u, v))
            throw InvariantViolation("attempt to create an inadmissible link");
        adj_[u].push_back(static_cast<std::uint32_t>(v));
        adj_[v].push_back(static_cast<std::uint32_t>(u));
        links_.emplace_back(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v));
        --remaining_[u];
        --remaining_[v];
    }

    void unlink(std::size_t u, std::size_t v) {
        auto drop = [](std::vector<std::uint32_t>& a, std::size_t x) {
            auto it = std::find(a.begin(), a.end(), static_cast<std::uint32_t>(x));
            if (it == a.end())
                throw InvariantViolation("attempt to remove a missing link");
            *it = a.back();
            a.pop_back();
        };
        drop(adj_[u], v);
        drop(adj_[v], u);
        Link l(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v));
        auto it = std::find(links_.begin(), links_.end(), l);
        *it = links_.back();
        links_.pop_back();
        ++remaining_[u];
        ++remaining_[v];
    }

    std::vector<std::size_t> open_nodes() const {
        std::vector<std::size_t> open;
        for (std::size_t v = 0; v < size(); ++v)
            if (remaining_[v] > 0)
                open.push_back(v);
        return open;
    }

    long long open_stubs() const { return std::accumulate(remaining_.begin(), remaining_.end(), 0LL); }

private:
    std::vector<int> key_;
    std::vector<int> target_;
    std::vector<int> remaining_;
    std::vector<int> group_;
    bool forbid_same_group_;
    std::vector<std::vector<std::uint32_t>> adj_;
    std::vector<Link> links_;
};

/// One repair step for a node `u` that has open stubs but no admissible
/// open partner. Breaks one existing link (w, x) with w admissible for u
/// and rewires:
///   - u keeps >= 2 stubs and x is admissible too: (u,w) and (u,x);
///   - another open node y admits x: (u,w) and (y,x);
///   - otherwise (u,w) only, leaving x with one open stub.
/// Returns the nodes whose open-stub count changed. Throws WiringError when
/// no admissible partner with a breakable link exists.
inline std::vector<std::size_t> repair_rewire(WiringState& st, std::size_t u, Rng& rng) {
    const auto& links = st.links();
    const std::size_t m = links.size();
    std::vector<std::size_t> others;
    for (auto y : st.open_nodes())
        if (y != u)
            others.push_back(y);
    std::shuffle(others.begin(), others.end(), rng);
    if (others.size() > 8)
        others.resize(8);

    if (m > 0) {
        const std::size_t start = uniform_index(rng, m);
        for (std::size_t step = 0; step < m; ++step) {
            const Link l = links[(start + step) % m];
            for (int orient = 0; orient < 2; ++orient) {
                std::size_t w = orient ? l.b : l.a;
                std::size_t x = orient ? l.a : l.b;
                if (!st.admissible(u, w))
                    continue;
                if (st.remaining(u) >= 2 && st.admissible(u, x)) {
                    st.unlink(w, x);
                    st.link(u, w);
                    st.link(u, x);
                    return {u, w, x};
                }
                for (auto y : others) {
                    if (y == w || !st.admissible(y, x))
                        continue;
                    st.unlink(w, x);
                    st.link(u, w);
                    st.link(y, x);
                    return {u, w, x, y};
                }
            }
        }
    }

    // random walk move: steal a partner, reopen its other end
    std::vector<std::size_t> candidates;
    for (std::size_t w = 0; w < st.size(); ++w)
        if (st.admissible(u, w) && !st.neighbours(w).empty())
            candidates.push_back(w);
    if (candidates.empty())
        throw WiringError("node cannot be matched: no admissible partner holds a breakable link");
    auto w = candidates[uniform_index(rng, candidates.size())];
    const auto& nb = st.neighbours(w);
    std::size_t x = nb[uniform_index(rng, nb.size())];
    st.unlink(w, x);
    st.link(u, w);
    return {u, w, x};
}

struct WiringStats {
    std::size_t repairs = 0;
};

/// Runs the modified configuration model on `st` until every stub is
/// matched. `repair_budget` bounds the number of repair steps.
inline WiringStats complete_wiring(WiringState& st, ShapeParams shape, std::size_t repair_budget, Rng& rng) {
    const std::size_t n = st.size();
    WiringStats stats;
    if (n == 0)
        return stats;
    if (st.open_stubs() % 2 != 0)
        throw WiringError("odd number of stubs in a wiring phase");

    std::vector<int> key(n), group(n), stubs(n);
    for (std::size_t v = 0; v < n; ++v) {
        key[v] = st.key(v);
        group[v] = st.group(v);
        stubs[v] = st.remaining(v);
    }
    StubPool pool(key, st.forbid_same_group() ? std::span<const int>(group) : std::span<const int>{}, stubs, rng);

    // Linking order: descending total degree (ties random) when the draw is
    // biased, so hubs choose first from the end of the list they favour.
    // Uniform draws use a random order: pairing is then order-free apart from
    // the simple-graph exclusions, and a random order biases those least.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    if (!shape.uniform())
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return st.key(a) > st.key(b); });

    std::vector<std::size_t> excluded;
    auto exclude = [&](std::size_t u) {
        excluded.clear();
        excluded.push_back(u);
        for (auto x : st.neighbours(u))
            excluded.push_back(x);
        for (auto x : excluded)
            pool.set(x, 0);
    };
    auto restore = [&] {
        for (auto x : excluded)
            pool.set(x, st.remaining(x));
        excluded.clear();
    };

    auto process = [&](std::size_t u) {
        if (st.remaining(u) == 0)
            return;
        const int g = st.forbid_same_group() ? st.group(u) : -1;
        exclude(u);
        while (st.remaining(u) > 0) {
            const long long open = pool.available(g);
            if (open == 0) {
                restore();
                if (stats.repairs >= repair_budget)
                    throw WiringError("repair budget of " + std::to_string(repair_budget) + " exhausted with " +
                                      std::to_string(st.open_stubs()) + " open stubs");
                ++stats.repairs;
                for (auto t : repair_rewire(st, u, rng))
                    pool.set(t, st.remaining(t));
                exclude(u);
                continue;
            }
            auto k = static_cast<long long>(beta_index(rng, shape, static_cast<std::size_t>(open)));
            auto v = pool.select(k, g);
            st.link(u, v);
            excluded.push_back(v);
            pool.set(v, 0);
        }
        restore();
    };

    for (auto u : order)
        process(u);
    // repairs may reopen stubs on nodes processed earlier
    while (st.open_stubs() > 0) {
        auto open = st.open_nodes();
        std::stable_sort(open.begin(), open.end(), [&](std::size_t a, std::size_t b) { return st.key(a) > st.key(b); });
        for (auto u : open)
            process(u);
    }
    return stats;
}

} // namespace tcgen
