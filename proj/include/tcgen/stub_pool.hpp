#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "error.hpp"
#include "random.hpp"

namespace tcgen {

/// Fenwick tree of non-negative counts.
class Fenwick {
public:
    Fenwick() = default;
    explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}

    std::size_t size() const { return tree_.empty() ? 0 : tree_.size() - 1; }

    void add(std::size_t i, long long delta) {
        total_ += delta;
        for (++i; i < tree_.size(); i += i & (~i + 1))
            tree_[i] += delta;
    }

    /// Sum of [0, i).
    long long prefix(std::size_t i) const {
        long long s = 0;
        for (; i > 0; i -= i & (~i + 1))
            s += tree_[i];
        return s;
    }

    long long total() const { return total_; }

    /// Smallest i with prefix(i + 1) > k. Requires 0 <= k < total().
    std::size_t select(long long k) const {
        std::size_t pos = 0;
        std::size_t step = 1;
        while (step * 2 < tree_.size())
            step *= 2;
        for (; step > 0; step /= 2) {
            if (pos + step < tree_.size() && tree_[pos + step] <= k) {
                pos += step;
                k -= tree_[pos];
            }
        }
        return pos;
    }

private:
    std::vector<long long> tree_;
    long long total_ = 0;
};

/// Open stubs of a wiring phase, indexed by owner. Owners are ranked by
/// ascending total degree (random order among ties), so position k in the
/// stub list is "the k-th open stub counted from the low-degree end".
/// Optionally excludes one group (community) from a draw without rejection.
class StubPool {
public:
    StubPool(std::span<const int> order_key, std::span<const int> group, std::span<const int> stubs, Rng& rng)
        : rank_of_(order_key.size()), node_at_(order_key.size()), weight_(order_key.size(), 0),
          all_(order_key.size()) {
        const std::size_t n = order_key.size();
        std::iota(node_at_.begin(), node_at_.end(), std::size_t{0});
        std::shuffle(node_at_.begin(), node_at_.end(), rng);
        std::stable_sort(node_at_.begin(), node_at_.end(),
                         [&](std::size_t a, std::size_t b) { return order_key[a] < order_key[b]; });
        for (std::size_t r = 0; r < n; ++r)
            rank_of_[node_at_[r]] = r;

        if (!group.empty()) {
            group_.assign(group.begin(), group.end());
            int groups = 0;
            for (int g : group_)
                groups = std::max(groups, g + 1);
            group_ranks_.resize(static_cast<std::size_t>(groups));
            for (std::size_t r = 0; r < n; ++r)
                group_ranks_[static_cast<std::size_t>(group_[node_at_[r]])].push_back(r);
            local_.resize(n);
            by_group_.reserve(group_ranks_.size());
            for (std::size_t g = 0; g < group_ranks_.size(); ++g) {
                by_group_.emplace_back(group_ranks_[g].size());
                for (std::size_t i = 0; i < group_ranks_[g].size(); ++i)
                    local_[node_at_[group_ranks_[g][i]]] = i;
            }
        }
        for (std::size_t v = 0; v < n; ++v)
            set(v, stubs[v]);
    }

    long long weight(std::size_t v) const { return weight_[v]; }

    void set(std::size_t v, long long w) {
        long long delta = w - weight_[v];
        if (delta == 0)
            return;
        weight_[v] = w;
        all_.add(rank_of_[v], delta);
        if (!group_.empty())
            by_group_[static_cast<std::size_t>(group_[v])].add(local_[v], delta);
    }

    /// Open stubs outside `excluded_group` (-1: no exclusion).
    long long available(int excluded_group = -1) const {
        if (excluded_group < 0 || group_.empty())
            return all_.total();
        return all_.total() - by_group_[static_cast<std::size_t>(excluded_group)].total();
    }

    /// Owner of the k-th open stub (0-based, in rank order) outside
    /// `excluded_group`.
    std::size_t select(long long k, int excluded_group = -1) const {
        if (k < 0 || k >= available(excluded_group))
            throw InvariantViolation("stub index out of range");
        if (excluded_group < 0 || group_.empty())
            return node_at_[all_.select(k)];
        const auto& ranks = group_ranks_[static_cast<std::size_t>(excluded_group)];
        const auto& fen = by_group_[static_cast<std::size_t>(excluded_group)];
        auto valid_prefix = [&](std::size_t p) {
            auto local = static_cast<std::size_t>(std::lower_bound(ranks.begin(), ranks.end(), p) - ranks.begin());
            return all_.prefix(p) - fen.prefix(local);
        };
        // smallest rank p with valid_prefix(p + 1) > k
        std::size_t lo = 0;
        std::size_t hi = node_at_.size() - 1;
        while (lo < hi) {
            std::size_t mid = lo + (hi - lo) / 2;
            if (valid_prefix(mid + 1) > k)
                hi = mid;
            else
                lo = mid + 1;
        }
        return node_at_[lo];
    }

    std::size_t rank_of(std::size_t v) const { return rank_of_[v]; }

private:
    std::vector<std::size_t> rank_of_;
    std::vector<std::size_t> node_at_;
    std::vector<long long> weight_;
    Fenwick all_;
    std::vector<int> group_;
    std::vector<std::vector<std::size_t>> group_ranks_;
    std::vector<std::size_t> local_;
    std::vector<Fenwick> by_group_;
};

} // namespace tcgen
