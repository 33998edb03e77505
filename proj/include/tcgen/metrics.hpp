#pragma once

// Snapshot metrics: degree assortativity, ground-truth modularity and the
// temporal degree correlation between consecutive snapshots.

#include <cmath>
#include <cstddef>
#include <unordered_map>
#include <vector>

#include "graph.hpp"

namespace tcgen {

/// A metric that can be undefined (zero variance, too few samples). An
/// undefined metric is reported as 0 with `flagged` set.
struct Metric {
    double value = 0.0;
    bool flagged = false;
};

namespace detail {

inline Metric pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2)
        return {0.0, true};
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 1e-12 * static_cast<double>(n) || syy <= 1e-12 * static_cast<double>(n))
        return {0.0, true};
    return {sxy / std::sqrt(sxx * syy), false};
}

} // namespace detail

/// Newman's degree assortativity: Pearson correlation of the degrees at the
/// two ends of a link, over both orientations of every link.
inline Metric assortativity_coefficient(const Snapshot& s) {
    if (s.links.empty())
        return {0.0, true};
    const auto d = s.realized_degrees();
    // closed form of the symmetrized Pearson coefficient
    double m = static_cast<double>(s.links.size());
    double prod = 0, sum = 0, sq = 0;
    for (const auto& l : s.links) {
        const double a = d[l.a];
        const double b = d[l.b];
        prod += a * b;
        sum += 0.5 * (a + b);
        sq += 0.5 * (a * a + b * b);
    }
    prod /= m;
    sum /= m;
    sq /= m;
    const double var = sq - sum * sum;
    if (var <= 1e-12 * sq)
        return {0.0, true};
    return {(prod - sum * sum) / var, false};
}

/// Newman-Girvan modularity (resolution 1) of the ground-truth clustering.
inline double modularity(const Snapshot& s) {
    if (s.links.empty())
        return 0.0;
    const double m = static_cast<double>(s.links.size());
    std::vector<double> inside(s.community_count(), 0.0);
    std::vector<double> degree_sum(s.community_count(), 0.0);
    for (const auto& l : s.links) {
        const auto ca = static_cast<std::size_t>(s.nodes[l.a].community);
        const auto cb = static_cast<std::size_t>(s.nodes[l.b].community);
        degree_sum[ca] += 1;
        degree_sum[cb] += 1;
        if (ca == cb)
            inside[ca] += 1;
    }
    double q = 0;
    for (std::size_t c = 0; c < inside.size(); ++c)
        q += inside[c] / m - (degree_sum[c] / (2 * m)) * (degree_sum[c] / (2 * m));
    return q;
}

/// Pearson correlation between the realized degrees of the nodes present in
/// both snapshots, matched by id.
inline Metric temporal_degree_correlation(const Snapshot& a, const Snapshot& b) {
    const auto da = a.realized_degrees();
    const auto db = b.realized_degrees();
    std::unordered_map<NodeId, std::size_t> where;
    where.reserve(b.nodes.size());
    for (std::size_t i = 0; i < b.nodes.size(); ++i)
        where.emplace(b.nodes[i].id, i);
    std::vector<double> x, y;
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        auto it = where.find(a.nodes[i].id);
        if (it == where.end())
            continue;
        x.push_back(da[i]);
        y.push_back(db[it->second]);
    }
    return detail::pearson(x, y);
}

} // namespace tcgen
