#pragma once

// Node flow between consecutive clusterings.
//
// A flow U (k x l, non-negative integers) with row sums = sizes at t and
// column sums = sizes at t+1 is a lattice point of the transportation
// polytope Ax = B, A being the incidence matrix of the complete bipartite
// graph K_{k,l}. The flow that minimizes the variation of information
// between the two clusterings is searched with a pool of one-pass greedy
// seeds followed by an anytime taboo search that jumps to the polytope
// boundary along each kernel direction.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "error.hpp"
#include "graph.hpp"
#include "random.hpp"

namespace tcgen {

/// u(i, j): nodes moving from community i at t to community j at t+1.
class FlowMatrix {
public:
    FlowMatrix() = default;
    FlowMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), u_(rows * cols, 0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    long long& operator()(std::size_t i, std::size_t j) { return u_[i * cols_ + j]; }
    long long operator()(std::size_t i, std::size_t j) const { return u_[i * cols_ + j]; }

    std::span<const long long> flat() const { return u_; }
    std::span<long long> flat() { return u_; }

    std::vector<long long> row_sums() const {
        std::vector<long long> r(rows_, 0);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                r[i] += (*this)(i, j);
        return r;
    }

    std::vector<long long> col_sums() const {
        std::vector<long long> c(cols_, 0);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                c[j] += (*this)(i, j);
        return c;
    }

    long long total() const { return std::accumulate(u_.begin(), u_.end(), 0LL); }

    std::size_t zero_count() const { return static_cast<std::size_t>(std::count(u_.begin(), u_.end(), 0LL)); }

    friend bool operator==(const FlowMatrix&, const FlowMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<long long> u_;
};

/// Ax = B for the flows between `from` (k communities) and `to` (l
/// communities). Column c of A is the flow variable (c / l, c % l). The last
/// equation is linearly dependent on the others and is dropped when
/// `reduced` is set.
struct FlowSystem {
    std::vector<long long> from;
    std::vector<long long> to;
    bool reduced = true;

    std::size_t k() const { return from.size(); }
    std::size_t l() const { return to.size(); }
    long long node_count() const { return std::accumulate(from.begin(), from.end(), 0LL); }
    std::size_t variables() const { return k() * l(); }

    /// Dense incidence matrix (rows: sources then targets, minus the last
    /// row when reduced).
    std::vector<std::vector<int>> incidence() const {
        const std::size_t rows = k() + l() - (reduced ? 1 : 0);
        std::vector<std::vector<int>> A(rows, std::vector<int>(variables(), 0));
        for (std::size_t i = 0; i < k(); ++i)
            for (std::size_t j = 0; j < l(); ++j) {
                const std::size_t c = i * l() + j;
                if (i < rows)
                    A[i][c] = 1;
                if (k() + j < rows)
                    A[k() + j][c] = 1;
            }
        return A;
    }

    std::vector<long long> rhs() const {
        std::vector<long long> B(from);
        B.insert(B.end(), to.begin(), to.end());
        if (reduced)
            B.pop_back();
        return B;
    }

    bool feasible(const FlowMatrix& x) const {
        if (x.rows() != k() || x.cols() != l())
            return false;
        for (auto v : x.flat())
            if (v < 0)
                return false;
        return x.row_sums() == from && x.col_sums() == to;
    }
};

inline FlowSystem build_flow_system(std::vector<long long> from, std::vector<long long> to) {
    if (from.empty() || to.empty())
        throw ValidationError("flow system needs at least one community on each side");
    for (auto s : from)
        if (s < 0)
            throw ValidationError("negative community size");
    for (auto s : to)
        if (s < 0)
            throw ValidationError("negative community size");
    long long a = std::accumulate(from.begin(), from.end(), 0LL);
    long long b = std::accumulate(to.begin(), to.end(), 0LL);
    if (a != b)
        throw ValidationError("flow system sides differ: " + std::to_string(a) + " vs " + std::to_string(b) + " nodes");
    FlowSystem sys;
    sys.from = std::move(from);
    sys.to = std::move(to);
    return sys;
}

inline FlowSystem build_flow_system(std::span<const int> from, std::span<const int> to) {
    return build_flow_system(std::vector<long long>(from.begin(), from.end()),
                             std::vector<long long>(to.begin(), to.end()));
}

/// Sparse kernel vector: the 4-cycle (i,j)+ (i,L)- (K,j)- (K,L)+ with
/// K = k-1 and L = l-1.
struct KernelVector {
    std::array<std::size_t, 4> cell{};
    std::array<int, 4> sign{};
};

struct KernelBasis {
    std::vector<KernelVector> vectors;

    /// Dense form over the k*l flow variables.
    std::vector<std::vector<int>> dense(std::size_t variables) const {
        std::vector<std::vector<int>> out;
        for (const auto& v : vectors) {
            std::vector<int> d(variables, 0);
            for (std::size_t e = 0; e < 4; ++e)
                d[v.cell[e]] += v.sign[e];
            out.push_back(std::move(d));
        }
        return out;
    }
};

inline KernelBasis kernel_basis(const FlowSystem& sys) {
    KernelBasis b;
    const std::size_t k = sys.k();
    const std::size_t l = sys.l();
    if (k < 2 || l < 2)
        return b;
    const std::size_t K = k - 1;
    const std::size_t L = l - 1;
    for (std::size_t i = 0; i < K; ++i)
        for (std::size_t j = 0; j < L; ++j)
            b.vectors.push_back({{i * l + j, i * l + L, K * l + j, K * l + L}, {+1, -1, -1, +1}});
    return b;
}

/// Variation of information between the row and column clusterings of a
/// contingency matrix: -sum r_ij [ln(r_ij/p_i) + ln(r_ij/q_j)], natural log,
/// with 0 ln 0 = 0.
inline double vi(const FlowMatrix& m) {
    const double n = static_cast<double>(m.total());
    if (n <= 0.0)
        return 0.0;
    auto rows = m.row_sums();
    auto cols = m.col_sums();
    double acc = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) {
            const double u = static_cast<double>(m(i, j));
            if (u <= 0.0)
                continue;
            acc += u * (std::log(static_cast<double>(rows[i]) / u) + std::log(static_cast<double>(cols[j]) / u));
        }
    return std::max(0.0, acc / n);
}

/// Contingency matrix of two labelings of the same node set.
inline FlowMatrix contingency(std::span<const int> x, std::span<const int> y) {
    if (x.size() != y.size())
        throw ValidationError("clusterings cover different numbers of nodes");
    int kx = 0;
    int ky = 0;
    for (int a : x) {
        if (a < 0)
            throw ValidationError("negative community label");
        kx = std::max(kx, a + 1);
    }
    for (int b : y) {
        if (b < 0)
            throw ValidationError("negative community label");
        ky = std::max(ky, b + 1);
    }
    FlowMatrix m(static_cast<std::size_t>(kx), static_cast<std::size_t>(ky));
    for (std::size_t v = 0; v < x.size(); ++v)
        ++m(static_cast<std::size_t>(x[v]), static_cast<std::size_t>(y[v]));
    return m;
}

inline double vi(std::span<const int> x, std::span<const int> y) { return vi(contingency(x, y)); }

// --------------------------------------------------------------------------
// Exhaustive lattice enumeration (verification oracle and small instances)

namespace detail {

template <class Visit>
bool enumerate_cells(const FlowSystem& sys, FlowMatrix& x, std::vector<long long>& rres, std::vector<long long>& cres,
                     std::size_t i, std::size_t j, Visit& visit) {
    const std::size_t k = sys.k();
    const std::size_t l = sys.l();
    if (i + 1 >= k) {
        // last row takes whatever the columns still need
        for (std::size_t c = 0; c < l; ++c)
            x(k - 1, c) = cres[c];
        return visit(x);
    }
    if (j + 1 >= l) {
        // last column of row i takes the row remainder
        const long long v = rres[i];
        x(i, l - 1) = v;
        cres[l - 1] -= v;
        rres[i] = 0;
        bool go = enumerate_cells(sys, x, rres, cres, i + 1, 0, visit);
        rres[i] = v;
        cres[l - 1] += v;
        return go;
    }
    long long later = 0;
    for (std::size_t c = j + 1; c < l; ++c)
        later += cres[c];
    const long long hi = std::min(rres[i], cres[j]);
    const long long lo = std::max(0LL, rres[i] - later);
    for (long long v = lo; v <= hi; ++v) {
        x(i, j) = v;
        rres[i] -= v;
        cres[j] -= v;
        bool go = enumerate_cells(sys, x, rres, cres, i, j + 1, visit);
        rres[i] += v;
        cres[j] += v;
        if (!go)
            return false;
    }
    return true;
}

} // namespace detail

/// Calls `visit(const FlowMatrix&) -> bool` on every non-negative integer
/// solution exactly once; enumeration stops when `visit` returns false.
template <class Visit>
void for_each_lattice_point(const FlowSystem& sys, Visit visit) {
    FlowMatrix x(sys.k(), sys.l());
    std::vector<long long> rres(sys.from);
    std::vector<long long> cres(sys.to);
    detail::enumerate_cells(sys, x, rres, cres, 0, 0, visit);
}

struct LatticeEnumeration {
    std::vector<FlowMatrix> points;
    bool overflow = false;
};

/// All lattice points, or `overflow` once more than `cap` are found.
inline LatticeEnumeration enumerate_lattice(const FlowSystem& sys, std::size_t cap) {
    LatticeEnumeration out;
    for_each_lattice_point(sys, [&](const FlowMatrix& x) {
        if (out.points.size() >= cap) {
            out.overflow = true;
            return false;
        }
        out.points.push_back(x);
        return true;
    });
    if (out.overflow)
        out.points.clear();
    return out;
}

namespace detail {

inline std::uint64_t count_cells(const FlowSystem& sys, std::vector<long long>& rres, std::vector<long long>& cres,
                                 std::size_t i, std::size_t j, std::uint64_t cap, std::uint64_t& acc) {
    const std::size_t k = sys.k();
    const std::size_t l = sys.l();
    if (acc > cap)
        return acc;
    if (i + 1 >= k) {
        ++acc;
        return acc;
    }
    if (j + 1 >= l) {
        const long long v = rres[i];
        cres[l - 1] -= v;
        rres[i] = 0;
        count_cells(sys, rres, cres, i + 1, 0, cap, acc);
        rres[i] = v;
        cres[l - 1] += v;
        return acc;
    }
    long long later = 0;
    for (std::size_t c = j + 1; c < l; ++c)
        later += cres[c];
    const long long hi = std::min(rres[i], cres[j]);
    const long long lo = std::max(0LL, rres[i] - later);
    if (hi < lo)
        return acc;
    if (i + 2 == k && j + 2 == l) {
        // last free variable: every admissible value completes uniquely
        acc += static_cast<std::uint64_t>(hi - lo + 1);
        return acc;
    }
    for (long long v = lo; v <= hi && acc <= cap; ++v) {
        rres[i] -= v;
        cres[j] -= v;
        count_cells(sys, rres, cres, i, j + 1, cap, acc);
        rres[i] += v;
        cres[j] += v;
    }
    return acc;
}

} // namespace detail

/// Number of lattice points, or nullopt when it exceeds `cap`.
inline std::optional<std::uint64_t> count_lattice(const FlowSystem& sys,
                                                  std::uint64_t cap = std::numeric_limits<std::uint64_t>::max() - 1) {
    std::vector<long long> rres(sys.from);
    std::vector<long long> cres(sys.to);
    std::uint64_t acc = 0;
    detail::count_cells(sys, rres, cres, 0, 0, cap, acc);
    if (acc > cap)
        return std::nullopt;
    return acc;
}

// --------------------------------------------------------------------------
// Seed heuristics

namespace detail {

struct Residuals {
    std::vector<long long> row;
    std::vector<long long> col;

    explicit Residuals(const FlowSystem& sys) : row(sys.from), col(sys.to) {}

    long long movable(std::size_t i, std::size_t j) const { return std::min(row[i], col[j]); }

    void commit(FlowMatrix& x, std::size_t i, std::size_t j, long long m) {
        x(i, j) += m;
        row[i] -= m;
        col[j] -= m;
    }

    bool done() const {
        return std::all_of(row.begin(), row.end(), [](long long r) { return r == 0; });
    }
};

inline std::vector<std::size_t> by_size_desc(const std::vector<long long>& sizes) {
    std::vector<std::size_t> idx(sizes.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return sizes[a] > sizes[b]; });
    return idx;
}

inline void northwest_fill(FlowMatrix& x, Residuals& res, const std::vector<std::size_t>& rows,
                           const std::vector<std::size_t>& cols) {
    std::size_t a = 0;
    std::size_t b = 0;
    while (a < rows.size() && b < cols.size()) {
        const auto i = rows[a];
        const auto j = cols[b];
        const long long m = res.movable(i, j);
        res.commit(x, i, j, m);
        if (res.row[i] == 0)
            ++a;
        else
            ++b;
    }
}

} // namespace detail

/// Greedy on the VI objective: repeatedly commits the flow
/// u_ij = min(residual row i, residual column j) whose own VI contribution
/// (u/n)[ln(s_i/u) + ln(s'_j/u)] is smallest.
inline FlowMatrix mi_greedy(const FlowSystem& sys) {
    FlowMatrix x(sys.k(), sys.l());
    detail::Residuals res(sys);
    const double n = static_cast<double>(std::max(1LL, sys.node_count()));
    while (!res.done()) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0;
        std::size_t bj = 0;
        long long bm = 0;
        for (std::size_t i = 0; i < sys.k(); ++i)
            for (std::size_t j = 0; j < sys.l(); ++j) {
                const long long m = res.movable(i, j);
                if (m <= 0)
                    continue;
                const double u = static_cast<double>(m);
                const double inc = u / n *
                                   (std::log(static_cast<double>(sys.from[i]) / u) +
                                    std::log(static_cast<double>(sys.to[j]) / u));
                if (inc < best) {
                    best = inc;
                    bi = i;
                    bj = j;
                    bm = m;
                }
            }
        res.commit(x, bi, bj, bm);
    }
    return x;
}

/// Rows by descending size; each row sends to the column with the largest
/// residual until it is empty.
inline FlowMatrix largest_to_largest(const FlowSystem& sys) {
    FlowMatrix x(sys.k(), sys.l());
    detail::Residuals res(sys);
    for (auto i : detail::by_size_desc(sys.from)) {
        while (res.row[i] > 0) {
            auto j = static_cast<std::size_t>(std::max_element(res.col.begin(), res.col.end()) - res.col.begin());
            res.commit(x, i, j, res.movable(i, j));
        }
    }
    return x;
}

/// Repeatedly commits the largest single flow max_ij min(row_i, col_j).
inline FlowMatrix max_single_flow(const FlowSystem& sys) {
    FlowMatrix x(sys.k(), sys.l());
    detail::Residuals res(sys);
    while (!res.done()) {
        long long best = 0;
        std::size_t bi = 0;
        std::size_t bj = 0;
        for (std::size_t i = 0; i < sys.k(); ++i)
            for (std::size_t j = 0; j < sys.l(); ++j)
                if (res.movable(i, j) > best) {
                    best = res.movable(i, j);
                    bi = i;
                    bj = j;
                }
        res.commit(x, bi, bj, best);
    }
    return x;
}

/// Northwest-corner rule with both sides sorted by descending size.
inline FlowMatrix northwest_corner(const FlowSystem& sys) {
    FlowMatrix x(sys.k(), sys.l());
    detail::Residuals res(sys);
    detail::northwest_fill(x, res, detail::by_size_desc(sys.from), detail::by_size_desc(sys.to));
    return x;
}

/// Independence flow s_i s'_j / n, floored, with the remainders handed out
/// by descending fractional part and then by the northwest-corner rule.
inline FlowMatrix proportional_rounding(const FlowSystem& sys) {
    FlowMatrix x(sys.k(), sys.l());
    detail::Residuals res(sys);
    const long long n = sys.node_count();
    if (n == 0)
        return x;
    struct Cell {
        double frac;
        std::size_t i, j;
    };
    std::vector<Cell> cells;
    for (std::size_t i = 0; i < sys.k(); ++i)
        for (std::size_t j = 0; j < sys.l(); ++j) {
            const long long num = sys.from[i] * sys.to[j];
            res.commit(x, i, j, num / n);
            cells.push_back({static_cast<double>(num % n) / static_cast<double>(n), i, j});
        }
    std::stable_sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) { return a.frac > b.frac; });
    for (const auto& c : cells)
        if (res.movable(c.i, c.j) > 0)
            res.commit(x, c.i, c.j, 1);
    std::vector<std::size_t> rows(sys.k());
    std::vector<std::size_t> cols(sys.l());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    std::iota(cols.begin(), cols.end(), std::size_t{0});
    detail::northwest_fill(x, res, rows, cols);
    return x;
}

struct SeedCandidate {
    const char* name;
    FlowMatrix flow;
    double vi;
};

/// The five one-pass greedy starting points, in a fixed order.
inline std::vector<SeedCandidate> seed_pool(const FlowSystem& sys) {
    std::vector<SeedCandidate> pool;
    auto add = [&](const char* name, FlowMatrix m) {
        if (!sys.feasible(m))
            throw InvariantViolation(std::string("seed heuristic produced an infeasible flow: ") + name);
        double v = vi(m);
        pool.push_back({name, std::move(m), v});
    };
    add("mi_greedy", mi_greedy(sys));
    add("largest_to_largest", largest_to_largest(sys));
    add("max_single_flow", max_single_flow(sys));
    add("northwest_corner", northwest_corner(sys));
    add("proportional_rounding", proportional_rounding(sys));
    return pool;
}

/// First candidate with the lowest VI.
inline const SeedCandidate& best_seed(const std::vector<SeedCandidate>& pool) {
    return *std::min_element(pool.begin(), pool.end(),
                             [](const SeedCandidate& a, const SeedCandidate& b) { return a.vi < b.vi; });
}

// --------------------------------------------------------------------------
// Anytime greedy search with taboo

struct SearchConfig {
    std::size_t local_tries_threshold = 50;
    std::size_t global_tries_threshold = 10;
    std::size_t enumeration_cap = 100000;
    /// Oldest visited entries are evicted beyond this many.
    std::size_t visited_cap = 1000000;

    void validate() const {
        if (local_tries_threshold < 1 || global_tries_threshold < 1)
            throw ValidationError("search thresholds must be >= 1");
        if (visited_cap < 1)
            throw ValidationError("visited-set cap must be >= 1");
    }
};

struct SearchResult {
    FlowMatrix best;
    double vi = 0.0;
    /// VI of the current best after the start and after every improvement.
    std::vector<double> trajectory;
    std::size_t evaluations = 0;
    std::size_t moves = 0;
    bool dead_end = false;
};

/// Largest n >= 0 such that x + sign * n * v stays non-negative.
inline long long boundary_steps(const FlowMatrix& x, const KernelVector& v, int sign) {
    long long n = std::numeric_limits<long long>::max();
    auto flat = x.flat();
    for (std::size_t e = 0; e < 4; ++e)
        if (v.sign[e] * sign < 0)
            n = std::min(n, flat[v.cell[e]]);
    return n;
}

namespace detail {

// u [ln(r/u) + ln(c/u)], the unnormalized VI contribution of one cell.
inline double vi_term(long long u, long long r, long long c) {
    if (u <= 0)
        return 0.0;
    const double x = static_cast<double>(u);
    return x * (std::log(static_cast<double>(r) / x) + std::log(static_cast<double>(c) / x));
}

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Additive hash so a 4-cell move updates it in O(1).
inline std::uint64_t cell_hash(std::size_t cell, long long value) {
    return mix64((static_cast<std::uint64_t>(cell) << 32) ^ static_cast<std::uint64_t>(value));
}

inline std::uint64_t flow_hash(const FlowMatrix& m) {
    std::uint64_t h = 0;
    auto f = m.flat();
    for (std::size_t c = 0; c < f.size(); ++c)
        h += cell_hash(c, f[c]);
    return h;
}

// Visited flows keyed by additive hash, oldest evicted beyond `cap`.
class VisitedFlows {
public:
    explicit VisitedFlows(std::size_t cap) : cap_(cap) {}

    bool contains(std::uint64_t h, const FlowMatrix& base, const KernelVector& v, long long step) const {
        auto range = by_hash_.equal_range(h);
        for (auto it = range.first; it != range.second; ++it) {
            const auto& m = it->second;
            bool same = true;
            for (std::size_t c = 0; c < m.flat().size() && same; ++c) {
                long long want = base.flat()[c];
                for (std::size_t e = 0; e < 4; ++e)
                    if (v.cell[e] == c)
                        want += step * v.sign[e];
                same = m.flat()[c] == want;
            }
            if (same)
                return true;
        }
        return false;
    }

    void insert(std::uint64_t h, const FlowMatrix& m) {
        auto range = by_hash_.equal_range(h);
        for (auto it = range.first; it != range.second; ++it)
            if (it->second == m)
                return;
        by_hash_.emplace(h, m);
        age_.push_back(h);
        if (age_.size() > cap_) {
            // the oldest entry with this hash is the first inserted
            by_hash_.erase(by_hash_.find(age_.front()));
            age_.pop_front();
        }
    }

private:
    std::size_t cap_;
    std::unordered_multimap<std::uint64_t, FlowMatrix> by_hash_;
    std::deque<std::uint64_t> age_;
};

} // namespace detail

/// Greedy anytime search over the polytope hull.
///
/// From the current best, every kernel direction is followed in both signs
/// to the last feasible lattice point; the best unvisited endpoint is marked
/// visited and becomes the current best if it improves on it (which resets
/// both try counters). Non-improving endpoints count as local tries. The
/// search stops when the thresholds are exceeded or no unvisited endpoint
/// is left. A 4-cycle move keeps every margin, so a candidate's VI differs
/// from the current one only in its four cells.
inline SearchResult taboo_search(const FlowSystem& sys, const FlowMatrix& seed, const KernelBasis& basis,
                                 const SearchConfig& cfg) {
    cfg.validate();
    if (!sys.feasible(seed))
        throw ValidationError("search seed is not a feasible flow");

    SearchResult out;
    out.best = seed;
    out.vi = vi(seed);
    out.trajectory.push_back(out.vi);
    const long long n = sys.node_count();
    if (n <= 0)
        return out;
    const double inv_n = 1.0 / static_cast<double>(n);
    const std::size_t l = sys.l();
    auto row_of = [&](std::size_t c) { return sys.from[c / l]; };
    auto col_of = [&](std::size_t c) { return sys.to[c % l]; };

    detail::VisitedFlows visited(cfg.visited_cap);
    std::uint64_t best_hash = detail::flow_hash(out.best);
    visited.insert(best_hash, out.best);

    std::size_t global_tries = 0;
    bool stop = false;
    while (!stop && global_tries <= cfg.global_tries_threshold) {
        std::size_t local_tries = 0;
        ++global_tries;
        while (local_tries <= cfg.local_tries_threshold) {
            ++local_tries;
            double local_best = std::numeric_limits<double>::infinity();
            const KernelVector* pick = nullptr;
            long long pick_step = 0;
            std::uint64_t pick_hash = 0;
            auto flat = out.best.flat();
            for (const auto& v : basis.vectors) {
                for (int sign : {+1, -1}) {
                    const long long steps = boundary_steps(out.best, v, sign);
                    if (steps == 0)
                        continue;
                    const long long step = sign * steps;
                    double delta = 0.0;
                    std::uint64_t h = best_hash;
                    for (std::size_t e = 0; e < 4; ++e) {
                        const std::size_t c = v.cell[e];
                        const long long before = flat[c];
                        const long long after = before + step * v.sign[e];
                        delta += detail::vi_term(after, row_of(c), col_of(c)) -
                                 detail::vi_term(before, row_of(c), col_of(c));
                        h += detail::cell_hash(c, after) - detail::cell_hash(c, before);
                    }
                    if (visited.contains(h, out.best, v, step))
                        continue;
                    const double value = out.vi + delta * inv_n;
                    ++out.evaluations;
                    if (value < local_best) {
                        local_best = value;
                        pick = &v;
                        pick_step = step;
                        pick_hash = h;
                    }
                }
            }
            if (!pick) {
                out.dead_end = true;
                stop = true;
                break;
            }
            FlowMatrix cand = out.best;
            for (std::size_t e = 0; e < 4; ++e)
                cand.flat()[pick->cell[e]] += pick_step * pick->sign[e];
            visited.insert(pick_hash, cand);
            const double exact = vi(cand);
            if (!(exact < out.vi - 1e-12)) {
                ++local_tries;
            } else {
                out.vi = exact;
                out.best = std::move(cand);
                best_hash = pick_hash;
                out.trajectory.push_back(out.vi);
                ++out.moves;
                local_tries = 0;
                global_tries = 0;
            }
        }
    }
    return out;
}

/// Seed pool followed by the taboo search from the best seed (or the best
/// seed alone when `search` is false).
struct FlowSolution {
    std::vector<SeedCandidate> seeds;
    SearchResult search;
};

inline FlowSolution solve_flow(const FlowSystem& sys, const SearchConfig& cfg, bool search = true) {
    FlowSolution sol;
    sol.seeds = seed_pool(sys);
    const auto& start = best_seed(sol.seeds);
    if (search) {
        sol.search = taboo_search(sys, start.flow, kernel_basis(sys), cfg);
    } else {
        sol.search.best = start.flow;
        sol.search.vi = start.vi;
        sol.search.trajectory = {start.vi};
    }
    return sol;
}

// --------------------------------------------------------------------------
// Materialization

struct MaterializedFlow {
    /// Node ids per target column.
    std::vector<std::vector<NodeId>> targets;
    /// Ids created for the birth row, in order.
    std::vector<NodeId> born;
};

/// Chooses which concrete nodes realize the flow. `sources[i]` lists the
/// nodes of row i; a row index equal to `birth_row` has no nodes and emits
/// fresh ids from `next_id` instead. Within each row the destinations are a
/// uniformly random permutation.
inline MaterializedFlow materialize_flow(const FlowMatrix& flow, std::vector<std::vector<NodeId>> sources,
                                         std::optional<std::size_t> birth_row, NodeId& next_id, Rng& rng) {
    if (sources.size() != flow.rows())
        throw InvariantViolation("materialize_flow: row count mismatch");
    auto rows = flow.row_sums();
    MaterializedFlow out;
    out.targets.resize(flow.cols());
    for (std::size_t i = 0; i < flow.rows(); ++i) {
        auto& pool = sources[i];
        if (birth_row && *birth_row == i) {
            if (!pool.empty())
                throw InvariantViolation("materialize_flow: birth row carries nodes");
            for (long long c = 0; c < rows[i]; ++c) {
                pool.push_back(next_id);
                out.born.push_back(next_id++);
            }
        }
        if (static_cast<long long>(pool.size()) != rows[i])
            throw InvariantViolation("materialize_flow: population of row " + std::to_string(i) + " is " +
                                     std::to_string(pool.size()) + ", flow expects " + std::to_string(rows[i]));
        std::shuffle(pool.begin(), pool.end(), rng);
        std::size_t at = 0;
        for (std::size_t j = 0; j < flow.cols(); ++j)
            for (long long c = 0; c < flow(i, j); ++c)
                out.targets[j].push_back(pool[at++]);
    }
    return out;
}

} // namespace tcgen
