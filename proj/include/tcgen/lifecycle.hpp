#pragma once

// Community events across one step boundary, classified from the realized
// contingency matrix by Jaccard index.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "transition.hpp"

namespace tcgen {

template <class Set>
double jaccard(const Set& a, const Set& b) {
    std::size_t common = 0;
    for (const auto& x : a)
        common += b.count(x);
    const std::size_t uni = a.size() + b.size() - common;
    return uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
}

/// Realized flow across a boundary. Row i is community `from_labels[i]` at
/// t, column j is `to_labels[j]` at t+1. The optional birth row and death
/// column are the adjustment communities; their labels are ignored.
struct BoundaryFlow {
    FlowMatrix flow;
    std::vector<long long> from_labels;
    std::vector<long long> to_labels;
    std::optional<std::size_t> birth_row;
    std::optional<std::size_t> death_col;
};

struct EventThresholds {
    double continuation = 0.3;
    /// Minimum fraction of the source community a flow must carry to count
    /// towards a split or merge.
    double share = 0.1;
    /// Relative size change below which a continuation is neither growing
    /// nor shrinking.
    double dead_band = 0.02;

    void validate() const {
        if (!(continuation > 0.0 && continuation < 1.0))
            throw ValidationError("continuation threshold must lie in (0, 1)");
        if (!(share > 0.0 && share < 1.0))
            throw ValidationError("split/merge share must lie in (0, 1)");
        if (!(dead_band >= 0.0 && dead_band < 1.0))
            throw ValidationError("growth dead-band must lie in [0, 1)");
    }
};

enum class EventSide { end_of_t, start_of_t1 };

enum class EventKind { continues, continues_growing, continues_shrinking, split, merged, born, dead };

struct EventRecord {
    EventSide side = EventSide::end_of_t;
    long long community = 0;
    EventKind kind = EventKind::continues;
    std::vector<long long> counterparts;

    friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

namespace detail {

inline double cell_jaccard(long long common, long long a, long long b) {
    const long long uni = a + b - common;
    return uni <= 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
}

inline EventKind growth(long long before, long long after, double band) {
    const double b = static_cast<double>(before);
    const double a = static_cast<double>(after);
    if (a > b * (1.0 + band))
        return EventKind::continues_growing;
    if (a < b * (1.0 - band))
        return EventKind::continues_shrinking;
    return EventKind::continues;
}

} // namespace detail

/// Event records for both sides of the boundary. End-of-t records come
/// first, in row order, then start-of-t+1 records in column order. Within a
/// community: continuations, split, merge, then born/dead as the fallback
/// when nothing else applies.
inline std::vector<EventRecord> classify_events(const BoundaryFlow& b, const EventThresholds& th = {}) {
    th.validate();
    const FlowMatrix& u = b.flow;
    const std::size_t k = u.rows();
    const std::size_t l = u.cols();
    if (b.from_labels.size() != k || b.to_labels.size() != l)
        throw ValidationError("boundary labels do not match the flow matrix");
    const auto before = u.row_sums();
    const auto after = u.col_sums();
    auto real_row = [&](std::size_t i) { return !(b.birth_row && *b.birth_row == i); };
    auto real_col = [&](std::size_t j) { return !(b.death_col && *b.death_col == j); };
    auto qualifies = [&](std::size_t i, std::size_t j) {
        return u(i, j) > 0 && static_cast<double>(u(i, j)) >= th.share * static_cast<double>(before[i]);
    };

    std::vector<std::vector<std::size_t>> targets(k), sources(l);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < l; ++j)
            if (real_row(i) && real_col(j) && qualifies(i, j)) {
                targets[i].push_back(j);
                sources[j].push_back(i);
            }

    auto labels = [](const std::vector<std::size_t>& idx, const std::vector<long long>& names) {
        std::vector<long long> out;
        for (auto x : idx)
            out.push_back(names[x]);
        return out;
    };

    std::vector<EventRecord> out;
    for (std::size_t i = 0; i < k; ++i) {
        if (!real_row(i))
            continue;
        const std::size_t first = out.size();
        for (std::size_t j = 0; j < l; ++j)
            if (real_col(j) && detail::cell_jaccard(u(i, j), before[i], after[j]) >= th.continuation)
                out.push_back({EventSide::end_of_t, b.from_labels[i], detail::growth(before[i], after[j], th.dead_band),
                               {b.to_labels[j]}});
        if (targets[i].size() >= 2)
            out.push_back({EventSide::end_of_t, b.from_labels[i], EventKind::split, labels(targets[i], b.to_labels)});
        for (auto j : targets[i])
            if (sources[j].size() >= 2)
                out.push_back({EventSide::end_of_t, b.from_labels[i], EventKind::merged, {b.to_labels[j]}});
        if (out.size() == first)
            out.push_back({EventSide::end_of_t, b.from_labels[i], EventKind::dead, {}});
    }
    for (std::size_t j = 0; j < l; ++j) {
        if (!real_col(j))
            continue;
        const std::size_t first = out.size();
        for (std::size_t i = 0; i < k; ++i)
            if (real_row(i) && detail::cell_jaccard(u(i, j), before[i], after[j]) >= th.continuation)
                out.push_back({EventSide::start_of_t1, b.to_labels[j],
                               detail::growth(before[i], after[j], th.dead_band), {b.from_labels[i]}});
        for (auto i : sources[j])
            if (targets[i].size() >= 2)
                out.push_back({EventSide::start_of_t1, b.to_labels[j], EventKind::split, {b.from_labels[i]}});
        if (sources[j].size() >= 2)
            out.push_back({EventSide::start_of_t1, b.to_labels[j], EventKind::merged, labels(sources[j], b.from_labels)});
        if (out.size() == first)
            out.push_back({EventSide::start_of_t1, b.to_labels[j], EventKind::born, {}});
    }
    return out;
}

/// Labels for the communities at t+1. A target keeps the label of a source
/// when each is the other's highest-Jaccard partner and that Jaccard index
/// reaches the continuation threshold; every other target gets a fresh label
/// from `next_label`. Ties go to the lower index. The death column gets no
/// label.
inline std::vector<long long> inherit_labels(const FlowMatrix& u, const std::vector<long long>& from_labels,
                                             std::optional<std::size_t> birth_row,
                                             std::optional<std::size_t> death_col, double threshold,
                                             long long& next_label) {
    const std::size_t k = u.rows();
    const std::size_t l = u.cols();
    const auto before = u.row_sums();
    const auto after = u.col_sums();
    auto J = [&](std::size_t i, std::size_t j) {
        if ((birth_row && *birth_row == i) || (death_col && *death_col == j))
            return -1.0;
        return detail::cell_jaccard(u(i, j), before[i], after[j]);
    };
    auto best_col = [&](std::size_t i) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < l; ++j)
            if (J(i, j) > J(i, best))
                best = j;
        return best;
    };
    std::vector<long long> out;
    for (std::size_t j = 0; j < l; ++j) {
        if (death_col && *death_col == j)
            continue;
        std::size_t best = 0;
        for (std::size_t i = 1; i < k; ++i)
            if (J(i, j) > J(best, j))
                best = i;
        if (J(best, j) >= threshold && best_col(best) == j)
            out.push_back(from_labels[best]);
        else
            out.push_back(next_label++);
    }
    return out;
}

inline std::string to_string(EventKind k) {
    switch (k) {
    case EventKind::continues:
        return "continues";
    case EventKind::continues_growing:
        return "continues_growing";
    case EventKind::continues_shrinking:
        return "continues_shrinking";
    case EventKind::split:
        return "split";
    case EventKind::merged:
        return "merged";
    case EventKind::born:
        return "born";
    case EventKind::dead:
        return "dead";
    }
    return "?";
}

namespace detail {

inline std::string id_list(const std::vector<long long>& ids) {
    std::string s = "[";
    for (std::size_t a = 0; a < ids.size(); ++a)
        s += (a ? ", " : "") + std::to_string(ids[a]);
    return s + "]";
}

inline std::string describe(const EventRecord& e) {
    const bool end = e.side == EventSide::end_of_t;
    const std::string one = e.counterparts.empty() ? "" : std::to_string(e.counterparts.front());
    switch (e.kind) {
    case EventKind::continues:
        return end ? "Continues in " + one : "Continued from " + one;
    case EventKind::continues_growing:
        return end ? "Continues growing in " + one : "Continued growing from " + one;
    case EventKind::continues_shrinking:
        return end ? "Continues shrinking in " + one : "Continued shrinking from " + one;
    case EventKind::split:
        return end ? "Split into " + id_list(e.counterparts) : "from Split " + one;
    case EventKind::merged:
        return end ? "Merged into " + one : "Merged from " + id_list(e.counterparts);
    case EventKind::born:
        return "Born";
    case EventKind::dead:
        return "Dead";
    }
    return "";
}

} // namespace detail

/// Two-section text table: events at the end of t, then at the start of t+1.
inline std::string format_events(const std::vector<EventRecord>& events, int t) {
    std::ostringstream os;
    for (auto side : {EventSide::end_of_t, EventSide::start_of_t1}) {
        os << "Community | "
           << (side == EventSide::end_of_t ? "Event @ end of time T" + std::to_string(t)
                                           : "Event @ beginning of time T" + std::to_string(t + 1))
           << '\n';
        for (const auto& e : events)
            if (e.side == side)
                os << e.community << " | " << detail::describe(e) << '\n';
    }
    return os.str();
}

} // namespace tcgen
