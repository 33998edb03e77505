#pragma once

// Temporal network export (Gephi spreadsheet CSV with intervals) and the
// run report.
//
// nodes.csv
//   Id,Label,Interval,Community
//   one row per node ever alive; Interval is the Gephi timeset of the
//   timesteps the node exists in, Community the dynamic attribute giving the
//   community label per run of timesteps:
//     7,7,"<[0,3)>","<[0,2,4);[2,3,9)>"
// edges.csv
//   Source,Target,Type,Interval
//   one row per node pair ever linked, Source < Target, Type "Undirected":
//     3,7,Undirected,"<[0,1);[2,3)>"
// Intervals are half-open [t, t+1) per timestep and merged into maximal
// runs. Rows are sorted by id (nodes) and by (Source, Target) (edges).

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "graph.hpp"
#include "lifecycle.hpp"
#include "metrics.hpp"
#include "transition.hpp"

namespace tcgen {

namespace detail {

/// Maximal runs of consecutive timesteps: [start, end).
inline std::vector<std::pair<int, int>> runs(const std::vector<int>& times) {
    std::vector<std::pair<int, int>> out;
    for (int t : times) {
        if (!out.empty() && out.back().second == t)
            out.back().second = t + 1;
        else
            out.emplace_back(t, t + 1);
    }
    return out;
}

inline std::string timeset(const std::vector<std::pair<int, int>>& r) {
    std::string s = "<";
    for (std::size_t a = 0; a < r.size(); ++a)
        s += (a ? ";[" : "[") + std::to_string(r[a].first) + "," + std::to_string(r[a].second) + ")";
    return s + ">";
}

inline std::string quoted(const std::string& s) { return "\"" + s + "\""; }

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out(1);
    bool quote = false;
    for (char c : line) {
        if (c == '"')
            quote = !quote;
        else if (c == ',' && !quote)
            out.emplace_back();
        else if (c != '\r')
            out.back() += c;
    }
    if (quote)
        throw ValidationError("unterminated quote in CSV line: " + line);
    return out;
}

/// Parses "<[a,b);[c,d)>" or "<[a,b,v);...>" into tuples of 2 or 3 numbers.
inline std::vector<std::vector<long long>> parse_timeset(const std::string& s, std::size_t arity) {
    if (s.size() < 2 || s.front() != '<' || s.back() != '>')
        throw ValidationError("malformed interval '" + s + "'");
    std::vector<std::vector<long long>> out;
    std::string body = s.substr(1, s.size() - 2);
    std::stringstream ss(body);
    std::string part;
    while (std::getline(ss, part, ';')) {
        if (part.size() < 2 || part.front() != '[' || part.back() != ')')
            throw ValidationError("malformed interval '" + s + "'");
        std::stringstream ps(part.substr(1, part.size() - 2));
        std::vector<long long> v;
        std::string num;
        while (std::getline(ps, num, ','))
            try {
                v.push_back(std::stoll(num));
            } catch (const std::exception&) {
                throw ValidationError("malformed interval '" + s + "'");
            }
        if (v.size() != arity || v[0] >= v[1])
            throw ValidationError("malformed interval '" + s + "'");
        out.push_back(std::move(v));
    }
    return out;
}

inline NodeId parse_id(const std::string& s) {
    std::size_t used = 0;
    NodeId v = 0;
    try {
        v = std::stoull(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (s.empty() || used != s.size() || s[0] == '-')
        throw ValidationError("malformed node id '" + s + "'");
    return v;
}

} // namespace detail

inline void write_nodes_csv(std::ostream& os, const std::vector<Snapshot>& snaps) {
    std::map<NodeId, std::vector<std::pair<int, long long>>> life;
    for (const auto& s : snaps)
        for (const auto& n : s.nodes)
            life[n.id].emplace_back(s.t, s.community_labels.at(static_cast<std::size_t>(n.community)));
    os << "Id,Label,Interval,Community\n";
    for (const auto& [id, steps] : life) {
        std::vector<int> times;
        for (auto& st : steps)
            times.push_back(st.first);
        // community runs: consecutive timesteps with the same label
        std::string comm = "<";
        std::size_t a = 0;
        while (a < steps.size()) {
            std::size_t b = a + 1;
            while (b < steps.size() && steps[b].first == steps[b - 1].first + 1 && steps[b].second == steps[a].second)
                ++b;
            comm += (a ? ";[" : "[") + std::to_string(steps[a].first) + "," + std::to_string(steps[b - 1].first + 1) +
                    "," + std::to_string(steps[a].second) + ")";
            a = b;
        }
        comm += ">";
        os << id << ',' << id << ',' << detail::quoted(detail::timeset(detail::runs(times))) << ','
           << detail::quoted(comm) << '\n';
    }
}

inline void write_edges_csv(std::ostream& os, const std::vector<Snapshot>& snaps) {
    std::map<std::pair<NodeId, NodeId>, std::vector<int>> life;
    for (const auto& s : snaps)
        for (const auto& l : s.links) {
            NodeId u = s.nodes[l.a].id;
            NodeId v = s.nodes[l.b].id;
            life[{std::min(u, v), std::max(u, v)}].push_back(s.t);
        }
    os << "Source,Target,Type,Interval\n";
    for (const auto& [e, times] : life)
        os << e.first << ',' << e.second << ",Undirected," << detail::quoted(detail::timeset(detail::runs(times)))
           << '\n';
}

inline void export_temporal_csv(const std::vector<Snapshot>& snaps, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    for (const char* name : {"nodes.csv", "edges.csv"}) {
        std::ofstream os(dir / name, std::ios::binary);
        if (!os)
            throw IoError("cannot write '" + (dir / name).string() + "'");
        if (std::string(name) == "nodes.csv")
            write_nodes_csv(os, snaps);
        else
            write_edges_csv(os, snaps);
        if (!os)
            throw IoError("write failed for '" + (dir / name).string() + "'");
    }
}

/// Per-timestep content recovered from the CSV files.
struct TemporalCsv {
    std::map<int, std::map<NodeId, long long>> community;
    std::map<int, std::set<std::pair<NodeId, NodeId>>> edges;
};

inline TemporalCsv read_temporal_csv(std::istream& nodes, std::istream& edges) {
    TemporalCsv out;
    std::string line;
    if (!std::getline(nodes, line) || line.rfind("Id,Label,Interval,Community", 0) != 0)
        throw ValidationError("nodes.csv: missing header");
    while (std::getline(nodes, line)) {
        if (line.empty())
            continue;
        auto f = detail::split_csv(line);
        if (f.size() != 4)
            throw ValidationError("nodes.csv: expected 4 columns in '" + line + "'");
        const NodeId id = detail::parse_id(f[0]);
        std::set<int> alive;
        for (auto& r : detail::parse_timeset(f[2], 2))
            for (auto t = r[0]; t < r[1]; ++t)
                alive.insert(static_cast<int>(t));
        for (auto& r : detail::parse_timeset(f[3], 3))
            for (auto t = r[0]; t < r[1]; ++t) {
                if (!alive.count(static_cast<int>(t)))
                    throw ValidationError("nodes.csv: community outside the node interval for " + f[0]);
                out.community[static_cast<int>(t)][id] = r[2];
            }
    }
    if (!std::getline(edges, line) || line.rfind("Source,Target,Type,Interval", 0) != 0)
        throw ValidationError("edges.csv: missing header");
    while (std::getline(edges, line)) {
        if (line.empty())
            continue;
        auto f = detail::split_csv(line);
        if (f.size() != 4)
            throw ValidationError("edges.csv: expected 4 columns in '" + line + "'");
        const std::pair<NodeId, NodeId> e{detail::parse_id(f[0]), detail::parse_id(f[1])};
        for (auto& r : detail::parse_timeset(f[3], 2))
            for (auto t = r[0]; t < r[1]; ++t)
                out.edges[static_cast<int>(t)].insert(e);
    }
    return out;
}

inline TemporalCsv read_temporal_csv(const std::filesystem::path& dir) {
    std::ifstream n(dir / "nodes.csv");
    std::ifstream e(dir / "edges.csv");
    if (!n || !e)
        throw IoError("cannot read CSV files in '" + dir.string() + "'");
    return read_temporal_csv(n, e);
}

// --------------------------------------------------------------------------
// Run report

struct SnapshotReport {
    int t = 0;
    std::size_t nodes = 0;
    std::size_t links = 0;
    std::size_t communities = 0;
    Metric assortativity;
    double modularity = 0.0;
    std::size_t repairs = 0;
    std::size_t disconnected = 0; // communities whose intra subgraph is not connected
};

struct BoundaryReport {
    int t = 0; // boundary between t and t+1
    BoundaryFlow flow;
    double vi = 0.0;
    std::string seed_heuristic;
    double seed_vi = 0.0;
    bool searched = true;
    std::size_t evaluations = 0;
    std::size_t moves = 0;
    long long births = 0;
    long long deaths = 0;
    std::optional<std::uint64_t> solution_count; // when the lattice was small enough to count
    std::vector<EventRecord> events;
    Metric temporal_correlation;
};

struct RunReport {
    std::uint64_t seed = 0;
    nlohmann::json config;
    std::vector<SnapshotReport> snapshots;
    std::vector<BoundaryReport> boundaries;
};

inline SnapshotReport snapshot_report(const Snapshot& s, std::size_t repairs = 0) {
    return {s.t, s.nodes.size(), s.links.size(), s.community_count(), assortativity_coefficient(s), modularity(s),
            repairs, 0};
}

namespace detail {

inline std::string row_name(const BoundaryFlow& b, std::size_t i) {
    return b.birth_row && *b.birth_row == i ? "born" : std::to_string(b.from_labels[i]);
}

inline std::string col_name(const BoundaryFlow& b, std::size_t j) {
    return b.death_col && *b.death_col == j ? "died" : std::to_string(b.to_labels[j]);
}

inline std::string metric_text(const Metric& m) {
    std::ostringstream os;
    os << std::setprecision(6) << m.value;
    if (m.flagged)
        os << " (undefined)";
    return os.str();
}

} // namespace detail

inline void write_report_text(std::ostream& os, const RunReport& r) {
    os << "seed " << r.seed << "\n\n";
    os << "timestep  nodes  links  communities  assortativity  modularity  repairs  disconnected\n";
    for (const auto& s : r.snapshots)
        os << s.t << "  " << s.nodes << "  " << s.links << "  " << s.communities << "  "
           << detail::metric_text(s.assortativity) << "  " << std::setprecision(6) << s.modularity << "  "
           << s.repairs << "  " << s.disconnected << '\n';
    for (const auto& b : r.boundaries) {
        const auto& u = b.flow.flow;
        os << "\nboundary T" << b.t << " -> T" << b.t + 1 << '\n';
        os << "births " << b.births << ", deaths " << b.deaths << '\n';
        os << "contingency (rows T" << b.t << ", columns T" << b.t + 1 << ")\n";
        os << "from\\to";
        for (std::size_t j = 0; j < u.cols(); ++j)
            os << ' ' << detail::col_name(b.flow, j);
        os << '\n';
        for (std::size_t i = 0; i < u.rows(); ++i) {
            os << detail::row_name(b.flow, i);
            for (std::size_t j = 0; j < u.cols(); ++j)
                os << ' ' << u(i, j);
            os << '\n';
        }
        os << "VI " << std::setprecision(6) << b.vi << " (best seed " << b.seed_heuristic << " " << b.seed_vi
           << (b.searched ? ", searched" : ", search skipped") << ", " << b.evaluations << " evaluations, "
           << b.moves << " moves)\n";
        if (b.solution_count)
            os << "lattice points " << *b.solution_count << '\n';
        os << "temporal degree correlation " << detail::metric_text(b.temporal_correlation) << '\n';
        os << format_events(b.events, b.t);
    }
}

inline nlohmann::json report_json(const RunReport& r) {
    using nlohmann::json;
    json j;
    j["seed"] = r.seed;
    j["config"] = r.config;
    j["snapshots"] = json::array();
    for (const auto& s : r.snapshots)
        j["snapshots"].push_back({{"t", s.t},
                                  {"nodes", s.nodes},
                                  {"links", s.links},
                                  {"communities", s.communities},
                                  {"assortativity", s.assortativity.value},
                                  {"assortativity_undefined", s.assortativity.flagged},
                                  {"modularity", s.modularity},
                                  {"repairs", s.repairs},
                                  {"disconnected_communities", s.disconnected}});
    j["boundaries"] = json::array();
    json series = json::array();
    for (const auto& b : r.boundaries) {
        const auto& u = b.flow.flow;
        json rows = json::array();
        for (std::size_t i = 0; i < u.rows(); ++i) {
            json row = json::array();
            for (std::size_t jj = 0; jj < u.cols(); ++jj)
                row.push_back(u(i, jj));
            rows.push_back(row);
        }
        json from = json::array(), to = json::array();
        for (std::size_t i = 0; i < u.rows(); ++i)
            from.push_back(detail::row_name(b.flow, i));
        for (std::size_t jj = 0; jj < u.cols(); ++jj)
            to.push_back(detail::col_name(b.flow, jj));
        json events = json::array();
        for (const auto& e : b.events)
            events.push_back({{"side", e.side == EventSide::end_of_t ? "end" : "start"},
                              {"community", e.community},
                              {"event", to_string(e.kind)},
                              {"counterparts", e.counterparts}});
        json entry = {{"t", b.t},
                      {"from", from},
                      {"to", to},
                      {"contingency", rows},
                      {"vi", b.vi},
                      {"seed_heuristic", b.seed_heuristic},
                      {"seed_vi", b.seed_vi},
                      {"searched", b.searched},
                      {"evaluations", b.evaluations},
                      {"moves", b.moves},
                      {"births", b.births},
                      {"deaths", b.deaths},
                      {"events", events},
                      {"temporal_correlation", b.temporal_correlation.value},
                      {"temporal_correlation_undefined", b.temporal_correlation.flagged}};
        entry["solution_count"] = b.solution_count ? json(*b.solution_count) : json(nullptr);
        j["boundaries"].push_back(entry);
        series.push_back(b.temporal_correlation.value);
    }
    j["temporal_correlation_series"] = series;
    return j;
}

inline void write_report(const RunReport& r, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    std::ofstream txt(dir / "report.txt", std::ios::binary);
    std::ofstream js(dir / "report.json", std::ios::binary);
    if (!txt || !js)
        throw IoError("cannot write report files in '" + dir.string() + "'");
    write_report_text(txt, r);
    js << report_json(r).dump(2) << '\n';
    if (!txt || !js)
        throw IoError("write failed for report files in '" + dir.string() + "'");
}

} // namespace tcgen
