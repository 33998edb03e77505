#pragma once

// The generation loop: sequences per timestep, graphability gate, snapshot
// assembly, user kills, birth/death adjustment, flow search,
// materialization and reporting.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "assembler.hpp"
#include "error.hpp"
#include "graph.hpp"
#include "io.hpp"
#include "lifecycle.hpp"
#include "metrics.hpp"
#include "random.hpp"
#include "sequences.hpp"
#include "transition.hpp"

namespace tcgen {

/// Sampled sequences for one timestep: `nodes` nodes split into communities
/// drawn from `sizes`, total degrees drawn from `degrees` and split by its
/// mix ratio.
struct StepGenerator {
    long long nodes = 0;
    SamplerConfig sizes;
    SamplerConfig degrees;

    void validate() const {
        if (nodes < 1)
            throw ValidationError("node count must be positive");
        sizes.validate();
        degrees.validate();
    }
};

/// User kills at one boundary: explicit node ids plus `count` further
/// nodes chosen uniformly at random.
struct KillSpec {
    std::vector<NodeId> ids;
    long long count = 0;
};

struct RunConfig {
    int timesteps = 1;
    std::uint64_t seed = 0;
    /// Exactly one of `generators` and `sequences` is non-empty. A single
    /// entry is reused for every timestep.
    std::vector<StepGenerator> generators;
    std::vector<StepSequences> sequences;
    /// Empty: no user kills. One entry: reused at every boundary.
    std::vector<KillSpec> kills;
    ShapeParams pairing_shape;
    ShapeParams temporal_shape;
    SearchConfig search;
    bool run_search = true;
    EventThresholds events;
    std::size_t repair_budget_factor = 50;
    /// Re-sample a failing timestep up to `resample_retries` times instead
    /// of stopping at the first graphability failure.
    bool interactive = false;
    std::size_t resample_retries = 10;
    bool abort_on_disconnected = false;
    /// Empty: runs/seed-<seed>-<timestamp>.
    std::string output_dir;
    bool write_files = true;

    void validate() const {
        if (timesteps < 1)
            throw ValidationError("timesteps must be >= 1");
        if (generators.empty() && sequences.empty())
            throw ValidationError("no sequences: give 'sequences' or 'sequence_file'");
        if (!generators.empty() && !sequences.empty())
            throw ValidationError("give either 'sequences' or 'sequence_file', not both");
        auto per_step = [&](std::size_t n, const char* what) {
            if (n != 1 && n < static_cast<std::size_t>(timesteps))
                throw ValidationError(std::string(what) + ": need one entry or one per timestep");
        };
        if (!generators.empty())
            per_step(generators.size(), "sequences");
        if (!sequences.empty())
            per_step(sequences.size(), "sequence file");
        for (const auto& g : generators)
            g.validate();
        for (const auto& s : sequences) {
            s.sizes.validate();
            if (s.sizes.node_count() != static_cast<long long>(s.degrees.size()))
                throw ValidationError("explicit sequences: community sizes do not sum to the node count");
        }
        if (kills.size() > 1 && kills.size() < static_cast<std::size_t>(timesteps - 1))
            throw ValidationError("kills: need one entry or one per boundary");
        for (const auto& k : kills)
            if (k.count < 0)
                throw ValidationError("kill count must be non-negative");
        pairing_shape.validate();
        temporal_shape.validate();
        search.validate();
        events.validate();
        if (repair_budget_factor < 1)
            throw ValidationError("repair budget factor must be >= 1");
    }
};

// --------------------------------------------------------------------------
// Configuration file (JSON)

namespace detail {

inline void only_keys(const nlohmann::json& j, std::initializer_list<const char*> keys, const std::string& where) {
    if (!j.is_object())
        throw ValidationError(where + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (auto k : keys)
            known = known || it.key() == k;
        if (!known)
            throw ValidationError(where + ": unknown key '" + it.key() + "'");
    }
}

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
    if (!j.contains(key))
        return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ValidationError(std::string("config key '") + key + "' has the wrong type");
    }
}

inline SamplerConfig sampler_from_json(const nlohmann::json& j, bool degrees, const std::string& where) {
    if (degrees)
        only_keys(j, {"family", "parameter", "min", "max", "trials", "mix_ratio", "mix_mode", "rounding"}, where);
    else
        only_keys(j, {"family", "parameter", "min", "max", "trials", "rounding"}, where);
    SamplerConfig s;
    s.family = parse_family(get_or<std::string>(j, "family", "uniform"));
    s.parameter = get_or(j, "parameter", s.parameter);
    s.min = get_or(j, "min", s.min);
    s.max = get_or(j, "max", s.max);
    s.trials = get_or(j, "trials", s.trials);
    s.rounding = parse_rounding(get_or<std::string>(j, "rounding", to_string(s.rounding)));
    if (degrees) {
        s.mix_ratio = get_or(j, "mix_ratio", s.mix_ratio);
        s.mix_mode = parse_mix_mode(get_or<std::string>(j, "mix_mode", to_string(s.mix_mode)));
    }
    return s;
}

inline nlohmann::json sampler_to_json(const SamplerConfig& s, bool degrees) {
    nlohmann::json j{{"family", to_string(s.family)}, {"parameter", s.parameter}, {"min", s.min},
                     {"max", s.max},                  {"trials", s.trials},       {"rounding", to_string(s.rounding)}};
    if (degrees) {
        j["mix_ratio"] = s.mix_ratio;
        j["mix_mode"] = to_string(s.mix_mode);
    }
    return j;
}

inline StepGenerator generator_from_json(const nlohmann::json& j, const std::string& where) {
    only_keys(j, {"nodes", "community_sizes", "degrees"}, where);
    if (!j.contains("nodes") || !j.contains("community_sizes") || !j.contains("degrees"))
        throw ValidationError(where + ": needs 'nodes', 'community_sizes' and 'degrees'");
    StepGenerator g;
    g.nodes = get_or<long long>(j, "nodes", 0);
    g.sizes = sampler_from_json(j.at("community_sizes"), false, where + ".community_sizes");
    g.degrees = sampler_from_json(j.at("degrees"), true, where + ".degrees");
    return g;
}

inline KillSpec kills_from_json(const nlohmann::json& j, const std::string& where) {
    only_keys(j, {"ids", "count"}, where);
    KillSpec k;
    k.ids = get_or(j, "ids", k.ids);
    k.count = get_or(j, "count", k.count);
    return k;
}

inline ShapeParams shape_from_json(const nlohmann::json& j, const std::string& where) {
    only_keys(j, {"alpha", "beta"}, where);
    ShapeParams s;
    s.alpha = get_or(j, "alpha", s.alpha);
    s.beta = get_or(j, "beta", s.beta);
    return s;
}

} // namespace detail

/// Reads a run configuration. `base` resolves a relative sequence_file.
inline RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base = {}) {
    using detail::get_or;
    detail::only_keys(j,
                      {"timesteps", "seed", "sequences", "sequence_file", "kills", "pairing_shape", "temporal_shape",
                       "search", "events", "repair_budget_factor", "interactive", "resample_retries",
                       "abort_on_disconnected", "output_dir"},
                      "config");
    RunConfig c;
    c.timesteps = get_or(j, "timesteps", c.timesteps);
    c.seed = get_or(j, "seed", c.seed);
    if (j.contains("sequences")) {
        const auto& s = j.at("sequences");
        if (s.is_array()) {
            for (std::size_t i = 0; i < s.size(); ++i)
                c.generators.push_back(detail::generator_from_json(s[i], "sequences[" + std::to_string(i) + "]"));
        } else {
            c.generators.push_back(detail::generator_from_json(s, "sequences"));
        }
    }
    if (j.contains("sequence_file")) {
        std::filesystem::path p = get_or<std::string>(j, "sequence_file", "");
        if (p.is_relative() && !base.empty())
            p = base / p;
        c.sequences = load_sequence_file(p.string());
    }
    if (j.contains("kills")) {
        const auto& k = j.at("kills");
        if (k.is_array()) {
            for (std::size_t i = 0; i < k.size(); ++i)
                c.kills.push_back(detail::kills_from_json(k[i], "kills[" + std::to_string(i) + "]"));
        } else {
            c.kills.push_back(detail::kills_from_json(k, "kills"));
        }
    }
    if (j.contains("pairing_shape"))
        c.pairing_shape = detail::shape_from_json(j.at("pairing_shape"), "pairing_shape");
    if (j.contains("temporal_shape"))
        c.temporal_shape = detail::shape_from_json(j.at("temporal_shape"), "temporal_shape");
    if (j.contains("search")) {
        const auto& s = j.at("search");
        detail::only_keys(s,
                          {"enabled", "local_tries_threshold", "global_tries_threshold", "enumeration_cap",
                           "visited_cap"},
                          "search");
        c.run_search = get_or(s, "enabled", c.run_search);
        c.search.local_tries_threshold = get_or(s, "local_tries_threshold", c.search.local_tries_threshold);
        c.search.global_tries_threshold = get_or(s, "global_tries_threshold", c.search.global_tries_threshold);
        c.search.enumeration_cap = get_or(s, "enumeration_cap", c.search.enumeration_cap);
        c.search.visited_cap = get_or(s, "visited_cap", c.search.visited_cap);
    }
    if (j.contains("events")) {
        const auto& e = j.at("events");
        detail::only_keys(e, {"continuation", "share", "dead_band"}, "events");
        c.events.continuation = get_or(e, "continuation", c.events.continuation);
        c.events.share = get_or(e, "share", c.events.share);
        c.events.dead_band = get_or(e, "dead_band", c.events.dead_band);
    }
    c.repair_budget_factor = get_or(j, "repair_budget_factor", c.repair_budget_factor);
    c.interactive = get_or(j, "interactive", c.interactive);
    c.resample_retries = get_or(j, "resample_retries", c.resample_retries);
    c.abort_on_disconnected = get_or(j, "abort_on_disconnected", c.abort_on_disconnected);
    c.output_dir = get_or(j, "output_dir", c.output_dir);
    c.validate();
    return c;
}

/// Configuration echo for the report. Explicit sequences are summarized.
inline nlohmann::json to_json(const RunConfig& c) {
    nlohmann::json j;
    j["timesteps"] = c.timesteps;
    j["seed"] = c.seed;
    if (!c.generators.empty()) {
        auto gens = nlohmann::json::array();
        for (const auto& g : c.generators)
            gens.push_back({{"nodes", g.nodes},
                            {"community_sizes", detail::sampler_to_json(g.sizes, false)},
                            {"degrees", detail::sampler_to_json(g.degrees, true)}});
        j["sequences"] = gens;
    } else {
        auto steps = nlohmann::json::array();
        for (const auto& s : c.sequences)
            steps.push_back({{"communities", s.sizes.count()}, {"nodes", s.degrees.size()}});
        j["explicit_sequences"] = steps;
    }
    auto kills = nlohmann::json::array();
    for (const auto& k : c.kills)
        kills.push_back({{"ids", k.ids}, {"count", k.count}});
    j["kills"] = kills;
    j["pairing_shape"] = {{"alpha", c.pairing_shape.alpha}, {"beta", c.pairing_shape.beta}};
    j["temporal_shape"] = {{"alpha", c.temporal_shape.alpha}, {"beta", c.temporal_shape.beta}};
    j["search"] = {{"enabled", c.run_search},
                   {"local_tries_threshold", c.search.local_tries_threshold},
                   {"global_tries_threshold", c.search.global_tries_threshold},
                   {"enumeration_cap", c.search.enumeration_cap},
                   {"visited_cap", c.search.visited_cap}};
    j["events"] = {{"continuation", c.events.continuation},
                   {"share", c.events.share},
                   {"dead_band", c.events.dead_band}};
    j["repair_budget_factor"] = c.repair_budget_factor;
    j["interactive"] = c.interactive;
    j["resample_retries"] = c.resample_retries;
    j["abort_on_disconnected"] = c.abort_on_disconnected;
    return j;
}

// --------------------------------------------------------------------------
// Transition planning

/// Node accounting across one boundary. User kills leave the network at t
/// before the flow is searched; random kills flow into the death column and
/// births come out of the birth row.
struct TransitionPlan {
    long long survivors = 0;
    long long user_kills = 0;
    long long random_kills = 0;
    long long births = 0;

    long long deaths() const { return user_kills + random_kills; }
};

/// Births when the next step needs more nodes than survive the user kills,
/// random kills when it needs fewer.
inline TransitionPlan plan_transition(long long nodes_t, long long nodes_t1, long long user_kills) {
    if (user_kills < 0 || user_kills > nodes_t)
        throw ValidationError("kill set of " + std::to_string(user_kills) + " nodes exceeds the " +
                              std::to_string(nodes_t) + " nodes alive");
    TransitionPlan p;
    p.user_kills = user_kills;
    const long long excess = nodes_t - nodes_t1 - user_kills;
    if (excess > 0)
        p.random_kills = excess;
    else
        p.births = -excess;
    p.survivors = nodes_t - p.deaths();
    return p;
}

inline TransitionPlan plan_transition(const CommunitySpec& t, const CommunitySpec& t1, long long user_kills) {
    return plan_transition(t.node_count(), t1.node_count(), user_kills);
}

// --------------------------------------------------------------------------
// Run

struct RunResult {
    RunReport report;
    std::vector<Snapshot> snapshots;
    std::filesystem::path output_dir;
};

struct RunHooks {
    std::function<void(const std::string&)> log;
};

namespace detail {

enum Stream : std::uint64_t { seq_stream = 1, assign_stream, wire_stream, kill_stream, flow_stream };

inline std::string timestamp() {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    localtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y%m%d-%H%M%S");
    return os.str();
}

inline StepSequences step_sequences(const RunConfig& cfg, int t, std::size_t attempt) {
    if (!cfg.sequences.empty()) {
        auto s = cfg.sequences[cfg.sequences.size() == 1 ? 0 : static_cast<std::size_t>(t)];
        return s;
    }
    const auto& g = cfg.generators[cfg.generators.size() == 1 ? 0 : static_cast<std::size_t>(t)];
    Rng rng = substream(cfg.seed, {seq_stream, static_cast<std::uint64_t>(t), attempt});
    StepSequences s;
    s.sizes = sample_sizes_for_nodes(g.sizes, g.nodes, rng);
    auto total = sample_degrees(g.degrees, static_cast<std::size_t>(g.nodes), rng);
    s.degrees = split_degrees(std::move(total), g.degrees.mix_ratio, g.degrees.mix_mode, g.degrees.rounding, rng);
    s.degrees = fix_parity(std::move(s.degrees), g.degrees.min, g.degrees.max, rng);
    return s;
}

inline std::vector<Node> nodes_of(const NodeAssignment& a, const std::vector<NodeId>& ids,
                                  const std::vector<int>& born_at) {
    std::vector<Node> nodes(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i)
        nodes[i] = {ids[i], a.degrees[i].total, a.degrees[i].intra, a.community[i], born_at[i]};
    return nodes;
}

// User kill set at a boundary: explicit ids (must be alive) plus random ones.
inline std::set<NodeId> user_kills(const RunConfig& cfg, const Snapshot& s) {
    if (cfg.kills.empty())
        return {};
    const auto& k = cfg.kills[cfg.kills.size() == 1 ? 0 : static_cast<std::size_t>(s.t)];
    std::set<NodeId> alive;
    for (const auto& n : s.nodes)
        alive.insert(n.id);
    std::set<NodeId> out;
    for (auto id : k.ids) {
        if (!alive.count(id))
            throw ValidationError("timestep " + std::to_string(s.t) + ": kill set names node " + std::to_string(id) +
                                  ", which is not alive");
        if (!out.insert(id).second)
            throw ValidationError("timestep " + std::to_string(s.t) + ": node " + std::to_string(id) +
                                  " listed twice in the kill set");
    }
    if (static_cast<long long>(out.size()) + k.count > static_cast<long long>(alive.size()))
        throw ValidationError("timestep " + std::to_string(s.t) + ": kill set of " +
                              std::to_string(out.size() + static_cast<std::size_t>(k.count)) + " exceeds the " +
                              std::to_string(alive.size()) + " nodes alive");
    std::vector<NodeId> rest;
    for (auto id : alive)
        if (!out.count(id))
            rest.push_back(id);
    Rng rng = substream(cfg.seed, {kill_stream, static_cast<std::uint64_t>(s.t)});
    std::shuffle(rest.begin(), rest.end(), rng);
    for (long long c = 0; c < k.count; ++c)
        out.insert(rest[static_cast<std::size_t>(c)]);
    return out;
}

struct StepOutcome {
    Snapshot snapshot;
    AssemblyStats stats;
    std::optional<BoundaryReport> boundary;
    NodeId next_id = 0;
    long long next_label = 0;
};

inline WiringOptions wiring_options(const RunConfig& cfg) {
    WiringOptions w;
    w.pairing_shape = cfg.pairing_shape;
    w.repair_budget_factor = cfg.repair_budget_factor;
    return w;
}

inline StepOutcome first_step(const RunConfig& cfg, std::size_t attempt) {
    auto seq = step_sequences(cfg, 0, attempt);
    auto gate = check_graphable(seq.sizes, seq.degrees);
    if (!gate.ok)
        throw GraphabilityError(gate.describe());
    Rng arng = substream(cfg.seed, {assign_stream, 0, attempt});
    AssignOptions ao;
    ao.temporal_shape = cfg.temporal_shape;
    auto a = assign_nodes(seq.sizes, seq.degrees, std::nullopt, ao, arng);
    std::vector<NodeId> ids(a.community.size());
    std::iota(ids.begin(), ids.end(), NodeId{0});
    std::vector<long long> labels(seq.sizes.count());
    std::iota(labels.begin(), labels.end(), 0LL);
    StepOutcome out;
    Rng wrng = substream(cfg.seed, {wire_stream, 0, attempt});
    out.snapshot = build_snapshot(0, nodes_of(a, ids, std::vector<int>(ids.size(), 0)), labels,
                                  wiring_options(cfg), wrng, &out.stats);
    out.next_id = ids.size();
    out.next_label = static_cast<long long>(labels.size());
    return out;
}

inline StepOutcome next_step(const RunConfig& cfg, const Snapshot& prev, NodeId next_id, long long next_label,
                             std::size_t attempt) {
    const int t = prev.t;
    const int t1 = t + 1;
    auto seq = step_sequences(cfg, t1, attempt);
    auto gate = check_graphable(seq.sizes, seq.degrees);
    if (!gate.ok)
        throw GraphabilityError(gate.describe());

    // user events on the network at t
    const auto killed = user_kills(cfg, prev);
    const auto plan = plan_transition(static_cast<long long>(prev.nodes.size()), seq.sizes.node_count(),
                                      static_cast<long long>(killed.size()));

    const std::size_t k = prev.community_count();
    const std::size_t l = seq.sizes.count();
    std::vector<std::vector<NodeId>> sources(k);
    std::vector<long long> killed_from(k, 0);
    std::map<NodeId, int> previous_degree;
    for (const auto& n : prev.nodes) {
        if (killed.count(n.id)) {
            ++killed_from[static_cast<std::size_t>(n.community)];
            continue;
        }
        sources[static_cast<std::size_t>(n.community)].push_back(n.id);
        previous_degree[n.id] = n.degree;
    }

    // flow system with the adjustment communities
    std::vector<long long> from, to(seq.sizes.sizes.begin(), seq.sizes.sizes.end());
    for (const auto& s : sources)
        from.push_back(static_cast<long long>(s.size()));
    std::optional<std::size_t> birth_row, death_col;
    if (plan.births > 0) {
        birth_row = from.size();
        from.push_back(plan.births);
        sources.emplace_back();
    }
    if (plan.random_kills > 0) {
        death_col = to.size();
        to.push_back(plan.random_kills);
    }
    auto sys = build_flow_system(from, to);
    auto sol = solve_flow(sys, cfg.search, cfg.run_search);

    Rng frng = substream(cfg.seed, {flow_stream, static_cast<std::uint64_t>(t1), attempt});
    NodeId fresh = next_id;
    auto moved = materialize_flow(sol.search.best, sources, birth_row, fresh, frng);

    Survivors surv;
    std::vector<NodeId> ids;
    std::vector<int> born_at;
    for (std::size_t j = 0; j < l; ++j)
        for (auto id : moved.targets[j]) {
            ids.push_back(id);
            surv.community.push_back(static_cast<int>(j));
            auto it = previous_degree.find(id);
            surv.previous_degree.push_back(it == previous_degree.end() ? std::nullopt : std::optional<int>(it->second));
            born_at.push_back(t1);
        }
    std::map<NodeId, int> born_map;
    for (const auto& n : prev.nodes)
        born_map[n.id] = n.born_at;
    for (std::size_t i = 0; i < ids.size(); ++i)
        if (auto it = born_map.find(ids[i]); it != born_map.end())
            born_at[i] = it->second;

    Rng arng = substream(cfg.seed, {assign_stream, static_cast<std::uint64_t>(t1), attempt});
    AssignOptions ao;
    ao.temporal_shape = cfg.temporal_shape;
    auto a = assign_nodes(seq.sizes, seq.degrees, surv, ao, arng);

    // realized contingency: user kills join the death column
    const bool any_death = plan.deaths() > 0;
    const std::size_t rows = k + (birth_row ? 1 : 0);
    const std::size_t cols = l + (any_death ? 1 : 0);
    FlowMatrix realized(rows, cols);
    for (std::size_t i = 0; i < sys.k(); ++i)
        for (std::size_t j = 0; j < sys.l(); ++j)
            realized(i, (death_col && j == *death_col) ? l : j) += sol.search.best(i, j);
    for (std::size_t i = 0; i < k; ++i)
        if (killed_from[i] > 0)
            realized(i, l) += killed_from[i];

    BoundaryFlow bf;
    bf.flow = realized;
    bf.from_labels = prev.community_labels;
    if (birth_row) {
        bf.from_labels.push_back(-1);
        bf.birth_row = k;
    }
    if (any_death)
        bf.death_col = l;
    StepOutcome out;
    out.next_label = next_label;
    auto labels = inherit_labels(realized, bf.from_labels, bf.birth_row, bf.death_col, cfg.events.continuation,
                                 out.next_label);
    bf.to_labels = labels;
    if (any_death)
        bf.to_labels.push_back(-1);

    Rng wrng = substream(cfg.seed, {wire_stream, static_cast<std::uint64_t>(t1), attempt});
    out.snapshot = build_snapshot(t1, nodes_of(a, ids, born_at), labels, wiring_options(cfg), wrng, &out.stats);
    out.next_id = fresh;

    BoundaryReport b;
    b.t = t;
    b.vi = sol.search.vi;
    const auto& best = best_seed(sol.seeds);
    b.seed_heuristic = best.name;
    b.seed_vi = best.vi;
    b.searched = cfg.run_search;
    b.evaluations = sol.search.evaluations;
    b.moves = sol.search.moves;
    b.births = plan.births;
    b.deaths = plan.deaths();
    if (auto c = count_lattice(sys, cfg.search.enumeration_cap))
        b.solution_count = *c;
    b.events = classify_events(bf, cfg.events);
    b.flow = std::move(bf);
    b.temporal_correlation = temporal_degree_correlation(prev, out.snapshot);
    out.boundary = std::move(b);
    return out;
}

} // namespace detail

/// Runs the whole loop. Identical configurations give identical results.
/// Graphability failures name the timestep; in interactive mode the step is
/// re-sampled from fresh random streams before giving up.
inline RunResult run(const RunConfig& cfg, const RunHooks& hooks = {}) {
    cfg.validate();
    auto log = [&](const std::string& m) {
        if (hooks.log)
            hooks.log(m);
    };
    RunResult res;
    res.report.seed = cfg.seed;
    res.report.config = to_json(cfg);
    const std::size_t attempts = cfg.interactive ? cfg.resample_retries + 1 : 1;

    NodeId next_id = 0;
    long long next_label = 0;
    for (int t = 0; t < cfg.timesteps; ++t) {
        std::optional<detail::StepOutcome> step;
        for (std::size_t attempt = 0; attempt < attempts && !step; ++attempt) {
            try {
                step = t == 0 ? detail::first_step(cfg, attempt)
                              : detail::next_step(cfg, res.snapshots.back(), next_id, next_label, attempt);
            } catch (const GraphabilityError& e) {
                const std::string msg = "timestep " + std::to_string(t) + ": " + e.what();
                if (attempt + 1 >= attempts)
                    throw GraphabilityError(msg);
                log(msg + "; re-sampling");
            } catch (const WiringError& e) {
                throw WiringError("timestep " + std::to_string(t) + ": " + e.what());
            }
        }
        if (!step->stats.disconnected_communities.empty()) {
            std::string which;
            for (auto c : step->stats.disconnected_communities)
                which += (which.empty() ? "" : ", ") + std::to_string(step->snapshot.community_labels[c]);
            const std::string msg = "timestep " + std::to_string(t) + ": disconnected communities " + which;
            if (cfg.abort_on_disconnected)
                throw WiringError(msg);
            log("warning: " + msg);
        }
        next_id = step->next_id;
        next_label = step->next_label;
        auto sr = snapshot_report(step->snapshot, step->stats.repairs);
        sr.disconnected = step->stats.disconnected_communities.size();
        res.report.snapshots.push_back(sr);
        if (step->boundary)
            res.report.boundaries.push_back(std::move(*step->boundary));
        log("timestep " + std::to_string(t) + ": " + std::to_string(step->snapshot.nodes.size()) + " nodes, " +
            std::to_string(step->snapshot.links.size()) + " links, " +
            std::to_string(step->snapshot.community_count()) + " communities");
        res.snapshots.push_back(std::move(step->snapshot));
    }

    if (cfg.write_files) {
        res.output_dir = cfg.output_dir.empty()
                             ? std::filesystem::path("runs") /
                                   ("seed-" + std::to_string(cfg.seed) + "-" + detail::timestamp())
                             : std::filesystem::path(cfg.output_dir);
        export_temporal_csv(res.snapshots, res.output_dir);
        write_report(res.report, res.output_dir);
        log("wrote " + res.output_dir.string());
    }
    return res;
}

} // namespace tcgen
