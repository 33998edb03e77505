// Command-line front end: generate a temporal network from a JSON config,
// check sequence files for graphability, or solve a single flow system.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tcgen/tcgen.hpp"

namespace {

using namespace tcgen;

nlohmann::json example_config() {
    return nlohmann::json::parse(R"({
  "timesteps": 5,
  "seed": 1,
  "sequences": {
    "nodes": 1000,
    "community_sizes": {"family": "power_law", "parameter": 1.5, "min": 20, "max": 200},
    "degrees": {"family": "power_law", "parameter": 2.5, "min": 5, "max": 40,
                "mix_ratio": 0.7, "mix_mode": "fixed", "rounding": "stochastic"}
  },
  "kills": {"count": 10},
  "pairing_shape": {"alpha": 1, "beta": 1},
  "temporal_shape": {"alpha": 1, "beta": 1},
  "search": {"enabled": true, "local_tries_threshold": 50, "global_tries_threshold": 10},
  "events": {"continuation": 0.3, "share": 0.1, "dead_band": 0.02}
})");
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

std::vector<long long> parse_sizes(const std::string& text) {
    std::vector<long long> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoll(tok, &used));
            if (used != tok.size())
                throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ValidationError("bad community size '" + tok + "'");
        }
    }
    return out;
}

void print_matrix(const FlowMatrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j)
            std::cout << (j ? " " : "") << m(i, j);
        std::cout << '\n';
    }
}

int cmd_generate(const std::string& config_path, std::optional<std::uint64_t> seed,
                 std::optional<std::string> output, std::optional<int> timesteps, bool no_search, bool quiet) {
    auto j = read_json(config_path);
    auto cfg = parse_run_config(j, std::filesystem::path(config_path).parent_path());
    if (seed)
        cfg.seed = *seed;
    if (output)
        cfg.output_dir = *output;
    if (timesteps)
        cfg.timesteps = *timesteps;
    if (no_search)
        cfg.run_search = false;
    RunHooks hooks;
    if (!quiet)
        hooks.log = [](const std::string& m) { std::cerr << m << '\n'; };
    auto r = run(cfg, hooks);
    std::cout << r.output_dir.string() << '\n';
    return 0;
}

int cmd_check(const std::string& path, std::uint64_t seed) {
    auto steps = load_sequence_file(path);
    int status = 0;
    for (std::size_t t = 0; t < steps.size(); ++t) {
        auto rep = check_graphable(steps[t].sizes, steps[t].degrees);
        std::string verdict = rep.describe();
        if (rep.ok) {
            // the conditions above are necessary; a realizable assignment settles it
            Rng rng = substream(seed, {t});
            try {
                assign_nodes(steps[t].sizes, steps[t].degrees, std::nullopt, {}, rng);
                verdict = "graphable";
            } catch (const GraphabilityError& e) {
                rep.ok = false;
                verdict = e.what();
            }
        }
        std::cout << "timestep " << t << ": " << verdict << '\n';
        if (!rep.ok)
            status = static_cast<int>(ExitCode::graphability);
    }
    return status;
}

int cmd_flow(const std::string& from, const std::string& to, bool count, bool no_search, std::size_t cap) {
    auto sys = build_flow_system(parse_sizes(from), parse_sizes(to));
    SearchConfig sc;
    sc.enumeration_cap = cap;
    auto sol = solve_flow(sys, sc, !no_search);
    for (const auto& s : sol.seeds)
        std::cout << "seed " << s.name << " VI " << s.vi << '\n';
    std::cout << (no_search ? "best seed" : "search") << " VI " << sol.search.vi << " (" << sol.search.evaluations
              << " evaluations, " << sol.search.moves << " moves)\n";
    print_matrix(sol.search.best);
    if (count) {
        auto c = count_lattice(sys, cap);
        if (c)
            std::cout << "lattice points " << *c << '\n';
        else
            std::cout << "lattice points > " << cap << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Temporal network generator with planted, evolving communities"};
    app.set_version_flag("--version", std::string(tcgen::version));
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output;
    std::optional<int> timesteps;
    bool no_search = false, quiet = false;
    auto* gen = app.add_subcommand("generate", "Generate a temporal network from a JSON config");
    gen->add_option("config", config_path, "Run configuration (JSON)")->required();
    gen->add_option("--seed", seed, "Override the configured seed");
    gen->add_option("-o,--output", output, "Output directory");
    gen->add_option("--timesteps", timesteps, "Override the number of timesteps");
    gen->add_flag("--no-search", no_search, "Use the best seed flow without the taboo search");
    gen->add_flag("-q,--quiet", quiet, "No progress messages");

    std::string seq_path;
    auto* check = app.add_subcommand("check", "Check every timestep of a sequence file for graphability");
    std::uint64_t check_seed = 0;
    check->add_option("file", seq_path, "Sequence file")->required();
    check->add_option("--seed", check_seed, "Seed for the assignment attempts");

    std::string from, to;
    bool count = false;
    std::size_t cap = 100000;
    auto* flow = app.add_subcommand("flow", "Solve one flow system between two community size lists");
    flow->add_option("--from", from, "Sizes at t, comma separated")->required();
    flow->add_option("--to", to, "Sizes at t+1, comma separated")->required();
    flow->add_flag("--count", count, "Count lattice points up to the cap");
    flow->add_flag("--no-search", no_search, "Stop at the best seed");
    flow->add_option("--cap", cap, "Enumeration cap");

    auto* ver = app.add_subcommand("version", "Print the version");
    app.add_subcommand("example-config", "Print an example configuration");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(tcgen::ExitCode::validation);
    }

    try {
        if (*gen)
            return cmd_generate(config_path, seed, output, timesteps, no_search, quiet);
        if (*check)
            return cmd_check(seq_path, check_seed);
        if (*flow)
            return cmd_flow(from, to, count, no_search, cap);
        if (*ver) {
            std::cout << tcgen::version << '\n';
            return 0;
        }
        std::cout << example_config().dump(2) << '\n';
        return 0;
    } catch (const tcgen::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
}
