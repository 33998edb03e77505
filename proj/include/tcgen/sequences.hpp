#pragma once

// Per-timestep input sequences: community sizes, total degrees and the
// intra/inter split of every node slot, plus the supplied i.i.d. samplers.

#include <cmath>
#include <cstddef>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "random.hpp"

namespace tcgen {

/// Multiset of community sizes for one timestep.
struct CommunitySpec {
    std::vector<int> sizes;

    std::size_t count() const { return sizes.size(); }
    long long node_count() const { return std::accumulate(sizes.begin(), sizes.end(), 0LL); }

    void validate() const {
        if (sizes.empty())
            throw ValidationError("community size sequence is empty");
        for (int s : sizes)
            if (s < 1)
                throw ValidationError("community sizes must be positive");
    }
};

/// Bijective total / intra degree sequences. Inter degrees are derived.
struct DegreeSpec {
    std::vector<int> total;
    std::vector<int> intra;

    std::size_t size() const { return total.size(); }
    int inter(std::size_t i) const { return total[i] - intra[i]; }

    std::vector<int> inter_sequence() const {
        std::vector<int> f(total.size());
        for (std::size_t i = 0; i < total.size(); ++i)
            f[i] = inter(i);
        return f;
    }

    long long total_sum() const { return std::accumulate(total.begin(), total.end(), 0LL); }
    long long intra_sum() const { return std::accumulate(intra.begin(), intra.end(), 0LL); }
    long long inter_sum() const { return total_sum() - intra_sum(); }

    /// Checks every invariant including even sums.
    void validate() const {
        validate_shape();
        if (total_sum() % 2 != 0)
            throw ValidationError("sum of total degrees is odd");
        if (intra_sum() % 2 != 0)
            throw ValidationError("sum of intra degrees is odd");
    }

    /// Everything except the parity of the sums.
    void validate_shape() const {
        if (total.size() != intra.size())
            throw ValidationError("total and intra degree sequences differ in length");
        for (std::size_t i = 0; i < total.size(); ++i) {
            if (total[i] < 1)
                throw ValidationError("total degrees must be positive (no isolated nodes)");
            if (intra[i] < 0 || intra[i] > total[i])
                throw ValidationError("intra degree out of [0, total] at slot " + std::to_string(i));
        }
    }
};

enum class Family { power_law, exponential, binomial, uniform };
enum class Rounding { nearest, stochastic };
enum class MixMode { fixed, bernoulli };

inline Family parse_family(std::string_view s) {
    if (s == "power_law" || s == "power-law" || s == "powerlaw")
        return Family::power_law;
    if (s == "exponential")
        return Family::exponential;
    if (s == "binomial")
        return Family::binomial;
    if (s == "uniform")
        return Family::uniform;
    throw ValidationError("unknown sampler family '" + std::string(s) + "'");
}

inline const char* to_string(Family f) {
    switch (f) {
    case Family::power_law: return "power_law";
    case Family::exponential: return "exponential";
    case Family::binomial: return "binomial";
    case Family::uniform: return "uniform";
    }
    return "?";
}

inline Rounding parse_rounding(std::string_view s) {
    if (s == "nearest")
        return Rounding::nearest;
    if (s == "stochastic")
        return Rounding::stochastic;
    throw ValidationError("unknown rounding mode '" + std::string(s) + "'");
}

inline const char* to_string(Rounding r) { return r == Rounding::nearest ? "nearest" : "stochastic"; }

inline MixMode parse_mix_mode(std::string_view s) {
    if (s == "fixed")
        return MixMode::fixed;
    if (s == "bernoulli")
        return MixMode::bernoulli;
    throw ValidationError("unknown mix mode '" + std::string(s) + "'");
}

inline const char* to_string(MixMode m) { return m == MixMode::fixed ? "fixed" : "bernoulli"; }

/// Parameters of one supplied sampler.
///
/// `parameter` is the exponent for power laws, the rate for exponentials and
/// the success probability for binomials (ignored for uniform). Binomial
/// values are `min + Binomial(trials, parameter)`; `trials == 0` means
/// `max - min`.
struct SamplerConfig {
    Family family = Family::uniform;
    double parameter = 1.0;
    int min = 1;
    int max = 1;
    int trials = 0;
    double mix_ratio = 1.0;
    MixMode mix_mode = MixMode::fixed;
    Rounding rounding = Rounding::stochastic;

    int binomial_trials() const { return trials > 0 ? trials : max - min; }

    void validate() const {
        if (min < 1 || min > max)
            throw ValidationError("sampler bounds must satisfy 1 <= min <= max");
        if (!(mix_ratio >= 0.0 && mix_ratio <= 1.0))
            throw ValidationError("mix ratio must lie in [0, 1]");
        switch (family) {
        case Family::power_law:
            if (!std::isfinite(parameter) || parameter <= 0.0)
                throw ValidationError("power-law exponent must be positive and finite");
            break;
        case Family::exponential:
            if (!std::isfinite(parameter) || parameter <= 0.0)
                throw ValidationError("exponential rate must be positive and finite");
            break;
        case Family::binomial:
            if (!(parameter >= 0.0 && parameter <= 1.0))
                throw ValidationError("binomial success probability must lie in [0, 1]");
            if (binomial_trials() < 0 || min + binomial_trials() > max)
                throw ValidationError("binomial trials exceed the [min, max] range");
            break;
        case Family::uniform:
            break;
        }
    }
};

/// floor(x) with probability 1 - frac(x), ceil(x) otherwise.
inline long long stochastic_round(double x, Rng& rng) {
    if (!(x >= 0.0))
        throw ValidationError("stochastic_round expects a non-negative value");
    double fl = std::floor(x);
    double frac = x - fl;
    auto base = static_cast<long long>(fl);
    if (frac > 0.0 && uniform01(rng) < frac)
        ++base;
    return base;
}

inline long long round_value(double x, Rounding mode, Rng& rng) {
    if (mode == Rounding::stochastic)
        return stochastic_round(x, rng);
    return std::llround(x);
}

namespace detail {

// Inverse CDF of the continuous law truncated to [lo, hi].
inline double draw_continuous(const SamplerConfig& cfg, Rng& rng) {
    const double lo = cfg.min;
    const double hi = cfg.max;
    if (lo == hi)
        return lo;
    const double u = uniform01(rng);
    if (cfg.family == Family::power_law) {
        const double g = cfg.parameter;
        if (std::abs(g - 1.0) < 1e-12)
            return lo * std::pow(hi / lo, u);
        const double a = std::pow(lo, 1.0 - g);
        const double b = std::pow(hi, 1.0 - g);
        return std::pow(a + u * (b - a), 1.0 / (1.0 - g));
    }
    // exponential
    const double lam = cfg.parameter;
    const double span = 1.0 - std::exp(-lam * (hi - lo));
    return lo - std::log1p(-u * span) / lam;
}

} // namespace detail

/// One i.i.d. draw from the discretized family, always within [min, max].
inline int sample_value(const SamplerConfig& cfg, Rng& rng) {
    switch (cfg.family) {
    case Family::uniform:
        return std::uniform_int_distribution<int>(cfg.min, cfg.max)(rng);
    case Family::binomial:
        return cfg.min + std::binomial_distribution<int>(cfg.binomial_trials(), cfg.parameter)(rng);
    case Family::power_law:
    case Family::exponential: {
        long long v = round_value(detail::draw_continuous(cfg, rng), cfg.rounding, rng);
        return static_cast<int>(std::clamp<long long>(v, cfg.min, cfg.max));
    }
    }
    return cfg.min;
}

inline CommunitySpec sample_sizes(const SamplerConfig& cfg, std::size_t count, Rng& rng) {
    cfg.validate();
    if (count == 0)
        throw ValidationError("community count must be positive");
    CommunitySpec spec;
    spec.sizes.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        spec.sizes.push_back(sample_value(cfg, rng));
    return spec;
}

/// Draws sizes until they cover `nodes`, then trims or pads single units on
/// random communities (staying within [min, max]) so the sum is exact.
inline CommunitySpec sample_sizes_for_nodes(const SamplerConfig& cfg, long long nodes, Rng& rng) {
    cfg.validate();
    if (nodes < cfg.min)
        throw ValidationError("node count is smaller than the minimum community size");
    for (int attempt = 0; attempt < 1000; ++attempt) {
        CommunitySpec spec;
        long long sum = 0;
        while (sum < nodes) {
            spec.sizes.push_back(sample_value(cfg, rng));
            sum += spec.sizes.back();
        }
        // overshoot: shave units off communities above min
        while (sum > nodes) {
            std::vector<std::size_t> shrinkable;
            for (std::size_t i = 0; i < spec.sizes.size(); ++i)
                if (spec.sizes[i] > cfg.min)
                    shrinkable.push_back(i);
            if (shrinkable.empty()) {
                sum -= spec.sizes.back();
                spec.sizes.pop_back();
                break;
            }
            long long excess = sum - nodes;
            auto i = shrinkable[uniform_index(rng, shrinkable.size())];
            long long take = std::min<long long>(excess, spec.sizes[i] - cfg.min);
            take = 1 + static_cast<long long>(uniform_index(rng, static_cast<std::size_t>(take)));
            spec.sizes[i] -= static_cast<int>(take);
            sum -= take;
        }
        // deficit after dropping a community: pad communities below max
        while (sum < nodes) {
            std::vector<std::size_t> growable;
            for (std::size_t i = 0; i < spec.sizes.size(); ++i)
                if (spec.sizes[i] < cfg.max)
                    growable.push_back(i);
            if (growable.empty())
                break;
            auto i = growable[uniform_index(rng, growable.size())];
            ++spec.sizes[i];
            ++sum;
        }
        if (sum == nodes && !spec.sizes.empty())
            return spec;
    }
    throw ValidationError("cannot partition " + std::to_string(nodes) +
                          " nodes into communities within [min, max]");
}

/// n total degrees in [min, max]; the parity of the sum is not enforced.
inline std::vector<int> sample_degrees(const SamplerConfig& cfg, std::size_t n, Rng& rng) {
    cfg.validate();
    if (n == 0)
        throw ValidationError("degree sequence length must be positive");
    std::vector<int> d(n);
    for (auto& x : d)
        x = sample_value(cfg, rng);
    return d;
}

/// Intra degrees from a mix ratio. Fixed mode rounds r * d_i, Bernoulli mode
/// draws Binomial(d_i, r). Sums are not made even here (see fix_parity).
inline DegreeSpec split_degrees(std::vector<int> total, double ratio, MixMode mode, Rounding rounding,
                                Rng& rng) {
    if (total.empty())
        throw ValidationError("degree sequence is empty");
    if (!(ratio >= 0.0 && ratio <= 1.0))
        throw ValidationError("mix ratio must lie in [0, 1]");
    DegreeSpec spec;
    spec.intra.resize(total.size());
    for (std::size_t i = 0; i < total.size(); ++i) {
        if (total[i] < 1)
            throw ValidationError("total degrees must be positive");
        long long e = 0;
        if (mode == MixMode::fixed)
            e = round_value(ratio * total[i], rounding, rng);
        else
            e = std::binomial_distribution<int>(total[i], ratio)(rng);
        spec.intra[i] = static_cast<int>(std::clamp<long long>(e, 0, total[i]));
    }
    spec.total = std::move(total);
    return spec;
}

/// Makes both sums even with at most one +-1 change to an intra degree and
/// one +-1 change to a total degree (kept within [dmin, dmax]).
inline DegreeSpec fix_parity(DegreeSpec spec, int dmin, int dmax, Rng& rng) {
    spec.validate_shape();
    struct Move {
        std::size_t index;
        int delta;
    };
    if (spec.intra_sum() % 2 != 0) {
        std::vector<Move> moves;
        for (std::size_t i = 0; i < spec.size(); ++i) {
            if (spec.intra[i] + 1 <= spec.total[i])
                moves.push_back({i, +1});
            if (spec.intra[i] - 1 >= 0)
                moves.push_back({i, -1});
        }
        if (moves.empty())
            throw ValidationError("cannot repair odd intra-degree sum");
        auto m = moves[uniform_index(rng, moves.size())];
        spec.intra[m.index] += m.delta;
    }
    if (spec.inter_sum() % 2 != 0) {
        std::vector<Move> moves;
        for (std::size_t i = 0; i < spec.size(); ++i) {
            if (spec.total[i] + 1 <= dmax)
                moves.push_back({i, +1});
            if (spec.total[i] - 1 >= std::max({dmin, spec.intra[i], 1}))
                moves.push_back({i, -1});
        }
        if (moves.empty())
            throw ValidationError("cannot repair odd inter-degree sum within degree bounds");
        auto m = moves[uniform_index(rng, moves.size())];
        spec.total[m.index] += m.delta;
    }
    spec.validate();
    return spec;
}

/// Sequences of one timestep as read from or written to a sequence file.
struct StepSequences {
    CommunitySpec sizes;
    DegreeSpec degrees;
};

// Sequence file format:
//   - one block per timestep, blocks separated by one or more blank lines
//   - first line of a block: community sizes, whitespace separated
//   - every further line: "<total> <intra>" for one node slot
//   - '#' starts a comment that runs to the end of the line
inline std::vector<StepSequences> parse_sequences(std::istream& in) {
    std::vector<StepSequences> steps;
    std::string line;
    bool in_block = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        std::vector<long long> values;
        std::string tok;
        while (ls >> tok) {
            try {
                std::size_t used = 0;
                values.push_back(std::stoll(tok, &used));
                if (used != tok.size())
                    throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw ValidationError("sequence file line " + std::to_string(lineno) + ": bad integer '" +
                                      tok + "'");
            }
        }
        if (values.empty()) {
            in_block = false;
            continue;
        }
        if (!in_block) {
            StepSequences step;
            for (auto v : values)
                step.sizes.sizes.push_back(static_cast<int>(v));
            steps.push_back(std::move(step));
            in_block = true;
            continue;
        }
        if (values.size() != 2)
            throw ValidationError("sequence file line " + std::to_string(lineno) +
                                  ": expected '<total> <intra>'");
        steps.back().degrees.total.push_back(static_cast<int>(values[0]));
        steps.back().degrees.intra.push_back(static_cast<int>(values[1]));
    }
    for (std::size_t t = 0; t < steps.size(); ++t) {
        const auto& s = steps[t];
        s.sizes.validate();
        s.degrees.validate();
        if (s.sizes.node_count() != static_cast<long long>(s.degrees.size()))
            throw ValidationError("timestep " + std::to_string(t) +
                                  ": community sizes do not sum to the number of degree lines");
    }
    return steps;
}

inline std::vector<StepSequences> load_sequence_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open sequence file '" + path + "'");
    return parse_sequences(in);
}

inline void write_sequences(std::ostream& out, const std::vector<StepSequences>& steps) {
    for (std::size_t t = 0; t < steps.size(); ++t) {
        if (t > 0)
            out << '\n';
        out << "# timestep " << t << '\n';
        for (std::size_t i = 0; i < steps[t].sizes.sizes.size(); ++i)
            out << (i ? " " : "") << steps[t].sizes.sizes[i];
        out << '\n';
        for (std::size_t i = 0; i < steps[t].degrees.size(); ++i)
            out << steps[t].degrees.total[i] << ' ' << steps[t].degrees.intra[i] << '\n';
    }
}

} // namespace tcgen
