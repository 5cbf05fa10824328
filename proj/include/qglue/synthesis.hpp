// synthesis.hpp
// Distributed chain-synthesis protocol: monomer arrival, basis selection,
// joint Born-rule measurement, shift assignment, chain overlay, glue
// counting; Monte Carlo gluing-index estimates cross-checked against the
// exact value (1 + xi)/2.
//
// Reproducibility contract: every trial owns an mt19937_64 seeded by a
// deterministic function of (master_seed, trial_index) and per-trial counts
// are merged in trial order, so estimates are bit-identical for a given
// master seed no matter how many workers run the trials.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "qglue/chsh.hpp"
#include "qglue/state.hpp"

namespace qglue {

enum class monomer_kind : unsigned { a = 0, b = 1 };
enum class shift_dir : unsigned { fwd = 0, back = 1 };  // fwd iff measurement outcome +1

inline char kind_char(monomer_kind k) { return k == monomer_kind::a ? 'a' : 'b'; }
inline char shift_char(shift_dir s) { return s == shift_dir::fwd ? '+' : '-'; }

// The shift displacement magnitude is a quarter of the monoblock length. Only
// shift parity affects gluing; the constant exists for report readability.
inline constexpr double k_shift_displacement = 0.25;

struct monoblock {
    monomer_kind kind;
    shift_dir shift;
};

struct chain {
    std::string owner_id;
    sex owner_sex = sex::first;
    std::vector<monoblock> blocks;
};

// Gluing rule: overlays aa++(--), ab++(--), bb++(--) and ba+-(-+) bond.
// Equivalently position j glues iff shiftproduct(s1,s2) equals
// sign(kind1,kind2), where the sign is -1 exactly for (b,a).
struct gluing_table {
    int sign(monomer_kind first_kind, monomer_kind second_kind) const {
        return (first_kind == monomer_kind::b && second_kind == monomer_kind::a) ? -1 : +1;
    }
    bool glues(const monoblock& m1, const monoblock& m2) const {
        const int shift_product = (m1.shift == m2.shift) ? +1 : -1;
        return shift_product == sign(m1.kind, m2.kind);
    }
};

// The arriving monomer kind selects the measurement basis. FIRST sex maps
// a -> sigma_x, b -> sigma_z. SECOND sex maps a -> Y, b -> X: the swap is the
// unique mapping under which the expected glue fraction equals (1 + xi)/2,
// because the gluing table puts its minus sign on (b, a) while the xi
// combination puts it on the (b, Y) correlator.
inline hermitian_operator kind_to_observable(monomer_kind kind, sex sx,
                                             const convention_preset& preset) {
    if (sx == sex::first) return kind == monomer_kind::a ? first_sex_a() : first_sex_b();
    return kind == monomer_kind::a ? preset.Y : preset.X;
}

struct protocol_config {
    pure_state state;
    std::vector<participant> participants;  // must cover qubits 0..n-1 exactly
    convention_preset preset;
    std::size_t length = 1;       // L, monoblocks per chain
    std::size_t trials = 1;
    std::uint64_t master_seed = 0;

    protocol_config(pure_state st, std::vector<participant> parts, convention_preset pre,
                    std::size_t len, std::size_t tr, std::uint64_t seed)
        : state(std::move(st)), participants(std::move(parts)), preset(std::move(pre)),
          length(len), trials(tr), master_seed(seed) {
        if (length < 1) throw std::invalid_argument("protocol_config: chain length must be >= 1");
        if (trials < 1) throw std::invalid_argument("protocol_config: trials must be >= 1");
        const std::size_t n = state.num_qubits();
        if (participants.size() != n) {
            throw std::invalid_argument("protocol_config: need one participant per qubit");
        }
        std::vector<bool> seen(n, false);
        for (const auto& p : participants) {
            if (p.qubit >= n || seen[p.qubit]) {
                throw std::invalid_argument("protocol_config: participant qubits must be unique and < n");
            }
            seen[p.qubit] = true;
        }
    }
};

namespace detail {

// splitmix64: the deterministic split function deriving per-trial seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) {
    return splitmix64(master_seed ^ splitmix64(trial_index + 0x51ed2701ab481765ull));
}

// Portable uniform double in [0, 1): 53 top bits of one mt19937_64 draw.
inline double uniform_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Per-kind-combo cumulative outcome tables. Combo index: participant p's kind
// occupies bit p (roster order), set for kind b. Outcome index: basis index in
// the measurement eigenbasis (bit n-1-q set means outcome -1 on qubit q).
struct sampling_tables {
    std::size_t n = 0;
    std::size_t num_participants = 0;
    std::vector<std::vector<double>> cdf;  // [combo][outcome], cumulative

    sampling_tables(const pure_state& state, const std::vector<participant>& parts,
                    const convention_preset& preset) {
        n = state.num_qubits();
        num_participants = parts.size();
        const std::size_t combos = std::size_t{1} << num_participants;
        cdf.resize(combos);
        for (std::size_t combo = 0; combo < combos; ++combo) {
            std::vector<hermitian_operator> obs;
            obs.reserve(n);
            for (std::size_t q = 0; q < n; ++q) {
                const participant* owner = nullptr;
                std::size_t owner_pos = 0;
                for (std::size_t p = 0; p < parts.size(); ++p) {
                    if (parts[p].qubit == q) {
                        owner = &parts[p];
                        owner_pos = p;
                    }
                }
                const monomer_kind kind =
                    (combo >> owner_pos) & 1u ? monomer_kind::b : monomer_kind::a;
                obs.push_back(kind_to_observable(kind, owner->sx, preset));
            }
            const born_table table = born_distribution(state, obs);
            std::vector<double> cum(table.probabilities.size());
            double acc = 0.0;
            for (std::size_t i = 0; i < cum.size(); ++i) {
                acc += table.probabilities[i];
                cum[i] = acc;
            }
            cum.back() = 1.0;  // guard against round-off at the top
            cdf[combo] = std::move(cum);
        }
    }

    std::size_t draw_outcome(std::size_t combo, double u) const {
        const std::vector<double>& c = cdf[combo];
        std::size_t i = 0;
        while (i + 1 < c.size() && u >= c[i]) ++i;
        return i;
    }
};

} // namespace detail

// One protocol round for every participant at once.
struct round_sample {
    std::vector<monomer_kind> kinds;  // roster order
    std::vector<int> outcomes;        // +1 / -1, roster order
    std::vector<shift_dir> shifts;    // fwd iff outcome +1
};

// Kinds arrive independently, uniform over {a,b}; the joint outcome follows
// the Born distribution of the kind-selected observables; shifts encode the
// outcomes. Consumes exactly two rng draws per round.
inline round_sample sample_round(const pure_state& state,
                                 const std::vector<participant>& participants,
                                 const convention_preset& preset, std::mt19937_64& rng) {
    const detail::sampling_tables tables(state, participants, preset);
    const std::size_t combo = rng() & ((std::size_t{1} << participants.size()) - 1);
    const std::size_t outcome_idx = tables.draw_outcome(combo, detail::uniform_double(rng));

    const std::size_t n = state.num_qubits();
    round_sample out;
    for (std::size_t p = 0; p < participants.size(); ++p) {
        out.kinds.push_back((combo >> p) & 1u ? monomer_kind::b : monomer_kind::a);
        const std::size_t bit =
            (outcome_idx >> qubit_bit_pos(participants[p].qubit, n)) & 1u;
        out.outcomes.push_back(bit ? -1 : +1);
        out.shifts.push_back(bit ? shift_dir::back : shift_dir::fwd);
    }
    return out;
}

// All chains of one trial, grown one round at a time; deterministic in
// (master_seed, trial_index).
inline std::vector<chain> synthesize_trial(const protocol_config& config, std::size_t trial_index) {
    const detail::sampling_tables tables(config.state, config.participants, config.preset);
    std::mt19937_64 rng(detail::trial_seed(config.master_seed, trial_index));
    const std::size_t mask = (std::size_t{1} << config.participants.size()) - 1;
    const std::size_t n = config.state.num_qubits();

    std::vector<chain> chains(config.participants.size());
    for (std::size_t p = 0; p < chains.size(); ++p) {
        chains[p].owner_id = config.participants[p].id;
        chains[p].owner_sex = config.participants[p].sx;
        chains[p].blocks.reserve(config.length);
    }
    for (std::size_t j = 0; j < config.length; ++j) {
        const std::size_t combo = rng() & mask;
        const std::size_t outcome = tables.draw_outcome(combo, detail::uniform_double(rng));
        for (std::size_t p = 0; p < chains.size(); ++p) {
            const monomer_kind kind = (combo >> p) & 1u ? monomer_kind::b : monomer_kind::a;
            const std::size_t bit =
                (outcome >> qubit_bit_pos(config.participants[p].qubit, n)) & 1u;
            chains[p].blocks.push_back(monoblock{kind, bit ? shift_dir::back : shift_dir::fwd});
        }
    }
    return chains;
}

// One chain per participant, per trial: result[trial][participant].
inline std::vector<std::vector<chain>> synthesize_chains(const protocol_config& config) {
    std::vector<std::vector<chain>> out;
    out.reserve(config.trials);
    for (std::size_t t = 0; t < config.trials; ++t) out.push_back(synthesize_trial(config, t));
    return out;
}

struct overlay_result {
    std::size_t glue_count = 0;
    double glue_fraction = 0.0;
};

// Superimposes two chains position by position and counts bonded overlays.
inline overlay_result overlay(const chain& c1, const chain& c2, const gluing_table& table) {
    if (c1.owner_sex != sex::first || c2.owner_sex != sex::second) {
        throw std::invalid_argument("overlay: expects a first-sex chain then a second-sex chain");
    }
    if (c1.blocks.size() != c2.blocks.size()) {
        throw std::invalid_argument("overlay: chain length mismatch");
    }
    overlay_result out;
    for (std::size_t j = 0; j < c1.blocks.size(); ++j) {
        if (table.glues(c1.blocks[j], c2.blocks[j])) ++out.glue_count;
    }
    out.glue_fraction = c1.blocks.empty()
                            ? 0.0
                            : static_cast<double>(out.glue_count) / static_cast<double>(c1.blocks.size());
    return out;
}

struct mc_estimate {
    double estimate = 0.0;       // mean glue fraction over trials
    double standard_error = 0.0; // across-trial sample stderr of the mean; NaN when trials < 2
    std::uint64_t glue_count = 0;
    std::size_t trials = 0;
    std::size_t length = 0;
};

// Exact oracle for the Monte Carlo estimate.
inline double exact_glue_fraction(const pure_state& state, const pair_spec& pair,
                                  const convention_preset& preset) {
    return gluing_index(xi_exact(state, pair, preset));
}

namespace detail {

struct pair_bits {
    std::size_t first_pos;   // roster position of the FIRST-sex member
    std::size_t second_pos;  // roster position of the SECOND-sex member
    std::size_t first_bit;   // outcome-index bit position of its qubit
    std::size_t second_bit;
};

inline pair_bits locate_pair(const protocol_config& config, const pair_spec& pair) {
    pair_bits pb{};
    bool found_f = false, found_s = false;
    const std::size_t n = config.state.num_qubits();
    for (std::size_t p = 0; p < config.participants.size(); ++p) {
        if (config.participants[p].qubit == pair.first.qubit) {
            pb.first_pos = p;
            pb.first_bit = qubit_bit_pos(pair.first.qubit, n);
            found_f = true;
        }
        if (config.participants[p].qubit == pair.second.qubit) {
            pb.second_pos = p;
            pb.second_bit = qubit_bit_pos(pair.second.qubit, n);
            found_s = true;
        }
    }
    if (!found_f || !found_s) throw std::invalid_argument("mc_gluing_index: pair not in the roster");
    return pb;
}

// Glue counts for every requested pair over one trial's L rounds.
inline void count_trial(const sampling_tables& tables, const std::vector<pair_bits>& pairs,
                        std::uint64_t seed, std::size_t length, std::size_t mask,
                        std::vector<std::uint64_t>& counts) {
    std::mt19937_64 rng(seed);
    for (std::size_t j = 0; j < length; ++j) {
        const std::size_t combo = rng() & mask;
        const std::size_t outcome = tables.draw_outcome(combo, uniform_double(rng));
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            const pair_bits& pb = pairs[k];
            // sign is -1 exactly for kinds (b, a); shift product is -1 iff the
            // outcome bits differ; glue iff the two negatives coincide.
            const std::size_t sigma_neg =
                ((combo >> pb.first_pos) & 1u) & (~(combo >> pb.second_pos) & 1u);
            const std::size_t shifts_differ =
                ((outcome >> pb.first_bit) ^ (outcome >> pb.second_bit)) & 1u;
            counts[k] += (sigma_neg == shifts_differ) ? 1u : 0u;
        }
    }
}

} // namespace detail

// Monte Carlo gluing indices for several pairs in one pass over the rounds.
// Trials may be distributed over `workers` threads; the per-trial counts are
// merged in trial order, so the result is identical for any worker count.
inline std::vector<mc_estimate> mc_gluing_indices(const protocol_config& config,
                                                  const std::vector<pair_spec>& pairs,
                                                  std::size_t workers = 1) {
    if (config.trials * config.length < 100) {
        throw std::invalid_argument("mc_gluing_indices: trials * length must be >= 100");
    }
    const detail::sampling_tables tables(config.state, config.participants, config.preset);
    std::vector<detail::pair_bits> pair_bits;
    pair_bits.reserve(pairs.size());
    for (const auto& p : pairs) pair_bits.push_back(detail::locate_pair(config, p));
    const std::size_t mask = (std::size_t{1} << config.participants.size()) - 1;

    // counts[trial][pair]
    std::vector<std::vector<std::uint64_t>> counts(
        config.trials, std::vector<std::uint64_t>(pairs.size(), 0));
    if (workers <= 1) {
        for (std::size_t t = 0; t < config.trials; ++t) {
            detail::count_trial(tables, pair_bits, detail::trial_seed(config.master_seed, t),
                                config.length, mask, counts[t]);
        }
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w]() {
                for (std::size_t t = w; t < config.trials; t += workers) {
                    detail::count_trial(tables, pair_bits,
                                        detail::trial_seed(config.master_seed, t), config.length,
                                        mask, counts[t]);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    std::vector<mc_estimate> out(pairs.size());
    const double len = static_cast<double>(config.length);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        double mean = 0.0;
        std::uint64_t total = 0;
        for (std::size_t t = 0; t < config.trials; ++t) {
            mean += static_cast<double>(counts[t][k]) / len;
            total += counts[t][k];
        }
        mean /= static_cast<double>(config.trials);
        double var = 0.0;
        for (std::size_t t = 0; t < config.trials; ++t) {
            const double d = static_cast<double>(counts[t][k]) / len - mean;
            var += d * d;
        }
        mc_estimate& e = out[k];
        e.estimate = mean;
        e.standard_error =
            config.trials >= 2
                ? std::sqrt(var / (static_cast<double>(config.trials) *
                                   static_cast<double>(config.trials - 1)))
                : std::numeric_limits<double>::quiet_NaN();
        e.glue_count = total;
        e.trials = config.trials;
        e.length = config.length;
    }
    return out;
}

inline mc_estimate mc_gluing_index(const protocol_config& config, const pair_spec& pair,
                                   std::size_t workers = 1) {
    return mc_gluing_indices(config, {pair}, workers)[0];
}

// ---- exports ----------------------------------------------------------------

// Summary of one Monte Carlo run against its exact oracle.
inline nlohmann::ordered_json mc_summary_json(const std::string& state_id, const pair_spec& pair,
                                              const protocol_config& config,
                                              const mc_estimate& estimate, double exact) {
    nlohmann::ordered_json j;
    j["state_id"] = state_id;
    j["pair"] = pair.label();
    j["preset"] = config.preset.name;
    j["L"] = config.length;
    j["trials"] = config.trials;
    j["seed"] = config.master_seed;
    j["estimate"] = estimate.estimate;
    j["stderr"] = estimate.standard_error;
    j["exact"] = exact;
    return j;
}

// CSV trace of synthesized chains: trial, position, participant_id, kind,
// outcome, shift. Outcomes are recoverable from shifts (fwd <=> +1).
inline std::string trace_csv(const std::vector<std::vector<chain>>& per_trial) {
    std::string out = "trial,position,participant_id,kind,outcome,shift\n";
    for (std::size_t t = 0; t < per_trial.size(); ++t) {
        for (const chain& ch : per_trial[t]) {
            for (std::size_t j = 0; j < ch.blocks.size(); ++j) {
                const monoblock& m = ch.blocks[j];
                out += std::to_string(t);
                out += ',';
                out += std::to_string(j);
                out += ',';
                out += ch.owner_id;
                out += ',';
                out += kind_char(m.kind);
                out += ',';
                out += m.shift == shift_dir::fwd ? "1" : "-1";
                out += ',';
                out += shift_char(m.shift);
                out += '\n';
            }
        }
    }
    return out;
}

} // namespace qglue
