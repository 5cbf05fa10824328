// claims.hpp
// Registry of the published multi-participant states and quoted numbers, a
// verification runner that recomputes each one (exact path, Monte Carlo path,
// optimizer path), and deterministic report emission in text, json and csv.
//
// Verdicts: confirmed iff |paper - computed| <= tolerance; refuted when a
// stated value is missed; ambiguous when the source states no value for a
// pair, or when the quoted number admits no single computed reading (in which
// case the note lists every computed candidate).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qglue/chsh.hpp"
#include "qglue/optimize.hpp"
#include "qglue/state_text.hpp"
#include "qglue/synthesis.hpp"
#include "qglue/version.hpp"

namespace qglue {

// ---- registry -------------------------------------------------------------------

// quoted: the source gives 2-3 decimals (0.85, 0.35, 1.157); exact: stated as
// an exact fraction or to machine precision
enum class claim_tolerance { quoted, exact };

struct pair_claim {
    pair_spec pair;
    std::optional<double> claimed_index;  // nullopt: no value published for this pair
    claim_tolerance kind = claim_tolerance::quoted;
};

struct paper_state {
    std::string id;
    std::string source_text;  // state text grammar, as listed
    pure_state state;
    std::vector<participant> roster;
    std::vector<pair_claim> claims;  // one per heterosexual pair, pair label order
};

namespace detail {

inline std::vector<participant> trio_roster_registry() {
    return {{"Alice", 0, sex::first}, {"Natalia", 1, sex::first}, {"Bob", 2, sex::second}};
}

inline std::vector<participant> quad_roster_registry() {
    return {{"Alice", 0, sex::first},
            {"Natasha", 1, sex::first},
            {"Bob", 2, sex::second},
            {"Ivan", 3, sex::second}};
}

struct claim_seed {
    const char* pair_label;
    double value;
};

inline paper_state make_registry_state(std::string id, std::string text,
                                       std::vector<participant> roster,
                                       const std::vector<claim_seed>& seeds,
                                       claim_tolerance kind) {
    pure_state parsed = parse_state(text);
    paper_state st{std::move(id), std::move(text), std::move(parsed), roster, {}};
    for (const pair_spec& pr : all_heterosexual_pairs(roster)) {
        pair_claim claim{pr, std::nullopt, kind};
        for (const claim_seed& s : seeds) {
            if (pr.label() == s.pair_label) claim.claimed_index = s.value;
        }
        st.claims.push_back(std::move(claim));
    }
    return st;
}

} // namespace detail

// Every listed state. Three-qubit roster: Alice, Natalia, Bob with qubits in
// that order; four-qubit roster: Alice, Natasha, Bob, Ivan. Claimed indices
// follow the accompanying prose; states whose entangled pair contradicts the
// stated legitimate pair carry no claimed values (reported as ambiguous with
// computed values only).
inline std::vector<paper_state> load_registry() {
    using detail::make_registry_state;
    const auto trio = detail::trio_roster_registry();
    const auto quad = detail::quad_roster_registry();
    const claim_tolerance quoted = claim_tolerance::quoted;
    const claim_tolerance exact = claim_tolerance::exact;

    const std::vector<detail::claim_seed> s4_legal{{"Alice-Bob", 0.85}, {"Natalia-Bob", 0.5}};
    const std::vector<detail::claim_seed> none{};
    // first group: good overlap claimed for Natasha-Bob and Alice-Ivan
    const std::vector<detail::claim_seed> g1{{"Alice-Bob", 0.5},
                                             {"Alice-Ivan", 0.85},
                                             {"Natasha-Bob", 0.85},
                                             {"Natasha-Ivan", 0.5}};
    // second group: good overlap claimed for Natasha-Ivan and Alice-Bob
    const std::vector<detail::claim_seed> g2{{"Alice-Bob", 0.85},
                                             {"Alice-Ivan", 0.5},
                                             {"Natasha-Bob", 0.5},
                                             {"Natasha-Ivan", 0.85}};
    const std::vector<detail::claim_seed> trio_half{{"Alice-Bob", 0.5}, {"Natalia-Bob", 0.5}};
    const std::vector<detail::claim_seed> quad_half{{"Alice-Bob", 0.5},
                                                    {"Alice-Ivan", 0.5},
                                                    {"Natasha-Bob", 0.5},
                                                    {"Natasha-Ivan", 0.5}};

    std::vector<paper_state> out;
    out.push_back(make_registry_state(
        "S4.1", "1/2|000> + 1/2|010> + 1/2|101> + 1/2|111>", trio, s4_legal, quoted));
    out.push_back(make_registry_state(
        "S4.2", "1/2|001> + 1/2|010> + 1/2|101> + 1/2|110>", trio, none, quoted));
    out.push_back(make_registry_state("S4.3", "1/sqrt(2)|000> + 1/sqrt(2)|011>", trio, none, quoted));
    out.push_back(make_registry_state("S4.4", "1/sqrt(2)|001> + 1/sqrt(2)|010>", trio, none, quoted));
    out.push_back(
        make_registry_state("S4.5", "1/sqrt(2)|010> + 1/sqrt(2)|111>", trio, s4_legal, quoted));
    out.push_back(
        make_registry_state("S4.6", "1/sqrt(2)|011> + 1/sqrt(2)|110>", trio, s4_legal, quoted));

    out.push_back(make_registry_state(
        "S5.G1.1", "1/2|0011> + 1/2|0110> + 1/2|1001> + 1/2|1100>", quad, g1, quoted));
    out.push_back(make_registry_state(
        "S5.G1.2", "1/2|0010> + 1/2|0111> + 1/2|1000> + 1/2|1101>", quad, g1, quoted));
    out.push_back(make_registry_state(
        "S5.G1.3", "1/2|0001> + 1/2|0100> + 1/2|1011> + 1/2|1110>", quad, g1, quoted));
    out.push_back(make_registry_state(
        "S5.G1.4", "1/2|0000> + 1/2|0101> + 1/2|1010> + 1/2|1111>", quad, g1, quoted));
    out.push_back(make_registry_state(
        "S5.G2.1", "1/2|0010> + 1/2|0100> + 1/2|1011> + 1/2|1101>", quad, g2, quoted));
    out.push_back(make_registry_state(
        "S5.G2.2", "1/2|0001> + 1/2|0111> + 1/2|1000> + 1/2|1110>", quad, g2, quoted));
    out.push_back(make_registry_state(
        "S5.G2.3", "1/2|0000> + 1/2|0110> + 1/2|1001> + 1/2|1111>", quad, g2, quoted));
    out.push_back(make_registry_state(
        "S5.G2.4", "1/2|0011> + 1/2|0101> + 1/2|1010> + 1/2|1100>", quad, g2, quoted));

    out.push_back(make_registry_state(
        "S6.3A", "1/2|000> + 1/2|001> + 1/2|110> + 1/2|111>", trio, trio_half, exact));
    out.push_back(make_registry_state(
        "S6.3B", "1/2|010> + 1/2|011> + 1/2|100> + 1/2|101>", trio, trio_half, exact));
    out.push_back(make_registry_state(
        "S6.4A", "1/2|0000> + 1/2|0011> + 1/2|1100> + 1/2|1111>", quad, quad_half, exact));
    out.push_back(make_registry_state(
        "S6.4B", "1/2|0100> + 1/2|0111> + 1/2|1000> + 1/2|1011>", quad, quad_half, exact));
    return out;
}

inline paper_state registry_state(const std::string& id) {
    for (auto& st : load_registry()) {
        if (st.id == id) return st;
    }
    throw std::invalid_argument("unknown registry state id '" + id + "'");
}

// ---- records and manifest ----------------------------------------------------------

struct mc_values {
    double estimate = 0.0;
    double standard_error = 0.0;
    std::size_t trials = 0;
    std::size_t length = 0;
};

struct claim_record {
    std::string id;
    std::optional<double> paper;
    double computed = 0.0;
    std::string preset;
    double tolerance = 0.0;
    std::string verdict;  // "confirmed" | "refuted" | "ambiguous"
    std::string note;
    std::optional<mc_values> mc;
};

struct run_manifest {
    std::string version;
    std::uint64_t seed = 0;
    std::string preset;
    std::string preset_policy;
    double tolerance_quoted = 5e-3;
    double tolerance_exact = 1e-9;
    std::size_t trials = 0;
    std::size_t length = 0;
    std::string timestamp;
};

struct verification_run {
    run_manifest manifest;
    std::vector<claim_record> records;
};

inline int exit_code_for(const std::vector<claim_record>& records) {
    bool refuted = false, ambiguous = false;
    for (const auto& r : records) {
        refuted |= r.verdict == "refuted";
        ambiguous |= r.verdict == "ambiguous";
    }
    if (refuted) return 2;
    if (ambiguous) return 3;
    return 0;
}

// ---- verification runner -------------------------------------------------------------

struct verify_options {
    std::string preset_policy = "calibrated";  // "calibrated" | "fixed"
    std::string preset_name = "triplet-cal";   // consulted when policy is "fixed"
    std::uint64_t seed = 12345;
    std::size_t trials = 40;
    std::size_t length = 2500;
    double tolerance_quoted = 5e-3;  // for values the source quotes to 2-3 decimals
    double tolerance_exact = 1e-9;   // for values stated exactly
    std::string timestamp;      // recorded verbatim; supply a fixed value for reproducible reports
    search_options search;      // forwarded to the family/min-max searches
};

namespace detail {

// round-trip precision, for machine formats
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// display precision, for the text report
inline std::string display_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline std::string basic_verdict(const std::optional<double>& paper, double computed,
                                 double tolerance) {
    if (!paper) return "ambiguous";
    return std::abs(*paper - computed) <= tolerance ? "confirmed" : "refuted";
}

// For a refuted pair claim, name any preset that would reproduce the claimed
// value; the mismatch is then a sign-convention difference, not a new number.
inline std::string cross_preset_note(const pure_state& state, const pair_spec& pair,
                                     double claimed, double tolerance,
                                     const std::string& used_preset) {
    for (const auto& preset : all_presets()) {
        if (preset.name == used_preset) continue;
        const double idx = gluing_index(xi_exact(state, pair, preset));
        if (std::abs(idx - claimed) <= tolerance) {
            return "claimed value matches preset " + preset.name + " (computed " +
                   format_double(idx) + " there)";
        }
    }
    return "no preset reproduces the claimed value";
}

} // namespace detail

// Recomputes every registry pair index (exact and Monte Carlo) and every
// scalar quote. Individual mismatches become refuted/ambiguous records; the
// run itself never fails. Per-state Monte Carlo seeds derive from the master
// seed and the state's registry position, so reports reproduce bit-exactly.
inline verification_run verify_all(const verify_options& opt = {}) {
    convention_preset preset = preset_section2();
    if (opt.preset_policy == "calibrated") {
        preset = calibrate_convention(default_calibration_anchor()).best;
    } else if (opt.preset_policy == "fixed") {
        preset = preset_by_name(opt.preset_name);
    } else {
        throw std::invalid_argument("verify_all: preset policy must be 'calibrated' or 'fixed'");
    }

    verification_run run;
    run.manifest = run_manifest{version_string,       opt.seed,           preset.name,
                                opt.preset_policy,    opt.tolerance_quoted, opt.tolerance_exact,
                                opt.trials,           opt.length,         opt.timestamp};

    // per-state, per-pair claims
    const std::vector<paper_state> registry = load_registry();
    for (std::size_t k = 0; k < registry.size(); ++k) {
        const paper_state& st = registry[k];
        std::vector<pair_spec> pairs;
        for (const auto& c : st.claims) pairs.push_back(c.pair);
        const protocol_config config(st.state, st.roster, preset, opt.length, opt.trials,
                                     detail::splitmix64(opt.seed + k));
        const std::vector<mc_estimate> estimates = mc_gluing_indices(config, pairs);

        for (std::size_t i = 0; i < st.claims.size(); ++i) {
            const pair_claim& claim = st.claims[i];
            claim_record rec;
            rec.id = st.id + ":" + claim.pair.label();
            rec.paper = claim.claimed_index;
            rec.computed = gluing_index(xi_exact(st.state, claim.pair, preset));
            rec.preset = preset.name;
            rec.tolerance = claim.kind == claim_tolerance::exact ? opt.tolerance_exact
                                                                 : opt.tolerance_quoted;
            rec.verdict = detail::basic_verdict(rec.paper, rec.computed, rec.tolerance);
            if (rec.verdict == "ambiguous") {
                rec.note = "no claimed value published; computed value reported";
            } else if (rec.verdict == "refuted") {
                rec.note = detail::cross_preset_note(st.state, claim.pair, *rec.paper,
                                                     rec.tolerance, preset.name);
            }
            rec.mc = mc_values{estimates[i].estimate, estimates[i].standard_error, opt.trials,
                               opt.length};
            run.records.push_back(std::move(rec));
        }
    }

    // scalar quotes
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const participant alice{"Alice", 0, sex::first};
    const participant bob1{"Bob", 1, sex::second};
    const auto trio = detail::trio_roster_registry();
    const auto quad = detail::quad_roster_registry();
    const std::vector<pair_spec> trio_pairs = all_heterosexual_pairs(trio);
    const std::vector<pair_spec> quad_pairs = all_heterosexual_pairs(quad);
    const pure_state triplet = parse_state("1/sqrt(2)|01> + 1/sqrt(2)|10>");
    const pair_spec bell_pair = make_pair(alice, bob1, true);

    auto push_scalar = [&](std::string id, double paper, double computed, double tol,
                           std::string note = "", std::string forced_verdict = "") {
        claim_record rec;
        rec.id = std::move(id);
        rec.paper = paper;
        rec.computed = computed;
        rec.preset = preset.name;
        rec.tolerance = tol;
        rec.verdict = forced_verdict.empty() ? detail::basic_verdict(rec.paper, computed, tol)
                                             : std::move(forced_verdict);
        rec.note = std::move(note);
        run.records.push_back(std::move(rec));
    };

    push_scalar("tsirelson-xi-triplet", inv_sqrt2, xi_exact(triplet, bell_pair, preset).value,
                opt.tolerance_exact);
    push_scalar("tsirelson-max-single-pair", inv_sqrt2,
                max_unrestricted(objective::single_pair_xi(bell_pair), 2, preset).value, opt.tolerance_exact);
    push_scalar("classical-single-pair-xi", 0.5,
                classical_bound(objective::single_pair_xi(bell_pair), {alice, bob1}).value, opt.tolerance_exact);
    push_scalar("classical-single-pair-index", 0.75,
                classical_bound(objective::sum_index({bell_pair}), {alice, bob1}).value, opt.tolerance_exact);
    push_scalar("classical-sum-three", 1.5,
                classical_bound(objective::sum_index(trio_pairs), trio).value, opt.tolerance_exact);
    push_scalar("classical-sum-four", 3.0,
                classical_bound(objective::sum_index(quad_pairs), quad).value, opt.tolerance_exact);

    // legal Alice-Bob block with a lone bystander: configuration value and
    // family maximum of the differentiation objective
    const block_partition trio_partition{{{trio[0], trio[2]}, {trio[1]}}};
    const objective diff =
        objective::differentiation(make_pair(trio[0], trio[2], true), {make_pair(trio[1], trio[2])});
    const std::vector<cplx> t_block{cplx{0, 0}, cplx{inv_sqrt2, 0}, cplx{inv_sqrt2, 0}, cplx{0, 0}};
    const std::vector<cplx> ket0{cplx{1, 0}, cplx{0, 0}};
    const pure_state diff_config = detail::assemble_product_state(trio_partition, {t_block, ket0});
    push_scalar("s4-differentiation-config", 0.35, evaluate_objective(diff, diff_config, preset),
                opt.tolerance_quoted);

    const optimization_result diff_max = max_biphoton_family(diff, trio_partition, preset, opt.search);
    push_scalar("s4-differentiation-family-max", 0.35, diff_max.value, opt.tolerance_quoted,
                "family maximum (2+sqrt(2))/8 = 0.42677669529663687 exceeds the quoted 0.35; "
                "the quoted value is the triplet-block configuration "
                "(see s4-differentiation-config)");

    // the quoted three-participant sum names no optimization domain: compute
    // all three and confirm only if one matches
    {
        const objective sum3 = objective::sum_index(trio_pairs);
        const double unrestricted = max_unrestricted(sum3, 3, preset).value;
        const double family = max_biphoton_family(sum3, trio_partition, preset, opt.search).value;
        const double classical = classical_bound(sum3, trio).value;
        const double paper = 1.157;
        const double tol = opt.tolerance_quoted;
        std::string matched;
        double computed = unrestricted;
        if (std::abs(unrestricted - paper) <= tol) matched = "unrestricted";
        else if (std::abs(family - paper) <= tol) { matched = "biphoton-product"; computed = family; }
        else if (std::abs(classical - paper) <= tol) { matched = "classical"; computed = classical; }
        if (!matched.empty()) {
            push_scalar("s4-sum-three-domains", paper, computed, tol,
                        "matches the " + matched + " maximum");
        } else {
            push_scalar("s4-sum-three-domains", paper, computed, tol,
                        "optimization domain unstated; computed maxima: unrestricted " +
                            detail::format_double(unrestricted) + ", biphoton-product " +
                            detail::format_double(family) + ", classical " +
                            detail::format_double(classical) + "; none matches 1.157",
                        "ambiguous");
        }
    }

    // four-participant sum: the two-triplet configuration reproduces the
    // quoted 2 + 1/sqrt(2) exactly; the family maximum exceeds it
    const block_partition quad_partition{{{quad[0], quad[2]}, {quad[1], quad[3]}}};
    const objective sum4 = objective::sum_index(quad_pairs);
    const pure_state sum4_config =
        detail::assemble_product_state(quad_partition, {t_block, t_block});
    push_scalar("s5-sum-bell-config", 2.7071067811865475,
                evaluate_objective(sum4, sum4_config, preset), opt.tolerance_exact);
    const optimization_result sum4_max =
        max_biphoton_family(sum4, quad_partition, preset, opt.search);
    push_scalar("s5-sum-family-max", 2.7071067811865475, sum4_max.value, opt.tolerance_exact,
                "family maximum 2 + 9 sqrt(2)/16 = 2.7954951288348662 exceeds the quoted value; "
                "the quoted value is the two-triplet configuration "
                "(see s5-sum-bell-config)");

    // the minimal-overlap states do reach 0.5 on every pair (see the S6
    // records), but 0.5 is not the minimum over all states
    const optimization_result minmax =
        min_all_pairs(strategy_space::unrestricted(), quad_pairs, preset, opt.search);
    push_scalar("s6-min-max-index", 0.5, minmax.value, opt.tolerance_exact,
                "the listed states keep every pair at exactly 0.5, but the bottom eigenvector "
                "of the summed pair operator reaches max-pair index 0.25, so 0.5 is not the "
                "minimum over all states; the quoted 'minimum possible' admits no single reading",
                "ambiguous");

    std::sort(run.records.begin(), run.records.end(),
              [](const claim_record& a, const claim_record& b) { return a.id < b.id; });
    return run;
}

// ---- report emission ------------------------------------------------------------------

namespace detail {

inline nlohmann::ordered_json manifest_json(const run_manifest& m) {
    nlohmann::ordered_json j;
    j["version"] = m.version;
    j["seed"] = m.seed;
    j["preset"] = m.preset;
    j["preset_policy"] = m.preset_policy;
    j["tolerance_quoted"] = m.tolerance_quoted;
    j["tolerance_exact"] = m.tolerance_exact;
    j["trials"] = m.trials;
    j["length"] = m.length;
    j["timestamp"] = m.timestamp;
    return j;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string section_of(const std::string& id) {
    if (id.rfind("S4", 0) == 0) return "section 4";
    if (id.rfind("S5", 0) == 0) return "section 5";
    if (id.rfind("S6", 0) == 0) return "section 6";
    return "scalar quotes";
}

} // namespace detail

inline std::string emit_report(const verification_run& run, const std::string& format) {
    if (run.records.empty()) throw std::invalid_argument("emit_report: no records");

    if (format == "json") {
        nlohmann::ordered_json j;
        j["manifest"] = detail::manifest_json(run.manifest);
        j["claims"] = nlohmann::ordered_json::array();
        for (const auto& r : run.records) {
            nlohmann::ordered_json c;
            c["id"] = r.id;
            if (r.paper) c["paper"] = *r.paper;
            else c["paper"] = nullptr;
            c["computed"] = r.computed;
            c["tolerance"] = r.tolerance;
            c["verdict"] = r.verdict;
            c["note"] = r.note;
            if (r.mc) {
                c["mc"] = {{"estimate", r.mc->estimate},
                           {"stderr", r.mc->standard_error},
                           {"trials", r.mc->trials},
                           {"length", r.mc->length}};
            }
            j["claims"].push_back(std::move(c));
        }
        return j.dump(2) + "\n";
    }

    if (format == "csv") {
        std::string out =
            "id,paper,computed,tolerance,preset,verdict,note,mc_estimate,mc_stderr,mc_trials,mc_length\n";
        for (const auto& r : run.records) {
            out += detail::csv_field(r.id);
            out += ',';
            out += r.paper ? detail::format_double(*r.paper) : "";
            out += ',';
            out += detail::format_double(r.computed);
            out += ',';
            out += detail::format_double(r.tolerance);
            out += ',';
            out += r.preset;
            out += ',';
            out += r.verdict;
            out += ',';
            out += detail::csv_field(r.note);
            if (r.mc) {
                out += ',';
                out += detail::format_double(r.mc->estimate);
                out += ',';
                out += detail::format_double(r.mc->standard_error);
                out += ',';
                out += std::to_string(r.mc->trials);
                out += ',';
                out += std::to_string(r.mc->length);
            } else {
                out += ",,,,";
            }
            out += '\n';
        }
        return out;
    }

    if (format == "text") {
        std::string out = "verification run: version " + run.manifest.version + ", preset " +
                          run.manifest.preset + " (" + run.manifest.preset_policy + "), seed " +
                          std::to_string(run.manifest.seed) + ", trials " +
                          std::to_string(run.manifest.trials) + ", length " +
                          std::to_string(run.manifest.length);
        if (!run.manifest.timestamp.empty()) out += ", timestamp " + run.manifest.timestamp;
        out += "\ntolerances: quoted " + detail::display_double(run.manifest.tolerance_quoted) +
               ", exact " + detail::display_double(run.manifest.tolerance_exact) + "\n";

        std::string section;
        std::size_t confirmed = 0, refuted = 0, ambiguous = 0;
        for (const auto& r : run.records) {
            const std::string s = detail::section_of(r.id);
            if (s != section) {
                section = s;
                out += "\n[" + section + "]\n";
            }
            const char* marker = r.verdict == "confirmed" ? "ok" : r.verdict == "refuted" ? "!!" : "??";
            (r.verdict == "confirmed" ? confirmed : r.verdict == "refuted" ? refuted : ambiguous) += 1;
            out += "  ";
            out += marker;
            out += " " + r.id + "  paper ";
            out += r.paper ? detail::display_double(*r.paper) : "(unspecified)";
            out += "  computed " + detail::display_double(r.computed);
            if (r.paper) {
                out += "  residual " + detail::display_double(std::abs(*r.paper - r.computed));
            }
            if (r.mc) {
                out += "  mc " + detail::display_double(r.mc->estimate) + " (se " +
                       detail::display_double(r.mc->standard_error) + ")";
            }
            out += "  " + r.verdict;
            if (!r.note.empty()) out += " -- " + r.note;
            out += '\n';
        }
        out += "\nsummary: " + std::to_string(confirmed) + " confirmed, " + std::to_string(refuted) +
               " refuted, " + std::to_string(ambiguous) + " ambiguous\n";
        bool any_unspecified = false;
        for (const auto& r : run.records) any_unspecified |= !r.paper.has_value();
        if (any_unspecified) {
            out += "footnote: the source's structural rule for recognizing the legitimate pair "
                   "is not implementable as stated; states without a published per-pair value "
                   "are listed with computed indices only.\n";
        }
        return out;
    }

    throw std::invalid_argument("emit_report: unknown format '" + format + "'");
}

// Parses a csv report back into records (numeric fields round-trip exactly).
inline std::vector<claim_record> parse_claims_csv(const std::string& csv) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < csv.size(); ++i) {
        const char c = csv[i];
        if (quoted) {
            if (c == '"' && i + 1 < csv.size() && csv[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            fields.push_back(std::move(field));
            field.clear();
            rows.push_back(std::move(fields));
            fields.clear();
        } else {
            field += c;
        }
    }
    if (rows.empty()) throw std::invalid_argument("parse_claims_csv: empty document");

    std::vector<claim_record> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {  // rows[0] is the header
        const auto& row = rows[r];
        if (row.size() != 11) throw std::invalid_argument("parse_claims_csv: wrong column count");
        claim_record rec;
        rec.id = row[0];
        if (!row[1].empty()) rec.paper = std::stod(row[1]);
        rec.computed = std::stod(row[2]);
        rec.tolerance = std::stod(row[3]);
        rec.preset = row[4];
        rec.verdict = row[5];
        rec.note = row[6];
        if (!row[7].empty()) {
            rec.mc = mc_values{std::stod(row[7]), std::stod(row[8]),
                               static_cast<std::size_t>(std::stoull(row[9])),
                               static_cast<std::size_t>(std::stoull(row[10]))};
        }
        out.push_back(std::move(rec));
    }
    return out;
}

} // namespace qglue
