// qglue: command-line driver.
//
//   qglue verify      run the full published-claims verification and report
//   qglue simulate    Monte Carlo gluing estimate for one state (vs exact)
//   qglue optimize    maximize/minimize one objective over a strategy space
//   qglue show-state  registry lookup / state-file pretty-print
//
// Exit codes: 0 all confirmed (or subcommand succeeded), 2 at least one
// refuted claim, 3 ambiguous-only, 1 usage or config error.

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qglue/claims.hpp"

namespace {

using namespace qglue;

// Flat key=value config support: keys name CLI flags of whatever subcommand
// was invoked; command-line flags override file values. Sectioned [subcommand]
// keys keep working through the stock TOML reader.
struct flat_config : CLI::ConfigTOML {
    const CLI::App* app = nullptr;

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        std::vector<CLI::ConfigItem> items = CLI::ConfigTOML::from_config(input);
        std::vector<std::string> parsed;
        for (const CLI::App* s : app->get_subcommands()) {  // parsed subcommands only
            parsed = {s->get_name()};
            break;
        }
        for (auto& item : items) {
            if (item.parents.empty() && !parsed.empty()) item.parents = parsed;
        }
        return items;
    }
};

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_output(const std::string& document, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << document;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file '" + out_path + "'");
    f << document;
}

// default roster for states loaded from files, by register size
std::vector<participant> default_roster(std::size_t n) {
    switch (n) {
        case 2: return {{"Alice", 0, sex::first}, {"Bob", 1, sex::second}};
        case 3: return detail::trio_roster_registry();
        case 4: return detail::quad_roster_registry();
        default: throw std::invalid_argument("no default roster for " + std::to_string(n) + " qubits");
    }
}

convention_preset resolve_preset(const std::string& name) {
    if (name == "calibrated") return calibrate_convention(default_calibration_anchor()).best;
    return preset_by_name(name);
}

struct state_source {
    std::string id;      // registry id, or file stem for --state-file
    pure_state state;
    std::vector<participant> roster;
};

state_source load_state(const std::string& registry_id, const std::string& file) {
    if (registry_id.empty() == file.empty()) {
        throw CLI::ValidationError("state", "give exactly one of --state or --state-file");
    }
    if (!registry_id.empty()) {
        const paper_state st = registry_state(registry_id);
        return {st.id, st.state, st.roster};
    }
    std::ifstream f(file);
    if (!f) throw std::runtime_error("cannot open state file '" + file + "'");
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    const pure_state st = parse_state(text);
    return {file, st, default_roster(st.num_qubits())};
}

int run_verify(const verify_options& opt, const std::string& format, const std::string& out_path) {
    const verification_run run = verify_all(opt);
    write_output(emit_report(run, format), out_path);
    return exit_code_for(run.records);
}

int run_simulate(const state_source& src, const std::string& pair_label,
                 const convention_preset& preset, std::uint64_t seed, std::size_t trials,
                 std::size_t length, const std::string& format, const std::string& out_path) {
    std::vector<pair_spec> pairs = all_heterosexual_pairs(src.roster);
    if (!pair_label.empty()) {
        std::vector<pair_spec> chosen;
        for (const auto& p : pairs) {
            if (p.label() == pair_label) chosen.push_back(p);
        }
        if (chosen.empty()) {
            throw std::invalid_argument("pair '" + pair_label + "' not found; choices: " +
                                        [&] {
                                            std::string s;
                                            for (const auto& p : pairs) s += p.label() + " ";
                                            return s;
                                        }());
        }
        pairs = std::move(chosen);
    }

    const protocol_config config(src.state, src.roster, preset, length, trials, seed);
    const std::vector<mc_estimate> estimates = mc_gluing_indices(config, pairs);

    if (format == "json") {
        nlohmann::ordered_json j = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const double exact = gluing_index(xi_exact(src.state, pairs[i], preset));
            j.push_back(mc_summary_json(src.id, pairs[i], config, estimates[i], exact));
        }
        write_output(j.dump(2) + "\n", out_path);
        return 0;
    }
    if (format != "text") throw std::invalid_argument("simulate: format must be text or json");

    std::string out = "state " + src.id + ", preset " + preset.name + ", trials " +
                      std::to_string(trials) + ", length " + std::to_string(length) + ", seed " +
                      std::to_string(seed) + "\n";
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const double exact = gluing_index(xi_exact(src.state, pairs[i], preset));
        out += "  " + pairs[i].label() + "  estimate " +
               detail::format_double(estimates[i].estimate) + "  stderr " +
               detail::format_double(estimates[i].standard_error) + "  exact " +
               detail::format_double(exact) + "\n";
    }
    write_output(out, out_path);
    return 0;
}

int run_optimize(const std::string& objective_name, const std::string& space_name,
                 std::size_t participants, const convention_preset& preset,
                 const search_options& search, const std::string& format,
                 const std::string& out_path) {
    const std::vector<participant> roster = default_roster(participants);
    const std::vector<pair_spec> pairs = all_heterosexual_pairs(roster);

    // standard partition: legal Alice-Bob block, remaining participants paired
    // in roster order (or single)
    auto partition = [&]() -> block_partition {
        if (participants == 2) return block_partition{{{roster[0], roster[1]}}};
        if (participants == 3) return block_partition{{{roster[0], roster[2]}, {roster[1]}}};
        return block_partition{{{roster[0], roster[2]}, {roster[1], roster[3]}}};
    };

    objective obj = [&] {
        if (objective_name == "single-pair-xi") {
            return objective::single_pair_xi(pairs.front());
        }
        if (objective_name == "sum-index") return objective::sum_index(pairs);
        if (objective_name == "differentiation") {
            if (pairs.size() < 2) {
                throw std::invalid_argument("differentiation needs at least 3 participants");
            }
            const pair_spec legal = make_pair(roster[0], roster[2], true);  // Alice-Bob
            std::vector<pair_spec> illegal;
            for (const auto& p : pairs) {
                if (p.label() != legal.label()) illegal.push_back(p);
            }
            return objective::differentiation(legal, illegal);
        }
        if (objective_name == "min-max-index") return objective::min_max_index(pairs);
        throw std::invalid_argument("unknown objective '" + objective_name + "'");
    }();

    strategy_space space = [&] {
        if (space_name == "unrestricted") return strategy_space::unrestricted();
        if (space_name == "biphoton") return strategy_space::biphoton(partition());
        if (space_name == "classical") return strategy_space::classical();
        throw std::invalid_argument("unknown strategy space '" + space_name + "'");
    }();

    optimization_result result = [&] {
        if (obj.kind == objective_kind::min_max_index) {
            return min_all_pairs(space, pairs, preset, search);
        }
        switch (space.tag) {
            case strategy_space::kind::unrestricted_pure:
                if (!obj.linear()) {
                    throw std::invalid_argument(
                        "objective '" + objective_name +
                        "' is not linear; use --space biphoton or classical");
                }
                return max_unrestricted(obj, participants, preset);
            case strategy_space::kind::biphoton_product:
                return max_biphoton_family(obj, *space.partition, preset, search);
            case strategy_space::kind::classical_deterministic:
                return classical_bound(obj, roster);
        }
        throw std::logic_error("unreachable");
    }();

    if (format == "json") {
        write_output(optimization_json(obj, space, preset, result).dump(2) + "\n", out_path);
        return 0;
    }
    if (format != "text") throw std::invalid_argument("optimize: format must be text or json");
    std::string out = "objective " + obj.label() + "\nspace " + space.label() + "\npreset " +
                      preset.name + "\nvalue " + detail::format_double(result.value) + "\nmethod " +
                      result.method + "\nargmax " + result.argmax_text + "\nrestarts " +
                      std::to_string(result.restarts_used) + "\nresidual " +
                      detail::format_double(result.residual) + "\n";
    write_output(out, out_path);
    return 0;
}

int run_show_state(const state_source& src, const convention_preset& preset,
                   const std::string& format, const std::string& out_path) {
    const std::vector<pair_spec> pairs = all_heterosexual_pairs(src.roster);
    std::optional<paper_state> reg;
    try {
        reg = registry_state(src.id);
    } catch (const std::invalid_argument&) {
        // file-loaded state: no registry entry
    }

    if (format == "json") {
        nlohmann::ordered_json j;
        j["id"] = src.id;
        j["state"] = format_state(src.state);
        j["num_qubits"] = src.state.num_qubits();
        j["preset"] = preset.name;
        j["roster"] = nlohmann::ordered_json::array();
        for (const auto& p : src.roster) {
            j["roster"].push_back(
                {{"id", p.id}, {"qubit", p.qubit}, {"sex", sex_name(p.sx)}});
        }
        j["pairs"] = nlohmann::ordered_json::array();
        for (const auto& pr : pairs) {
            nlohmann::ordered_json e;
            e["pair"] = pr.label();
            e["xi"] = xi_exact(src.state, pr, preset).value;
            e["index"] = gluing_index(xi_exact(src.state, pr, preset));
            if (reg) {
                for (const auto& c : reg->claims) {
                    if (c.pair.label() == pr.label() && c.claimed_index) {
                        e["claimed"] = *c.claimed_index;
                    }
                }
            }
            j["pairs"].push_back(std::move(e));
        }
        write_output(j.dump(2) + "\n", out_path);
        return 0;
    }
    if (format != "text") throw std::invalid_argument("show-state: format must be text or json");

    std::string out = src.id + ": " + format_state(src.state) + "\n";
    out += "roster:";
    for (const auto& p : src.roster) {
        out += " " + p.id + "(q" + std::to_string(p.qubit) + "," + sex_name(p.sx) + ")";
    }
    out += "\npreset " + preset.name + "\n";
    for (const auto& pr : pairs) {
        const double xi = xi_exact(src.state, pr, preset).value;
        out += "  " + pr.label() + "  xi " + detail::display_double(xi) + "  index " +
               detail::display_double(gluing_index(xi_value(xi)));
        if (reg) {
            for (const auto& c : reg->claims) {
                if (c.pair.label() == pr.label() && c.claimed_index) {
                    out += "  claimed " + detail::display_double(*c.claimed_index);
                }
            }
        }
        out += "\n";
    }
    write_output(out, out_path);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"entangled-pair gluing toolkit: verification, simulation, optimization"};
    app.require_subcommand(1);
    auto config_fmt = std::make_shared<flat_config>();
    config_fmt->app = &app;
    app.config_formatter(config_fmt);
    app.set_config("--config", "", "flat key=value config file; command-line flags override");

    // verify -----------------------------------------------------------------
    auto* verify = app.add_subcommand("verify", "recompute every published claim and report");
    verify_options vopt;
    vopt.timestamp = utc_now();
    std::string v_preset = "calibrated";
    std::string v_format = "text";
    std::string v_out;
    verify->fallthrough();
    verify->add_option("--preset", v_preset,
                       "sign-convention preset name, or 'calibrated' to choose by anchor");
    verify->add_option("--seed", vopt.seed, "master seed for the Monte Carlo column");
    verify->add_option("--trials", vopt.trials, "Monte Carlo trials per state");
    verify->add_option("--length", vopt.length, "chain length L per trial");
    verify->add_option("--tolerance", vopt.tolerance_quoted,
                       "tolerance for values quoted to 2-3 decimals (default 5e-3)");
    verify->add_option("--format", v_format, "text | json | csv")
        ->check(CLI::IsMember({"text", "json", "csv"}));
    verify->add_option("--out", v_out, "write the report here instead of stdout");
    verify->add_option("--timestamp", vopt.timestamp,
                       "timestamp recorded in the manifest (default: now, UTC)");

    // simulate ---------------------------------------------------------------
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo gluing estimate vs exact");
    std::string s_state, s_file, s_pair;
    std::string s_preset = "calibrated";
    std::string s_format = "text";
    std::string s_out;
    std::uint64_t s_seed = 12345;
    std::size_t s_trials = 40, s_length = 2500;
    simulate->fallthrough();
    simulate->add_option("--state", s_state, "registry state id (see show-state)");
    simulate->add_option("--state-file", s_file, "file holding a state in the text grammar");
    simulate->add_option("--pair", s_pair, "pair label, e.g. Alice-Bob (default: all pairs)");
    simulate->add_option("--preset", s_preset, "preset name or 'calibrated'");
    simulate->add_option("--seed", s_seed, "master seed");
    simulate->add_option("--trials", s_trials, "number of trials");
    simulate->add_option("--length", s_length, "chain length L per trial");
    simulate->add_option("--format", s_format, "text | json")
        ->check(CLI::IsMember({"text", "json"}));
    simulate->add_option("--out", s_out, "output file (default stdout)");

    // optimize ---------------------------------------------------------------
    auto* optimize = app.add_subcommand("optimize", "extremize an objective over a strategy space");
    std::string o_objective = "sum-index";
    std::string o_space = "unrestricted";
    std::string o_preset = "calibrated";
    std::string o_format = "text";
    std::string o_out;
    std::size_t o_participants = 4;
    search_options o_search;
    optimize->fallthrough();
    optimize->add_option("--objective", o_objective,
                         "single-pair-xi | sum-index | differentiation | min-max-index")
        ->check(CLI::IsMember({"single-pair-xi", "sum-index", "differentiation", "min-max-index"}));
    optimize->add_option("--space", o_space, "unrestricted | biphoton | classical")
        ->check(CLI::IsMember({"unrestricted", "biphoton", "classical"}));
    optimize->add_option("--participants", o_participants, "roster size: 2, 3 or 4")
        ->check(CLI::Range(std::size_t{2}, std::size_t{4}));
    optimize->add_option("--preset", o_preset, "preset name or 'calibrated'");
    optimize->add_option("--restarts", o_search.restarts, "search restarts");
    optimize->add_option("--tolerance", o_search.tol, "search convergence tolerance");
    optimize->add_option("--seed", o_search.seed, "search seed");
    optimize->add_option("--format", o_format, "text | json")
        ->check(CLI::IsMember({"text", "json"}));
    optimize->add_option("--out", o_out, "output file (default stdout)");

    // show-state ---------------------------------------------------------------
    auto* show = app.add_subcommand("show-state", "print a registry state or state file");
    std::string t_state, t_file;
    std::string t_preset = "calibrated";
    std::string t_format = "text";
    std::string t_out;
    show->fallthrough();
    show->add_option("--state", t_state, "registry state id");
    show->add_option("--state-file", t_file, "file holding a state in the text grammar");
    show->add_option("--preset", t_preset, "preset name or 'calibrated'");
    show->add_option("--format", t_format, "text | json")->check(CLI::IsMember({"text", "json"}));
    show->add_option("--out", t_out, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // usage/config errors are exit 1
    }

    try {
        if (verify->parsed()) {
            if (v_preset == "calibrated") {
                vopt.preset_policy = "calibrated";
            } else {
                vopt.preset_policy = "fixed";
                vopt.preset_name = v_preset;
            }
            return run_verify(vopt, v_format, v_out);
        }
        if (simulate->parsed()) {
            return run_simulate(load_state(s_state, s_file), s_pair, resolve_preset(s_preset),
                                s_seed, s_trials, s_length, s_format, s_out);
        }
        if (optimize->parsed()) {
            return run_optimize(o_objective, o_space, o_participants, resolve_preset(o_preset),
                                o_search, o_format, o_out);
        }
        if (show->parsed()) {
            return run_show_state(load_state(t_state, t_file), resolve_preset(t_preset), t_format,
                                  t_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
