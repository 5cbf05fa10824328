// chsh.hpp
// Observable families per sex, sign-convention presets, CHSH (xi) operators
// for a designated pair inside an n-qubit register, and exact gluing indices.
//
// Normalization: xi = (1/4)(aX + aY + bX - bY), so |xi| <= 1/2 classically
// and |xi| <= 1/sqrt(2) for any quantum state (Tsirelson). The gluing index
// of a pair is Cr = (1 + xi)/2.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "qglue/eig.hpp"
#include "qglue/matrix.hpp"
#include "qglue/state.hpp"

namespace qglue {

inline double tsirelson_xi() { return 1.0 / std::sqrt(2.0); }

enum class sex { first, second };

inline const char* sex_name(sex s) { return s == sex::first ? "first" : "second"; }

struct participant {
    std::string id;
    std::size_t qubit = 0;
    sex sx = sex::first;
};

// A heterosexual pair: `first` measures in the sigma_x/sigma_z family,
// `second` in the preset's rotated family. `legal` marks the designated
// biphoton-sharing pair.
struct pair_spec {
    participant first;
    participant second;
    bool legal = false;

    std::string label() const { return first.id + "-" + second.id; }
};

inline pair_spec make_pair(const participant& f, const participant& s, bool legal = false) {
    if (f.sx != sex::first || s.sx != sex::second) {
        throw std::invalid_argument("pair_spec: pair must combine a first-sex and a second-sex participant");
    }
    if (f.qubit == s.qubit) throw std::invalid_argument("pair_spec: qubit collision");
    return pair_spec{f, s, legal};
}

// FIRST-sex observables are fixed; SECOND-sex observables are preset-defined.
inline hermitian_operator first_sex_a() { return hermitian_operator(pauli_x()); }
inline hermitian_operator first_sex_b() { return hermitian_operator(pauli_z()); }

struct convention_preset {
    std::string name;      // stable CLI identifier
    hermitian_operator X;  // unit-Bloch-axis, eigenvalues +-1
    hermitian_operator Y;

    convention_preset(std::string nm, complex_matrix x, complex_matrix y)
        : name(std::move(nm)), X(std::move(x)), Y(std::move(y)) {
        validate_unit_axis(X);
        validate_unit_axis(Y);
    }

private:
    static void validate_unit_axis(const hermitian_operator& o) {
        const eig_result e = eig_hermitian(o);
        if (o.dim() != 2 || std::abs(e.values[0] - 1.0) > 1e-10 || std::abs(e.values[1] + 1.0) > 1e-10) {
            throw std::invalid_argument("convention_preset: observable must have eigenvalues +1 and -1");
        }
    }
};

inline convention_preset preset_section2() {
    const double r = 1.0 / std::sqrt(2.0);
    return convention_preset("section2", r * (pauli_x() + pauli_z()), r * (pauli_x() - pauli_z()));
}

inline convention_preset preset_figure4() {
    const double r = 1.0 / std::sqrt(2.0);
    return convention_preset("figure4", r * (pauli_z() - pauli_x()), cplx{-r, 0.0} * (pauli_x() + pauli_z()));
}

inline convention_preset preset_triplet_cal() {
    const double r = 1.0 / std::sqrt(2.0);
    return convention_preset("triplet-cal", r * (pauli_x() - pauli_z()), r * (pauli_x() + pauli_z()));
}

// Declaration order doubles as the deterministic calibration tie-break order.
inline std::vector<convention_preset> all_presets() {
    return {preset_section2(), preset_figure4(), preset_triplet_cal()};
}

inline convention_preset preset_by_name(const std::string& name) {
    for (auto& p : all_presets()) {
        if (p.name == name) return p;
    }
    throw std::invalid_argument("unknown preset '" + name + "' (expected section2, figure4 or triplet-cal)");
}

// xi values satisfy the Tsirelson bound for any quantum input; the type
// enforces it so downstream index arithmetic can trust the range.
struct xi_value {
    explicit xi_value(double v) : value(v) {
        if (!(std::abs(v) <= tsirelson_xi() + 1e-9)) {
            throw std::domain_error("xi_value: magnitude exceeds the Tsirelson bound");
        }
    }
    double value;
};

// (1/4)(a X + a Y + b X - b Y) embedded at the pair's qubits, identity elsewhere.
inline hermitian_operator chsh_operator(const pair_spec& pair, std::size_t n,
                                        const convention_preset& preset) {
    if (pair.first.qubit >= n || pair.second.qubit >= n) {
        throw std::invalid_argument("chsh_operator: pair qubit outside the register");
    }
    if (pair.first.qubit == pair.second.qubit) {
        throw std::invalid_argument("chsh_operator: qubit collision");
    }
    const complex_matrix a = embed_single(first_sex_a(), pair.first.qubit, n).matrix();
    const complex_matrix b = embed_single(first_sex_b(), pair.first.qubit, n).matrix();
    const complex_matrix X = embed_single(preset.X, pair.second.qubit, n).matrix();
    const complex_matrix Y = embed_single(preset.Y, pair.second.qubit, n).matrix();
    complex_matrix sum = a * X;
    sum += a * Y;
    sum += b * X;
    sum -= b * Y;
    sum *= cplx{0.25, 0.0};
    return hermitian_operator(std::move(sum));
}

inline xi_value xi_exact(const pure_state& psi, const pair_spec& pair,
                         const convention_preset& preset) {
    return xi_value(expectation(psi, chsh_operator(pair, psi.num_qubits(), preset)));
}

// Expected fraction of overlaid monoblock positions that bond: Cr = (1+xi)/2.
inline double gluing_index(const xi_value& xi) { return 0.5 * (1.0 + xi.value); }

// Every FIRST x SECOND combination, ordered by participant id for
// reproducible reports.
inline std::vector<pair_spec> all_heterosexual_pairs(const std::vector<participant>& roster) {
    std::vector<participant> firsts, seconds;
    for (const auto& p : roster) (p.sx == sex::first ? firsts : seconds).push_back(p);
    if (firsts.empty() || seconds.empty()) {
        throw std::invalid_argument("all_heterosexual_pairs: roster must contain both sexes");
    }
    auto by_id = [](const participant& x, const participant& y) { return x.id < y.id; };
    std::sort(firsts.begin(), firsts.end(), by_id);
    std::sort(seconds.begin(), seconds.end(), by_id);
    std::vector<pair_spec> out;
    for (const auto& f : firsts)
        for (const auto& s : seconds) out.push_back(make_pair(f, s));
    return out;
}

// ---- convention calibration ------------------------------------------------

// One anchor: a state, the pair to score, and the published target index.
struct calibration_entry {
    pure_state state;
    pair_spec pair;
    double target_index;
};

struct calibration_residual {
    std::string preset_name;
    std::vector<double> per_entry;  // |computed index - target| per anchor
    double total = 0.0;
};

struct calibration_result {
    convention_preset best;
    std::vector<calibration_residual> residuals;  // one row per preset, declaration order
};

// Scores every preset against the anchors and returns the one minimizing the
// total absolute deviation; ties resolve to the earliest declared preset.
inline calibration_result calibrate_convention(const std::vector<calibration_entry>& entries) {
    if (entries.empty()) throw std::invalid_argument("calibrate_convention: empty registry");
    std::optional<convention_preset> best;
    double best_total = 0.0;
    std::vector<calibration_residual> rows;
    for (const auto& preset : all_presets()) {
        calibration_residual row;
        row.preset_name = preset.name;
        for (const auto& e : entries) {
            const double idx = gluing_index(xi_exact(e.state, e.pair, preset));
            row.per_entry.push_back(std::abs(idx - e.target_index));
            row.total += row.per_entry.back();
        }
        if (!best || row.total < best_total) {
            best = preset;
            best_total = row.total;
        }
        rows.push_back(std::move(row));
    }
    return calibration_result{*best, std::move(rows)};
}

// Default anchor: the convention-fixing Bell experiment itself. The triplet
// state (|01>+|10>)/sqrt(2) must reproduce xi = +1/sqrt(2), index 0.8536, for
// its legitimate pair. Calibrating against the registry claim tables instead
// would be circular (they are the quantities under test) and numerically
// near-degenerate between presets.
inline std::vector<calibration_entry> default_calibration_anchor() {
    const participant alice{"Alice", 0, sex::first};
    const participant bob{"Bob", 1, sex::second};
    pure_state t = pure_state::from_amplitudes(
        2, {cplx{0, 0}, cplx{1, 0}, cplx{1, 0}, cplx{0, 0}});
    return {calibration_entry{std::move(t), make_pair(alice, bob, true),
                              0.5 * (1.0 + tsirelson_xi())}};
}

} // namespace qglue
