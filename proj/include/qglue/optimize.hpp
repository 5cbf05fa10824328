// optimize.hpp
// Exact quantum maxima (eigen-maximization), biphoton-product-family maxima
// (derivative-free restarted search), and classical deterministic-strategy
// bounds, for single-pair and multi-pair gluing objectives.
//
// Three strategy spaces:
//   unrestricted_pure      any normalized n-qubit pure state
//   biphoton_product       tensor products of 2-qubit pure blocks and single
//                          qubit pures over a fixed participant partition
//   classical_deterministic  each participant fixes a +-1 response for each
//                          of its two observables; 4^n assignments total
//
// Note the spaces are not nested: classical deterministic responses answer
// both observables at once, which no quantum state over the fixed observables
// can emulate, so classical bounds can exceed quantum family values for
// minimization objectives.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "qglue/chsh.hpp"
#include "qglue/eig.hpp"
#include "qglue/state.hpp"
#include "qglue/state_text.hpp"

namespace qglue {

// ---- objectives --------------------------------------------------------------

enum class objective_kind { single_pair_xi, sum_index, differentiation, min_max_index };

// SINGLE_PAIR_XI is stated in xi units; all other objectives are stated in
// gluing-index units, Cr = (1 + xi)/2 per pair.
struct objective {
    objective_kind kind;
    std::vector<pair_spec> pairs;          // differentiation: exactly the legal pair
    std::vector<pair_spec> illegal_pairs;  // differentiation only

    static objective single_pair_xi(pair_spec pair) {
        return objective{objective_kind::single_pair_xi, {std::move(pair)}, {}};
    }
    static objective sum_index(std::vector<pair_spec> pair_set) {
        if (pair_set.empty()) throw std::invalid_argument("objective: empty pair set");
        return objective{objective_kind::sum_index, std::move(pair_set), {}};
    }
    static objective differentiation(pair_spec legal, std::vector<pair_spec> illegal) {
        if (illegal.empty()) throw std::invalid_argument("objective: empty illegal pair set");
        return objective{objective_kind::differentiation, {std::move(legal)}, std::move(illegal)};
    }
    static objective min_max_index(std::vector<pair_spec> pair_set) {
        if (pair_set.empty()) throw std::invalid_argument("objective: empty pair set");
        return objective{objective_kind::min_max_index, std::move(pair_set), {}};
    }

    // expressible as the expectation of one fixed Hermitian operator
    bool linear() const {
        return kind == objective_kind::single_pair_xi || kind == objective_kind::sum_index;
    }

    std::string label() const {
        auto join = [](const std::vector<pair_spec>& ps) {
            std::string s;
            for (std::size_t i = 0; i < ps.size(); ++i) {
                if (i) s += ",";
                s += ps[i].label();
            }
            return s;
        };
        switch (kind) {
            case objective_kind::single_pair_xi: return "single-pair-xi(" + join(pairs) + ")";
            case objective_kind::sum_index: return "sum-index(" + join(pairs) + ")";
            case objective_kind::differentiation:
                return "differentiation(legal=" + join(pairs) + "; illegal=" + join(illegal_pairs) + ")";
            case objective_kind::min_max_index: return "min-max-index(" + join(pairs) + ")";
        }
        return "";
    }
};

// Objective value from per-pair xi values; shared by the quantum evaluator
// and the classical enumeration, which produces xis directly from responses.
inline double combine_objective(const objective& obj, const std::vector<double>& xis,
                                const std::vector<double>& illegal_xis) {
    auto index = [](double xi) { return 0.5 * (1.0 + xi); };
    switch (obj.kind) {
        case objective_kind::single_pair_xi: return xis[0];
        case objective_kind::sum_index: {
            double acc = 0.0;
            for (double xi : xis) acc += index(xi);
            return acc;
        }
        case objective_kind::differentiation: {
            double worst = -1.0;
            for (double xi : illegal_xis) worst = std::max(worst, index(xi));
            return index(xis[0]) - worst;
        }
        case objective_kind::min_max_index: {
            double top = -1.0;
            for (double xi : xis) top = std::max(top, index(xi));
            return top;
        }
    }
    return 0.0;
}

// Precomputes the pair CHSH operators once so search loops only pay for
// expectations.
class objective_evaluator {
public:
    objective_evaluator(objective obj, std::size_t n, const convention_preset& preset)
        : obj_(std::move(obj)) {
        for (const auto& p : obj_.pairs) ops_.push_back(chsh_operator(p, n, preset));
        for (const auto& p : obj_.illegal_pairs) illegal_ops_.push_back(chsh_operator(p, n, preset));
    }

    const objective& target() const { return obj_; }

    std::vector<double> pair_xis(const pure_state& psi) const {
        std::vector<double> out;
        out.reserve(ops_.size());
        for (const auto& op : ops_) out.push_back(expectation(psi, op));
        return out;
    }

    double value(const pure_state& psi) const {
        std::vector<double> illegal;
        illegal.reserve(illegal_ops_.size());
        for (const auto& op : illegal_ops_) illegal.push_back(expectation(psi, op));
        return combine_objective(obj_, pair_xis(psi), illegal);
    }

private:
    objective obj_;
    std::vector<hermitian_operator> ops_;
    std::vector<hermitian_operator> illegal_ops_;
};

inline double evaluate_objective(const objective& obj, const pure_state& psi,
                                 const convention_preset& preset) {
    return objective_evaluator(obj, psi.num_qubits(), preset).value(psi);
}

// ---- strategy spaces ----------------------------------------------------------

// Disjoint 2-qubit blocks and singles covering qubits 0..n-1.
struct block_partition {
    std::vector<std::vector<participant>> blocks;

    explicit block_partition(std::vector<std::vector<participant>> b) : blocks(std::move(b)) {
        std::vector<std::size_t> qubits;
        for (const auto& block : blocks) {
            if (block.empty() || block.size() > 2) {
                throw std::invalid_argument("block_partition: blocks hold one or two participants");
            }
            for (const auto& p : block) qubits.push_back(p.qubit);
        }
        std::sort(qubits.begin(), qubits.end());
        for (std::size_t q = 0; q < qubits.size(); ++q) {
            if (qubits[q] != q) {
                throw std::invalid_argument("block_partition: qubits must be disjoint and cover 0..n-1");
            }
        }
        if (qubits.empty()) throw std::invalid_argument("block_partition: empty");
    }

    std::size_t num_qubits() const {
        std::size_t n = 0;
        for (const auto& block : blocks) n += block.size();
        return n;
    }

    std::string label() const {
        std::string s;
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            if (b) s += ",";
            s += "{";
            for (std::size_t i = 0; i < blocks[b].size(); ++i) {
                if (i) s += ",";
                s += blocks[b][i].id;
            }
            s += "}";
        }
        return s;
    }
};

struct strategy_space {
    enum class kind { unrestricted_pure, biphoton_product, classical_deterministic };
    kind tag;
    std::optional<block_partition> partition;  // biphoton_product only

    static strategy_space unrestricted() { return {kind::unrestricted_pure, std::nullopt}; }
    static strategy_space biphoton(block_partition p) {
        return {kind::biphoton_product, std::move(p)};
    }
    static strategy_space classical() { return {kind::classical_deterministic, std::nullopt}; }

    std::string label() const {
        switch (tag) {
            case kind::unrestricted_pure: return "unrestricted-pure";
            case kind::biphoton_product: return "biphoton-product(" + partition->label() + ")";
            case kind::classical_deterministic: return "classical-deterministic";
        }
        return "";
    }
};

// ---- results ------------------------------------------------------------------

struct optimization_result {
    double value = 0.0;
    std::optional<pure_state> argmax_state;  // quantum spaces
    std::string argmax_text;                 // state grammar or classical assignment
    std::string method;
    std::size_t restarts_used = 0;
    double residual = 0.0;  // eig: operator residual; search: final objective spread
};

struct search_options {
    std::size_t restarts = 64;
    double tol = 1e-9;              // stop when the simplex objective spread falls below
    std::size_t max_iter = 2000;    // per restart
    double initial_perturbation = 0.1;
    double perturbation_decay = 0.9;
    std::uint64_t seed = 20240214;
    std::size_t workers = 1;
};

// ---- state parameterizations ---------------------------------------------------

namespace detail {

// dim-amplitude pure states over 2(dim-1) reals: hyperspherical magnitudes
// (dim-1 angles) then dim-1 phases on amplitudes 1..dim-1; amplitude 0 stays
// real, which fixes the global phase gauge.
inline std::size_t param_count(std::size_t dim) { return 2 * (dim - 1); }

inline std::vector<cplx> amps_from_params(const double* p, std::size_t dim) {
    std::vector<double> mags(dim);
    double prod = 1.0;
    for (std::size_t i = 0; i + 1 < dim; ++i) {
        mags[i] = prod * std::cos(p[i]);
        prod *= std::sin(p[i]);
    }
    mags[dim - 1] = prod;
    std::vector<cplx> amps(dim);
    amps[0] = cplx{mags[0], 0.0};
    for (std::size_t i = 1; i < dim; ++i) {
        amps[i] = std::polar(mags[i], p[dim - 1 + i - 1]);
    }
    return amps;
}

// Inverse map (up to gauge): used to seed searches from a known state.
inline std::vector<double> params_from_amps(std::vector<cplx> amps) {
    const std::size_t dim = amps.size();
    cplx gauge{1.0, 0.0};
    for (const cplx& a : amps) {
        if (std::abs(a) > 1e-12) {
            gauge = std::conj(a) / std::abs(a);
            break;
        }
    }
    for (cplx& a : amps) a *= gauge;
    std::vector<double> p(param_count(dim), 0.0);
    double prod = 1.0;
    for (std::size_t i = 0; i + 1 < dim; ++i) {
        const double c = prod > 1e-300 ? std::clamp(std::abs(amps[i]) / prod, -1.0, 1.0) : 1.0;
        p[i] = std::acos(c);
        prod *= std::sin(p[i]);
    }
    for (std::size_t i = 1; i < dim; ++i) {
        p[dim - 1 + i - 1] = std::abs(amps[i]) > 1e-300 ? std::arg(amps[i]) : 0.0;
    }
    return p;
}

// amplitude of the full register as the product of block amplitudes; within a
// block the first listed participant supplies the high bit
inline pure_state assemble_product_state(const block_partition& partition,
                                         const std::vector<std::vector<cplx>>& block_amps) {
    const std::size_t n = partition.num_qubits();
    std::vector<cplx> amps(std::size_t{1} << n);
    for (std::size_t idx = 0; idx < amps.size(); ++idx) {
        cplx acc{1.0, 0.0};
        for (std::size_t b = 0; b < partition.blocks.size(); ++b) {
            std::size_t sub = 0;
            for (const participant& p : partition.blocks[b]) {
                sub = (sub << 1) | ((idx >> qubit_bit_pos(p.qubit, n)) & 1u);
            }
            acc *= block_amps[b][sub];
        }
        amps[idx] = acc;
    }
    return pure_state::from_amplitudes(n, std::move(amps));
}

// ---- Nelder-Mead on a real parameter vector ------------------------------------

struct nm_result {
    std::vector<double> x;
    double f = 0.0;
    double spread = 0.0;
    std::size_t iterations = 0;
};

template <typename F>
nm_result nelder_mead_min(F&& f, std::vector<double> x0, const search_options& opt) {
    const std::size_t d = x0.size();
    std::vector<std::vector<double>> xs(d + 1, x0);
    for (std::size_t i = 0; i < d; ++i) xs[i + 1][i] += 0.25;
    std::vector<double> fs(d + 1);
    for (std::size_t i = 0; i <= d; ++i) fs[i] = f(xs[i]);

    std::vector<std::size_t> order(d + 1);
    nm_result out;
    for (out.iterations = 0; out.iterations < opt.max_iter; ++out.iterations) {
        for (std::size_t i = 0; i <= d; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
        const std::size_t lo = order[0], hi = order[d], next_hi = order[d - 1];
        out.spread = fs[hi] - fs[lo];
        if (out.spread < opt.tol) break;

        std::vector<double> centroid(d, 0.0);
        for (std::size_t i = 0; i <= d; ++i) {
            if (i == hi) continue;
            for (std::size_t k = 0; k < d; ++k) centroid[k] += xs[i][k];
        }
        for (double& c : centroid) c /= static_cast<double>(d);

        auto combine = [&](double coeff) {
            std::vector<double> x(d);
            for (std::size_t k = 0; k < d; ++k) x[k] = centroid[k] + coeff * (xs[hi][k] - centroid[k]);
            return x;
        };
        const std::vector<double> xr = combine(-1.0);
        const double fr = f(xr);
        if (fr < fs[lo]) {
            const std::vector<double> xe = combine(-2.0);
            const double fe = f(xe);
            if (fe < fr) { xs[hi] = xe; fs[hi] = fe; }
            else { xs[hi] = xr; fs[hi] = fr; }
        } else if (fr < fs[next_hi]) {
            xs[hi] = xr;
            fs[hi] = fr;
        } else {
            const std::vector<double> xc = combine(0.5);
            const double fc = f(xc);
            if (fc < fs[hi]) { xs[hi] = xc; fs[hi] = fc; }
            else {
                for (std::size_t i = 0; i <= d; ++i) {
                    if (i == lo) continue;
                    for (std::size_t k = 0; k < d; ++k) xs[i][k] = xs[lo][k] + 0.5 * (xs[i][k] - xs[lo][k]);
                    fs[i] = f(xs[i]);
                }
            }
        }
    }
    std::size_t lo = 0;
    for (std::size_t i = 1; i <= d; ++i) {
        if (fs[i] < fs[lo]) lo = i;
    }
    out.x = xs[lo];
    out.f = fs[lo];
    return out;
}

// Restarted minimization. Two deterministic waves so the outcome does not
// depend on the worker count: wave one runs from a provided seed point plus
// fresh uniform starts, wave two perturbs the wave-one incumbent with a
// geometrically decaying scale; results merge by (value, restart index).
template <typename F>
nm_result restarted_minimize(F&& f, std::size_t dim, const search_options& opt,
                             const std::vector<double>* seed_point = nullptr) {
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> uniform(-3.141592653589793, 3.141592653589793);
    const std::size_t wave_a = (opt.restarts + 1) / 2;
    const std::size_t wave_b = opt.restarts - wave_a;

    std::vector<std::vector<double>> starts;
    starts.reserve(wave_a);
    starts.push_back(seed_point ? *seed_point : std::vector<double>(dim, 0.0));
    for (std::size_t r = 1; r < wave_a; ++r) {
        std::vector<double> x(dim);
        for (double& v : x) v = uniform(rng);
        starts.push_back(std::move(x));
    }

    auto run_wave = [&](const std::vector<std::vector<double>>& pts) {
        std::vector<nm_result> results(pts.size());
        auto worker = [&](std::size_t w, std::size_t stride) {
            for (std::size_t i = w; i < pts.size(); i += stride) {
                results[i] = nelder_mead_min(f, pts[i], opt);
            }
        };
        if (opt.workers <= 1) {
            worker(0, 1);
        } else {
            std::vector<std::thread> pool;
            for (std::size_t w = 0; w < opt.workers; ++w) pool.emplace_back(worker, w, opt.workers);
            for (auto& t : pool) t.join();
        }
        return results;
    };

    nm_result best;
    best.f = std::numeric_limits<double>::infinity();
    for (const nm_result& r : run_wave(starts)) {
        if (r.f < best.f) best = r;
    }

    if (wave_b > 0) {
        std::normal_distribution<double> gaussian(0.0, 1.0);
        std::vector<std::vector<double>> perturbed;
        double scale = opt.initial_perturbation;
        for (std::size_t r = 0; r < wave_b; ++r) {
            std::vector<double> x = best.x;
            for (double& v : x) v += scale * gaussian(rng);
            perturbed.push_back(std::move(x));
            scale *= opt.perturbation_decay;
        }
        for (const nm_result& r : run_wave(perturbed)) {
            if (r.f < best.f) best = r;
        }
    }

    // serial polish until the restart stops paying
    for (int round = 0; round < 8; ++round) {
        nm_result again = nelder_mead_min(f, best.x, opt);
        if (again.f >= best.f - opt.tol) {
            if (again.f < best.f) best = again;
            break;
        }
        best = again;
    }
    return best;
}

} // namespace detail

// ---- exact eigen-maximization ---------------------------------------------------

namespace detail {

inline complex_matrix objective_operator(const objective& obj, std::size_t n,
                                         const convention_preset& preset) {
    complex_matrix m = chsh_operator(obj.pairs[0], n, preset).matrix();
    for (std::size_t k = 1; k < obj.pairs.size(); ++k) {
        m += chsh_operator(obj.pairs[k], n, preset).matrix();
    }
    return m;
}

inline double operator_residual(const complex_matrix& m, const std::vector<cplx>& v, double lambda) {
    double worst = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        cplx acc{0.0, 0.0};
        for (std::size_t c = 0; c < m.rows(); ++c) acc += m(r, c) * v[c];
        worst = std::max(worst, std::abs(acc - lambda * v[r]));
    }
    return worst;
}

inline double map_linear_value(const objective& obj, double lambda) {
    if (obj.kind == objective_kind::single_pair_xi) return lambda;
    // sum of indices: |pairs|/2 + (1/2) sum of xis
    return 0.5 * static_cast<double>(obj.pairs.size()) + 0.5 * lambda;
}

} // namespace detail

// Largest-eigenvalue route for objectives linear in the state.
inline optimization_result max_unrestricted(const objective& obj, std::size_t n,
                                            const convention_preset& preset) {
    if (!obj.linear()) {
        throw std::invalid_argument(
            "max_unrestricted: objective is not linear in the state; use the search route");
    }
    const complex_matrix m = detail::objective_operator(obj, n, preset);
    const eig_result e = eig_hermitian(hermitian_operator(m));
    std::vector<cplx> top(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) top[r] = e.vectors(r, 0);

    optimization_result out;
    out.value = detail::map_linear_value(obj, e.values[0]);
    out.argmax_state = pure_state::from_amplitudes(n, top);
    out.argmax_text = format_state(*out.argmax_state);
    out.method = "eigensolver";
    out.restarts_used = 0;
    out.residual = detail::operator_residual(m, top, e.values[0]);
    return out;
}

// Independent cross-check: shifted power ascent over normalized states, never
// touching the Jacobi solver. Rayleigh quotients are nondecreasing along the
// iteration for the shifted positive operator.
inline optimization_result max_unrestricted_ascent(const objective& obj, std::size_t n,
                                                   const convention_preset& preset,
                                                   std::size_t restarts = 20,
                                                   std::uint64_t seed = 7) {
    if (!obj.linear()) {
        throw std::invalid_argument("max_unrestricted_ascent: objective is not linear in the state");
    }
    const complex_matrix m = detail::objective_operator(obj, n, preset);
    const double shift = m.max_abs() * static_cast<double>(m.rows()) + 1.0;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    double best = -std::numeric_limits<double>::infinity();
    std::vector<cplx> best_v;
    for (std::size_t r = 0; r < restarts; ++r) {
        std::vector<cplx> v(m.rows());
        for (cplx& a : v) a = cplx{gauss(rng), gauss(rng)};
        double rayleigh = 0.0;
        for (int it = 0; it < 20000; ++it) {
            // w = (m + shift I) v, then normalize
            std::vector<cplx> w(m.rows());
            for (std::size_t i = 0; i < m.rows(); ++i) {
                cplx acc = shift * v[i];
                for (std::size_t j = 0; j < m.rows(); ++j) acc += m(i, j) * v[j];
                w[i] = acc;
            }
            double norm = 0.0;
            for (const cplx& a : w) norm += std::norm(a);
            norm = std::sqrt(norm);
            for (cplx& a : w) a /= norm;
            cplx q{0.0, 0.0};
            for (std::size_t i = 0; i < m.rows(); ++i) {
                cplx row{0.0, 0.0};
                for (std::size_t j = 0; j < m.rows(); ++j) row += m(i, j) * w[j];
                q += std::conj(w[i]) * row;
            }
            const double next = q.real();
            v = std::move(w);
            if (std::abs(next - rayleigh) < 1e-14 && it > 2) {
                rayleigh = next;
                break;
            }
            rayleigh = next;
        }
        if (rayleigh > best) {
            best = rayleigh;
            best_v = v;
        }
    }
    optimization_result out;
    out.value = detail::map_linear_value(obj, best);
    out.argmax_state = pure_state::from_amplitudes(n, best_v);
    out.argmax_text = format_state(*out.argmax_state);
    out.method = "power-ascent";
    out.restarts_used = restarts;
    out.residual = detail::operator_residual(m, best_v, best);
    return out;
}

// ---- biphoton-product family ------------------------------------------------------

// Maximum of the objective over product states of the partition's blocks,
// by restarted Nelder-Mead over the gauge-fixed block parameters.
inline optimization_result max_biphoton_family(const objective& obj, const block_partition& partition,
                                               const convention_preset& preset,
                                               const search_options& opt = {}) {
    const std::size_t n = partition.num_qubits();
    const objective_evaluator eval(obj, n, preset);

    std::vector<std::size_t> dims, offsets;
    std::size_t total = 0;
    for (const auto& block : partition.blocks) {
        const std::size_t dim = std::size_t{1} << block.size();
        dims.push_back(dim);
        offsets.push_back(total);
        total += detail::param_count(dim);
    }
    auto state_of = [&](const std::vector<double>& p) {
        std::vector<std::vector<cplx>> block_amps;
        block_amps.reserve(dims.size());
        for (std::size_t b = 0; b < dims.size(); ++b) {
            block_amps.push_back(detail::amps_from_params(p.data() + offsets[b], dims[b]));
        }
        return detail::assemble_product_state(partition, block_amps);
    };
    auto negated = [&](const std::vector<double>& p) { return -eval.value(state_of(p)); };

    const detail::nm_result best = detail::restarted_minimize(negated, total, opt);

    optimization_result out;
    out.value = -best.f;
    out.argmax_state = state_of(best.x);
    out.argmax_text = format_state(*out.argmax_state);
    out.method = "nelder-mead";
    out.restarts_used = opt.restarts;
    out.residual = best.spread;
    return out;
}

// ---- classical deterministic strategies --------------------------------------------

// One +-1 response per observable per participant. FIRST-sex observables are
// sigma_x and sigma_z; SECOND-sex observables are the preset's X and Y.
struct classical_assignment {
    std::vector<participant> roster;
    std::vector<std::array<int, 2>> responses;  // roster order; [first obs, second obs]

    std::string text() const {
        std::string s;
        for (std::size_t p = 0; p < roster.size(); ++p) {
            if (p) s += "; ";
            const bool first = roster[p].sx == sex::first;
            s += roster[p].id;
            s += first ? "[first]: x->" : "[second]: X->";
            s += responses[p][0] > 0 ? "+1" : "-1";
            s += first ? ", z->" : ", Y->";
            s += responses[p][1] > 0 ? "+1" : "-1";
        }
        return s;
    }
};

namespace detail {

// xi of a pair under deterministic responses, kinds uniform:
// (1/4)(f_x s_X + f_x s_Y + f_z s_X - f_z s_Y)
inline double classical_xi(const std::array<int, 2>& f, const std::array<int, 2>& s) {
    return 0.25 * static_cast<double>(f[0] * s[0] + f[0] * s[1] + f[1] * s[0] - f[1] * s[1]);
}

struct classical_extremum {
    double value = 0.0;
    classical_assignment assignment;
};

// Exhaustive 4^n enumeration in lexicographic order over the response tuple
// (participant 0 first observable, participant 0 second, participant 1 first,
// ...), +1 before -1; the first extremum encountered is reported, making the
// tie-break the lexicographically smallest assignment.
inline classical_extremum classical_enumerate(const objective& obj,
                                              const std::vector<participant>& roster,
                                              bool minimize) {
    const std::size_t n = roster.size();
    if (n == 0 || n > 4) {
        throw std::invalid_argument("classical strategies: roster must hold 1 to 4 participants");
    }
    std::vector<std::size_t> qubit_to_pos(16, std::size_t(-1));
    for (std::size_t p = 0; p < n; ++p) qubit_to_pos.at(roster[p].qubit) = p;
    auto locate = [&](const participant& who) {
        const std::size_t pos = qubit_to_pos.at(who.qubit);
        if (pos == std::size_t(-1)) {
            throw std::invalid_argument("classical strategies: pair member missing from the roster");
        }
        return pos;
    };
    std::vector<std::pair<std::size_t, std::size_t>> pair_pos, illegal_pos;
    for (const auto& pr : obj.pairs) pair_pos.emplace_back(locate(pr.first), locate(pr.second));
    for (const auto& pr : obj.illegal_pairs) illegal_pos.emplace_back(locate(pr.first), locate(pr.second));

    classical_extremum best;
    bool have = false;
    std::vector<std::array<int, 2>> responses(n);
    const std::size_t total = std::size_t{1} << (2 * n);
    for (std::size_t code = 0; code < total; ++code) {
        for (std::size_t p = 0; p < n; ++p) {
            const std::size_t shift = 2 * (n - 1 - p);
            responses[p][0] = ((code >> (shift + 1)) & 1u) ? -1 : +1;
            responses[p][1] = ((code >> shift) & 1u) ? -1 : +1;
        }
        std::vector<double> xis, illegal;
        for (const auto& [f, s] : pair_pos) xis.push_back(classical_xi(responses[f], responses[s]));
        for (const auto& [f, s] : illegal_pos) illegal.push_back(classical_xi(responses[f], responses[s]));
        const double v = combine_objective(obj, xis, illegal);
        if (!have || (minimize ? v < best.value : v > best.value)) {
            have = true;
            best.value = v;
            best.assignment = classical_assignment{roster, responses};
        }
    }
    return best;
}

} // namespace detail

// Exhaustive maximum over deterministic local strategies.
inline optimization_result classical_bound(const objective& obj,
                                           const std::vector<participant>& roster) {
    const detail::classical_extremum ext = detail::classical_enumerate(obj, roster, false);
    optimization_result out;
    out.value = ext.value;
    out.argmax_text = ext.assignment.text();
    out.method = "enumeration";
    out.restarts_used = 0;
    out.residual = 0.0;
    return out;
}

// ---- min-max over all pairs ---------------------------------------------------------

// Minimizes the largest pair gluing index over the chosen strategy space.
inline optimization_result min_all_pairs(const strategy_space& space,
                                         const std::vector<pair_spec>& pair_set,
                                         const convention_preset& preset,
                                         const search_options& opt = {}) {
    const objective obj = objective::min_max_index(pair_set);

    if (space.tag == strategy_space::kind::classical_deterministic) {
        std::vector<participant> roster;
        auto add = [&](const participant& p) {
            for (const auto& q : roster) {
                if (q.qubit == p.qubit) return;
            }
            roster.push_back(p);
        };
        for (const auto& pr : pair_set) {
            add(pr.first);
            add(pr.second);
        }
        std::sort(roster.begin(), roster.end(),
                  [](const participant& a, const participant& b) { return a.qubit < b.qubit; });
        const detail::classical_extremum ext = detail::classical_enumerate(obj, roster, true);
        optimization_result out;
        out.value = ext.value;
        out.argmax_text = ext.assignment.text();
        out.method = "enumeration";
        out.residual = 0.0;
        return out;
    }

    std::size_t n = 0;
    for (const auto& pr : pair_set) n = std::max({n, pr.first.qubit + 1, pr.second.qubit + 1});
    const objective_evaluator eval(obj, n, preset);

    if (space.tag == strategy_space::kind::biphoton_product) {
        // same search as the family maximum, opposite direction
        const block_partition& partition = *space.partition;
        std::vector<std::size_t> dims, offsets;
        std::size_t total = 0;
        for (const auto& block : partition.blocks) {
            const std::size_t dim = std::size_t{1} << block.size();
            dims.push_back(dim);
            offsets.push_back(total);
            total += detail::param_count(dim);
        }
        auto state_of = [&](const std::vector<double>& p) {
            std::vector<std::vector<cplx>> block_amps;
            for (std::size_t b = 0; b < dims.size(); ++b) {
                block_amps.push_back(detail::amps_from_params(p.data() + offsets[b], dims[b]));
            }
            return detail::assemble_product_state(partition, block_amps);
        };
        auto f = [&](const std::vector<double>& p) { return eval.value(state_of(p)); };
        const detail::nm_result best = detail::restarted_minimize(f, total, opt);
        optimization_result out;
        out.value = best.f;
        out.argmax_state = state_of(best.x);
        out.argmax_text = format_state(*out.argmax_state);
        out.method = "nelder-mead";
        out.restarts_used = opt.restarts;
        out.residual = best.spread;
        return out;
    }

    // unrestricted: seed the search with the bottom eigenvector of the summed
    // CHSH operator; it already minimizes the mean index, and for these
    // rosters attains the max-index optimum
    complex_matrix m = chsh_operator(pair_set[0], n, preset).matrix();
    for (std::size_t k = 1; k < pair_set.size(); ++k) {
        m += chsh_operator(pair_set[k], n, preset).matrix();
    }
    const eig_result e = eig_hermitian(hermitian_operator(m));
    std::vector<cplx> bottom(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) bottom[r] = e.vectors(r, m.rows() - 1);
    const std::vector<double> warm = detail::params_from_amps(bottom);

    const std::size_t dim = std::size_t{1} << n;
    auto state_of = [&](const std::vector<double>& p) {
        return pure_state::from_amplitudes(n, detail::amps_from_params(p.data(), dim));
    };
    auto f = [&](const std::vector<double>& p) { return eval.value(state_of(p)); };
    const detail::nm_result best = detail::restarted_minimize(f, detail::param_count(dim), opt, &warm);

    const pure_state warm_state = pure_state::from_amplitudes(n, bottom);
    const double warm_value = eval.value(warm_state);

    optimization_result out;
    out.method = "eigensolver+nelder-mead";
    out.restarts_used = opt.restarts;
    if (warm_value <= best.f) {
        out.value = warm_value;
        out.argmax_state = warm_state;
        out.residual = 0.0;
    } else {
        out.value = best.f;
        out.argmax_state = state_of(best.x);
        out.residual = best.spread;
    }
    out.argmax_text = format_state(*out.argmax_state);
    return out;
}

// ---- export -------------------------------------------------------------------------

inline nlohmann::ordered_json optimization_json(const objective& obj, const strategy_space& space,
                                                const convention_preset& preset,
                                                const optimization_result& result) {
    nlohmann::ordered_json j;
    j["objective"] = obj.label();
    j["space"] = space.label();
    j["preset"] = preset.name;
    j["value"] = result.value;
    j["argmax"] = result.argmax_text;
    j["restarts"] = result.restarts_used;
    j["residual"] = result.residual;
    return j;
}

} // namespace qglue
