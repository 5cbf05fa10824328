// state.hpp
// Pure states and density matrices on 2..4 qubit registers, expectation
// values, partial trace, Born-rule outcome distributions.
//
// Basis-index convention used throughout: participant/qubit 0 owns the most
// significant bit of a basis index, so |0011> on 4 qubits is index 3 and the
// bit of qubit q sits at position (n-1-q) from the least significant end.

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "qglue/eig.hpp"
#include "qglue/matrix.hpp"

namespace qglue {

inline std::size_t qubit_bit_pos(std::size_t qubit, std::size_t n) { return n - 1 - qubit; }

class pure_state {
public:
    // Normalizes the amplitudes; rejects vectors with near-zero norm.
    static pure_state from_amplitudes(std::size_t num_qubits, std::vector<cplx> amps) {
        if (num_qubits < 2 || num_qubits > 4) {
            throw std::invalid_argument("pure_state: register size must be 2, 3 or 4 qubits");
        }
        if (amps.size() != (std::size_t{1} << num_qubits)) {
            throw std::invalid_argument("pure_state: amplitude count must be 2^n");
        }
        double norm_sq = 0.0;
        for (const auto& z : amps) {
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
                throw std::invalid_argument("pure_state: non-finite amplitude");
            }
            norm_sq += std::norm(z);
        }
        if (norm_sq < 1e-24) throw std::invalid_argument("pure_state: zero vector");
        const double inv = 1.0 / std::sqrt(norm_sq);
        for (auto& z : amps) z *= inv;
        return pure_state(num_qubits, std::move(amps));
    }

    std::size_t num_qubits() const { return num_qubits_; }
    std::size_t dim() const { return amps_.size(); }
    cplx amplitude(std::size_t basis_index) const { return amps_.at(basis_index); }
    const std::vector<cplx>& amplitudes() const { return amps_; }

    double norm_sq() const {
        double s = 0.0;
        for (const auto& z : amps_) s += std::norm(z);
        return s;
    }

private:
    pure_state(std::size_t n, std::vector<cplx> amps) : num_qubits_(n), amps_(std::move(amps)) {}

    std::size_t num_qubits_;
    std::vector<cplx> amps_;
};

class density_matrix {
public:
    explicit density_matrix(hermitian_operator op) : op_(std::move(op)) {
        const cplx tr = op_.matrix().trace();
        if (std::abs(tr - cplx{1.0, 0.0}) > 1e-12) {
            throw std::invalid_argument("density_matrix: trace must be 1");
        }
        const eig_result e = eig_hermitian(op_);
        for (double w : e.values) {
            if (w < -1e-10) throw std::invalid_argument("density_matrix: negative eigenvalue");
        }
    }

    static density_matrix from_pure(const pure_state& psi) {
        const std::size_t d = psi.dim();
        complex_matrix m(d, d);
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c < d; ++c)
                m(r, c) = psi.amplitude(r) * std::conj(psi.amplitude(c));
        return density_matrix(hermitian_operator(std::move(m)));
    }

    const complex_matrix& matrix() const { return op_.matrix(); }
    const hermitian_operator& op() const { return op_; }
    std::size_t dim() const { return op_.dim(); }

private:
    hermitian_operator op_;
};

// <psi|A|psi>; asserts the imaginary residue is below 1e-12 before discarding it.
inline double expectation(const pure_state& psi, const hermitian_operator& op) {
    if (op.dim() != psi.dim()) throw std::invalid_argument("expectation: dimension mismatch");
    const auto& m = op.matrix();
    cplx acc{0.0, 0.0};
    for (std::size_t r = 0; r < psi.dim(); ++r) {
        cplx row{0.0, 0.0};
        for (std::size_t c = 0; c < psi.dim(); ++c) row += m(r, c) * psi.amplitude(c);
        acc += std::conj(psi.amplitude(r)) * row;
    }
    if (std::abs(acc.imag()) > 1e-12) {
        throw std::runtime_error("expectation: imaginary residue exceeds 1e-12");
    }
    return acc.real();
}

// Density matrix on the kept qubits; `keep` must be nonempty, strictly
// increasing, and the complement is summed out. Trace is preserved.
inline density_matrix partial_trace(const density_matrix& rho, const std::vector<std::size_t>& keep,
                                    std::size_t n) {
    if (rho.dim() != (std::size_t{1} << n)) throw std::invalid_argument("partial_trace: dimension mismatch");
    if (keep.empty()) throw std::invalid_argument("partial_trace: keep set empty");
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (keep[i] >= n) throw std::invalid_argument("partial_trace: index out of range");
        if (i > 0 && keep[i] <= keep[i - 1]) {
            throw std::invalid_argument("partial_trace: keep set must be strictly increasing");
        }
    }

    std::vector<std::size_t> traced;
    for (std::size_t q = 0; q < n; ++q) {
        bool kept = false;
        for (std::size_t k : keep) kept = kept || (k == q);
        if (!kept) traced.push_back(q);
    }

    const std::size_t kd = std::size_t{1} << keep.size();
    const std::size_t td = std::size_t{1} << traced.size();

    // Compose a full basis index from kept-subsystem bits and traced-subsystem bits.
    auto full_index = [&](std::size_t kept_bits, std::size_t traced_bits) {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < keep.size(); ++i) {
            const std::size_t bit = (kept_bits >> (keep.size() - 1 - i)) & 1u;
            idx |= bit << qubit_bit_pos(keep[i], n);
        }
        for (std::size_t i = 0; i < traced.size(); ++i) {
            const std::size_t bit = (traced_bits >> (traced.size() - 1 - i)) & 1u;
            idx |= bit << qubit_bit_pos(traced[i], n);
        }
        return idx;
    };

    complex_matrix out(kd, kd);
    for (std::size_t r = 0; r < kd; ++r)
        for (std::size_t c = 0; c < kd; ++c) {
            cplx acc{0.0, 0.0};
            for (std::size_t t = 0; t < td; ++t) acc += rho.matrix()(full_index(r, t), full_index(c, t));
            out(r, c) = acc;
        }
    return density_matrix(hermitian_operator(std::move(out)));
}

// Outcome distribution for one projective +-1 measurement per qubit.
// probabilities[outcome_bits]: bit at position (n-1-q) is 0 for outcome +1 on
// qubit q (the larger eigenvalue's eigenvector) and 1 for outcome -1.
struct born_table {
    std::size_t num_qubits = 0;
    std::vector<double> probabilities;

    // outcomes[q] in {+1,-1}, one per qubit.
    double probability(const std::vector<int>& outcomes) const {
        if (outcomes.size() != num_qubits) throw std::invalid_argument("born_table: outcome arity mismatch");
        std::size_t idx = 0;
        for (std::size_t q = 0; q < num_qubits; ++q) {
            if (outcomes[q] != 1 && outcomes[q] != -1) {
                throw std::invalid_argument("born_table: outcomes must be +1 or -1");
            }
            if (outcomes[q] == -1) idx |= std::size_t{1} << qubit_bit_pos(q, num_qubits);
        }
        return probabilities[idx];
    }
};

// Squared magnitudes of projections onto tensor products of the per-qubit
// observables' eigenvectors. One 2x2 observable per qubit, in qubit order.
inline born_table born_distribution(const pure_state& psi,
                                    const std::vector<hermitian_operator>& observables) {
    const std::size_t n = psi.num_qubits();
    if (observables.size() != n) {
        throw std::invalid_argument("born_distribution: need exactly one observable per qubit");
    }
    std::vector<cplx> amps = psi.amplitudes();
    // Rotate qubit q into its observable's eigenbasis by applying U_q^dagger,
    // where U_q's columns are the eigenvectors (descending eigenvalue order).
    for (std::size_t q = 0; q < n; ++q) {
        if (observables[q].dim() != 2) {
            throw std::invalid_argument("born_distribution: observables must be 2x2");
        }
        const eig_result e = eig_hermitian(observables[q]);
        const cplx u00 = e.vectors(0, 0), u01 = e.vectors(0, 1);
        const cplx u10 = e.vectors(1, 0), u11 = e.vectors(1, 1);
        const std::size_t stride = std::size_t{1} << qubit_bit_pos(q, n);
        for (std::size_t base = 0; base < amps.size(); ++base) {
            if (base & stride) continue;
            const cplx a0 = amps[base], a1 = amps[base | stride];
            amps[base] = std::conj(u00) * a0 + std::conj(u10) * a1;
            amps[base | stride] = std::conj(u01) * a0 + std::conj(u11) * a1;
        }
    }
    born_table out;
    out.num_qubits = n;
    out.probabilities.resize(amps.size());
    for (std::size_t i = 0; i < amps.size(); ++i) out.probabilities[i] = std::norm(amps[i]);
    return out;
}

// Born distribution of a (possibly reduced) density matrix: probabilities are
// the diagonal of U^dagger rho U with U the tensor product of eigenbases.
inline born_table born_distribution(const density_matrix& rho,
                                    const std::vector<hermitian_operator>& observables) {
    std::size_t n = 0;
    while ((std::size_t{1} << n) < rho.dim()) ++n;
    if ((std::size_t{1} << n) != rho.dim() || observables.size() != n) {
        throw std::invalid_argument("born_distribution: need exactly one observable per qubit");
    }
    complex_matrix u = complex_matrix::identity(1);
    for (std::size_t q = 0; q < n; ++q) {
        if (observables[q].dim() != 2) {
            throw std::invalid_argument("born_distribution: observables must be 2x2");
        }
        u = kron(u, eig_hermitian(observables[q]).vectors);
    }
    const complex_matrix d = u.dagger() * rho.matrix() * u;
    born_table out;
    out.num_qubits = n;
    out.probabilities.resize(rho.dim());
    for (std::size_t i = 0; i < rho.dim(); ++i) out.probabilities[i] = d(i, i).real();
    return out;
}

} // namespace qglue
