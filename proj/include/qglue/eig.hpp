// eig.hpp
// Hermitian eigendecomposition via cyclic Jacobi rotations, dimensions <= 16.
// Returns eigenvalues sorted descending with matching orthonormal eigenvector
// columns. Accuracy target: reconstruction |A - V diag(w) V^dagger| <= 1e-9.

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "qglue/matrix.hpp"

namespace qglue {

struct eig_result {
    std::vector<double> values;  // descending
    complex_matrix vectors;      // column i is the eigenvector for values[i]
};

namespace detail {

// One complex Jacobi rotation annihilating A(p,q). A is updated in place and
// the accumulated basis V is post-multiplied by the same rotation.
inline void jacobi_rotate(complex_matrix& a, complex_matrix& v, std::size_t p, std::size_t q) {
    const cplx apq = a(p, q);
    const double beta = std::abs(apq);
    if (beta == 0.0) return;
    const cplx phase = apq / beta;  // e^{i phi}
    const double alpha = a(p, p).real();
    const double gamma = a(q, q).real();

    // Choose tan(theta) as the smaller-magnitude root of t^2 - 2*tau*t - 1 = 0
    // with tau = (gamma - alpha) / (2 beta); this keeps rotations well-conditioned.
    const double tau = (gamma - alpha) / (2.0 * beta);
    const double sgn = tau >= 0.0 ? 1.0 : -1.0;
    const double t = -sgn / (std::abs(tau) + std::hypot(1.0, tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;

    // Unitary U: U(p,p)=c, U(p,q)=-s*phase, U(q,p)=s*conj(phase), U(q,q)=c.
    const cplx upq = -s * phase;
    const cplx uqp = s * std::conj(phase);

    const std::size_t n = a.rows();
    // A <- U^dagger A U: update columns p,q then rows p,q.
    for (std::size_t k = 0; k < n; ++k) {
        const cplx akp = a(k, p), akq = a(k, q);
        a(k, p) = akp * c + akq * uqp;
        a(k, q) = akp * upq + akq * c;
    }
    for (std::size_t k = 0; k < n; ++k) {
        const cplx apk = a(p, k), aqk = a(q, k);
        a(p, k) = c * apk + std::conj(uqp) * aqk;
        a(q, k) = std::conj(upq) * apk + c * aqk;
    }
    // Clamp the annihilated pair and enforce real diagonal against round-off.
    a(p, q) = cplx{0.0, 0.0};
    a(q, p) = cplx{0.0, 0.0};
    a(p, p) = cplx{a(p, p).real(), 0.0};
    a(q, q) = cplx{a(q, q).real(), 0.0};

    for (std::size_t k = 0; k < n; ++k) {
        const cplx vkp = v(k, p), vkq = v(k, q);
        v(k, p) = vkp * c + vkq * uqp;
        v(k, q) = vkp * upq + vkq * c;
    }
}

inline double offdiag_norm(const complex_matrix& a) {
    double s = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c)
            if (r != c) s += std::norm(a(r, c));
    return std::sqrt(s);
}

} // namespace detail

inline eig_result eig_hermitian(const hermitian_operator& op) {
    const std::size_t n = op.dim();
    complex_matrix a = op.matrix();
    complex_matrix v = complex_matrix::identity(n);

    double scale = a.max_abs();
    if (scale == 0.0) scale = 1.0;
    constexpr int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (detail::offdiag_norm(a) <= 1e-14 * scale) break;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
                detail::jacobi_rotate(a, v, p, q);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i).real();
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return diag[i] > diag[j]; });

    eig_result out;
    out.values.resize(n);
    out.vectors = complex_matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        out.values[i] = diag[order[i]];
        for (std::size_t k = 0; k < n; ++k) out.vectors(k, i) = v(k, order[i]);
    }
    return out;
}

} // namespace qglue
