// matrix.hpp
// Dense complex matrices for registers of up to 4 qubits (dimensions 1..16).
// Row-major storage, value semantics, no sparsity. All operations validate
// their dimension preconditions and throw std::invalid_argument on misuse.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace qglue {

using cplx = std::complex<double>;

inline bool is_allowed_dim(std::size_t d) {
    return d == 1 || d == 2 || d == 4 || d == 8 || d == 16;
}

// Row-major complex matrix; rows/cols restricted to {1,2,4,8,16}.
class complex_matrix {
public:
    complex_matrix() : rows_(1), cols_(1), data_(1, cplx{0.0, 0.0}) {}

    complex_matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0, 0.0}) {
        if (!is_allowed_dim(rows) || !is_allowed_dim(cols)) {
            throw std::invalid_argument("complex_matrix: dimensions must be in {1,2,4,8,16}");
        }
    }

    complex_matrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        if (!is_allowed_dim(rows) || !is_allowed_dim(cols)) {
            throw std::invalid_argument("complex_matrix: dimensions must be in {1,2,4,8,16}");
        }
        if (data_.size() != rows * cols) {
            throw std::invalid_argument("complex_matrix: entry count does not match dimensions");
        }
    }

    static complex_matrix identity(std::size_t n) {
        complex_matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = cplx{1.0, 0.0};
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    cplx at(std::size_t r, std::size_t c) const {
        if (r >= rows_ || c >= cols_) throw std::out_of_range("complex_matrix::at: index out of range");
        return data_[r * cols_ + c];
    }

    const std::vector<cplx>& data() const { return data_; }

    bool all_finite() const {
        for (const auto& z : data_) {
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        }
        return true;
    }

    complex_matrix dagger() const {
        complex_matrix out(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c)
                out(c, r) = std::conj((*this)(r, c));
        return out;
    }

    cplx trace() const {
        if (!square()) throw std::invalid_argument("trace: matrix not square");
        cplx t{0.0, 0.0};
        for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
        return t;
    }

    complex_matrix& operator+=(const complex_matrix& o) {
        check_same_shape(o, "operator+=");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }

    complex_matrix& operator-=(const complex_matrix& o) {
        check_same_shape(o, "operator-=");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }

    complex_matrix& operator*=(cplx s) {
        for (auto& z : data_) z *= s;
        return *this;
    }

    friend complex_matrix operator+(complex_matrix a, const complex_matrix& b) { return a += b; }
    friend complex_matrix operator-(complex_matrix a, const complex_matrix& b) { return a -= b; }
    friend complex_matrix operator*(complex_matrix a, cplx s) { return a *= s; }
    friend complex_matrix operator*(cplx s, complex_matrix a) { return a *= s; }

    friend complex_matrix operator*(const complex_matrix& a, const complex_matrix& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product: inner dimensions differ");
        complex_matrix out(a.rows_, b.cols_);
        for (std::size_t r = 0; r < a.rows_; ++r) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const cplx ark = a(r, k);
                if (ark == cplx{0.0, 0.0}) continue;
                for (std::size_t c = 0; c < b.cols_; ++c) out(r, c) += ark * b(k, c);
            }
        }
        return out;
    }

    double max_abs_diff(const complex_matrix& o) const {
        check_same_shape(o, "max_abs_diff");
        double m = 0.0;
        for (std::size_t i = 0; i < data_.size(); ++i) m = std::max(m, std::abs(data_[i] - o.data_[i]));
        return m;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& z : data_) m = std::max(m, std::abs(z));
        return m;
    }

private:
    void check_same_shape(const complex_matrix& o, const char* who) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) {
            throw std::invalid_argument(std::string(who) + ": shape mismatch");
        }
    }

    std::size_t rows_, cols_;
    std::vector<cplx> data_;
};

// Standard tensor (Kronecker) product; both factors square, product dimension <= 16.
inline complex_matrix kron(const complex_matrix& a, const complex_matrix& b) {
    if (!a.square() || !b.square()) throw std::invalid_argument("kron: factors must be square");
    const std::size_t da = a.rows(), db = b.rows();
    if (da * db > 16) throw std::invalid_argument("kron: product dimension exceeds 16");
    complex_matrix out(da * db, da * db);
    for (std::size_t ra = 0; ra < da; ++ra)
        for (std::size_t ca = 0; ca < da; ++ca) {
            const cplx f = a(ra, ca);
            if (f == cplx{0.0, 0.0}) continue;
            for (std::size_t rb = 0; rb < db; ++rb)
                for (std::size_t cb = 0; cb < db; ++cb)
                    out(ra * db + rb, ca * db + cb) = f * b(rb, cb);
        }
    return out;
}

// Hermitian wrapper: validates A = A^dagger within 1e-12 entrywise and finiteness.
class hermitian_operator {
public:
    explicit hermitian_operator(complex_matrix m) : m_(std::move(m)) {
        if (!m_.square()) throw std::invalid_argument("hermitian_operator: matrix not square");
        if (!m_.all_finite()) throw std::invalid_argument("hermitian_operator: non-finite entries");
        for (std::size_t r = 0; r < m_.rows(); ++r) {
            for (std::size_t c = r; c < m_.cols(); ++c) {
                if (std::abs(m_(r, c) - std::conj(m_(c, r))) > 1e-12) {
                    throw std::invalid_argument("hermitian_operator: symmetry check fails");
                }
            }
        }
    }

    const complex_matrix& matrix() const { return m_; }
    std::size_t dim() const { return m_.rows(); }

private:
    complex_matrix m_;
};

inline complex_matrix pauli_x() {
    return complex_matrix(2, 2, {cplx{0, 0}, cplx{1, 0}, cplx{1, 0}, cplx{0, 0}});
}

inline complex_matrix pauli_y() {
    return complex_matrix(2, 2, {cplx{0, 0}, cplx{0, -1}, cplx{0, 1}, cplx{0, 0}});
}

inline complex_matrix pauli_z() {
    return complex_matrix(2, 2, {cplx{1, 0}, cplx{0, 0}, cplx{0, 0}, cplx{-1, 0}});
}

// I x ... x op x ... x I with op at `qubit`; participant 0 = most significant bit.
inline hermitian_operator embed_single(const hermitian_operator& op, std::size_t qubit, std::size_t n) {
    if (op.dim() != 2) throw std::invalid_argument("embed_single: operator must be 2x2");
    if (qubit >= n) throw std::out_of_range("embed_single: qubit index out of range");
    if (n == 0 || n > 4) throw std::invalid_argument("embed_single: register size must be 1..4");
    complex_matrix out = complex_matrix::identity(1);
    for (std::size_t q = 0; q < n; ++q) {
        out = kron(out, q == qubit ? op.matrix() : complex_matrix::identity(2));
    }
    return hermitian_operator(out);
}

} // namespace qglue
