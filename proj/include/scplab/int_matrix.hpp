// Dense integer matrices and lattice reductions (Hermite / Smith forms).
#pragma once

#include "scplab/numeric.hpp"

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace scplab {

using IntVector = std::vector<Int>;
/// Character / lattice point with machine-width coordinates.
using Character = std::vector<std::int64_t>;

class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    IntMatrix(std::initializer_list<std::initializer_list<long>> rows) {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        for (const auto& r : rows) {
            if (r.size() != cols_) throw std::invalid_argument("ragged matrix literal");
            for (long v : r) data_.emplace_back(v);
        }
    }

    static IntMatrix from_rows(const std::vector<IntVector>& rows) {
        IntMatrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
        for (std::size_t r = 0; r < m.rows_; ++r) {
            if (rows[r].size() != m.cols_) throw std::invalid_argument("ragged matrix rows");
            for (std::size_t c = 0; c < m.cols_; ++c) m(r, c) = rows[r][c];
        }
        return m;
    }

    static IntMatrix identity(std::size_t d) {
        IntMatrix m(d, d);
        for (std::size_t i = 0; i < d; ++i) m(i, i) = 1;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    Int& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Int& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    IntVector row(std::size_t r) const { return IntVector(data_.begin() + r * cols_, data_.begin() + (r + 1) * cols_); }

    std::vector<IntVector> row_list() const {
        std::vector<IntVector> out;
        for (std::size_t r = 0; r < rows_; ++r) out.push_back(row(r));
        return out;
    }

    IntMatrix transpose() const {
        IntMatrix t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
        return t;
    }

    friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("matrix shape mismatch");
        IntMatrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                if (a(i, k) == 0) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += a(i, k) * b(k, j);
            }
        return out;
    }

    friend bool operator==(const IntMatrix& a, const IntMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    IntVector apply(const IntVector& v) const {
        if (v.size() != cols_) throw std::invalid_argument("vector length mismatch");
        IntVector out(rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) out[r] += (*this)(r, c) * v[c];
        return out;
    }

    Character apply(const Character& v) const {
        if (v.size() != cols_) throw std::invalid_argument("vector length mismatch");
        Character out(rows_, 0);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) {
                const Int& e = (*this)(r, c);
                if (e == 0 || v[c] == 0) continue;
                if (e > INT64_MAX || e < INT64_MIN) throw std::overflow_error("character overflow");
                out[r] = checked_add(out[r], checked_mul(e.convert_to<std::int64_t>(), v[c]));
            }
        return out;
    }

    std::vector<double> apply(const std::vector<double>& v) const {
        if (v.size() != cols_) throw std::invalid_argument("vector length mismatch");
        std::vector<double> out(rows_, 0.0);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) out[r] += (*this)(r, c).convert_to<double>() * v[c];
        return out;
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    Int determinant() const {
        if (!square()) throw std::invalid_argument("determinant of non-square matrix");
        const std::size_t n = rows_;
        if (n == 0) return 1;
        IntMatrix a = *this;
        Int prev = 1;
        int sign = 1;
        for (std::size_t k = 0; k + 1 < n; ++k) {
            if (a(k, k) == 0) {
                std::size_t swap = k + 1;
                while (swap < n && a(swap, k) == 0) ++swap;
                if (swap == n) return 0;
                for (std::size_t c = 0; c < n; ++c) std::swap(a(k, c), a(swap, c));
                sign = -sign;
            }
            for (std::size_t i = k + 1; i < n; ++i)
                for (std::size_t j = k + 1; j < n; ++j) a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
            prev = a(k, k);
        }
        return sign * a(n - 1, n - 1);
    }

    /// Inverse of a matrix with determinant +-1, exact.
    IntMatrix unimodular_inverse() const {
        Int det = determinant();
        if (det != 1 && det != -1) throw std::invalid_argument("matrix is not unimodular");
        const std::size_t n = rows_;
        std::vector<std::vector<Rational>> aug(n, std::vector<Rational>(2 * n));
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) aug[r][c] = Rational((*this)(r, c));
            aug[r][n + r] = 1;
        }
        for (std::size_t col = 0; col < n; ++col) {
            std::size_t piv = col;
            while (aug[piv][col] == 0) ++piv;
            std::swap(aug[piv], aug[col]);
            Rational inv = 1 / aug[col][col];
            for (auto& x : aug[col]) x *= inv;
            for (std::size_t r = 0; r < n; ++r) {
                if (r == col || aug[r][col] == 0) continue;
                Rational f = aug[r][col];
                for (std::size_t c = 0; c < 2 * n; ++c) aug[r][c] -= f * aug[col][c];
            }
        }
        IntMatrix out(n, n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) out(r, c) = numerator_of(aug[r][n + c]);
        return out;
    }

    /// Integer power; negative exponents require a unimodular matrix.
    IntMatrix power(long long n) const {
        if (!square()) throw std::invalid_argument("power of non-square matrix");
        IntMatrix base = n < 0 ? unimodular_inverse() : *this;
        unsigned long long e = n < 0 ? static_cast<unsigned long long>(-n) : static_cast<unsigned long long>(n);
        IntMatrix out = identity(rows_);
        while (e) {
            if (e & 1ULL) out = out * base;
            base = base * base;
            e >>= 1ULL;
        }
        return out;
    }

    std::string str() const {
        std::ostringstream os;
        for (std::size_t r = 0; r < rows_; ++r) {
            if (r) os << ';';
            for (std::size_t c = 0; c < cols_; ++c) os << (c ? "," : "") << (*this)(r, c);
        }
        return os.str();
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Int> data_;
};

namespace detail {

inline Int floor_div(const Int& a, const Int& b) {
    Int q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) q -= 1;
    return q;
}

inline void extended_gcd(const Int& a, const Int& b, Int& g, Int& s, Int& t) {
    Int old_r = a, r = b, old_s = 1, cs = 0, old_t = 0, ct = 1;
    while (r != 0) {
        Int q = old_r / r;
        Int tmp = old_r - q * r;
        old_r = r;
        r = tmp;
        tmp = old_s - q * cs;
        old_s = cs;
        cs = tmp;
        tmp = old_t - q * ct;
        old_t = ct;
        ct = tmp;
    }
    g = old_r;
    s = old_s;
    t = old_t;
}

}  // namespace detail

/// Row-style Hermite reduction pivoting on the first `pivot_cols` columns.
/// Returns the number of pivot rows; remaining rows are zero on the pivot block.
inline std::size_t hermite_reduce(std::vector<IntVector>& rows, std::size_t pivot_cols) {
    std::size_t pr = 0;
    const std::size_t n = rows.size();
    for (std::size_t col = 0; col < pivot_cols && pr < n; ++col) {
        for (std::size_t i = pr + 1; i < n; ++i) {
            if (rows[i][col] == 0) continue;
            Int a = rows[pr][col], b = rows[i][col], g, s, t;
            detail::extended_gcd(a, b, g, s, t);
            Int ag = a / g, bg = b / g;
            IntVector top(rows[pr].size()), bottom(rows[pr].size());
            for (std::size_t c = 0; c < top.size(); ++c) {
                top[c] = s * rows[pr][c] + t * rows[i][c];
                bottom[c] = -bg * rows[pr][c] + ag * rows[i][c];
            }
            rows[pr] = std::move(top);
            rows[i] = std::move(bottom);
        }
        if (rows[pr][col] == 0) continue;
        if (rows[pr][col] < 0)
            for (auto& x : rows[pr]) x = -x;
        const Int& p = rows[pr][col];
        for (std::size_t i = 0; i < pr; ++i) {
            Int q = detail::floor_div(rows[i][col], p);
            if (q == 0) continue;
            for (std::size_t c = 0; c < rows[i].size(); ++c) rows[i][c] -= q * rows[pr][c];
        }
        ++pr;
    }
    return pr;
}

/// Canonical basis (row Hermite normal form) of the lattice spanned by `generators`.
inline std::vector<IntVector> hermite_basis(std::vector<IntVector> generators, std::size_t dim) {
    for (const auto& g : generators)
        if (g.size() != dim) throw std::invalid_argument("generator dimension mismatch");
    std::size_t rank = hermite_reduce(generators, dim);
    generators.resize(rank);
    return generators;
}

/// Basis of the integer kernel {u : sum_i u_i * rows[i] = 0}.
inline std::vector<IntVector> integer_left_kernel(const std::vector<IntVector>& rows, std::size_t dim) {
    const std::size_t n = rows.size();
    std::vector<IntVector> aug(n);
    for (std::size_t i = 0; i < n; ++i) {
        aug[i] = rows[i];
        aug[i].resize(dim + n);
        aug[i][dim + i] = 1;
    }
    std::size_t rank = hermite_reduce(aug, dim);
    std::vector<IntVector> kernel;
    for (std::size_t i = rank; i < n; ++i) kernel.emplace_back(aug[i].begin() + dim, aug[i].end());
    return hermite_basis(kernel, n);
}

/// Invariant factors of the lattice spanned by `basis` rows (nonzero ones only).
inline std::vector<Int> smith_invariants(const std::vector<IntVector>& basis, std::size_t dim) {
    std::vector<IntVector> m = basis;
    const std::size_t r = m.size();
    // Alternate row and column Hermite passes until diagonal.
    for (int guard = 0; guard < 256; ++guard) {
        hermite_reduce(m, dim);
        std::vector<IntVector> t(dim, IntVector(r));
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < dim; ++j) t[j][i] = m[i][j];
        hermite_reduce(t, r);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < dim; ++j) m[i][j] = t[j][i];
        bool diagonal = true;
        for (std::size_t i = 0; i < r && diagonal; ++i)
            for (std::size_t j = 0; j < dim; ++j)
                if (i != j && m[i][j] != 0) {
                    diagonal = false;
                    break;
                }
        if (diagonal) break;
    }
    std::vector<Int> diag;
    for (std::size_t i = 0; i < r && i < dim; ++i)
        if (m[i][i] != 0) diag.push_back(boost::multiprecision::abs(m[i][i]));
    // Enforce the divisibility chain.
    for (std::size_t i = 0; i < diag.size(); ++i)
        for (std::size_t j = i + 1; j < diag.size(); ++j) {
            Int g = boost::multiprecision::gcd(diag[i], diag[j]);
            Int l = diag[i] / g * diag[j];
            diag[i] = g;
            diag[j] = l;
        }
    return diag;
}

}  // namespace scplab
