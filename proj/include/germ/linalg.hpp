#pragma once

#include <optional>
#include <vector>

#include "germ/poly.hpp"
#include "germ/scalar.hpp"

namespace germ {

// Dense matrix over the coefficient field.  Sizes here are tiny (graded
// slices of jets, pencils of quadratic forms), so simplicity wins.
template <class C>
class Matrix {
  public:
    using Tr = scalar_traits<C>;

    Matrix() : rows_(0), cols_(0) {}
    Matrix(int r, int c) : rows_(r), cols_(c), a_((size_t)(r * c), Tr::zero()) {}

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = Tr::one();
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    C& operator()(int i, int j) { return a_[(size_t)(i * cols_ + j)]; }
    const C& operator()(int i, int j) const { return a_[(size_t)(i * cols_ + j)]; }

    Matrix operator*(const Matrix& o) const {
        Matrix r(rows_, o.cols_);
        for (int i = 0; i < rows_; ++i)
            for (int k = 0; k < cols_; ++k) {
                if (Tr::is_zero((*this)(i, k))) continue;
                for (int j = 0; j < o.cols_; ++j)
                    r(i, j) += (*this)(i, k) * o(k, j);
            }
        return r;
    }
    Matrix operator+(const Matrix& o) const {
        Matrix r = *this;
        for (size_t i = 0; i < a_.size(); ++i) r.a_[i] += o.a_[i];
        return r;
    }
    Matrix operator-(const Matrix& o) const {
        Matrix r = *this;
        for (size_t i = 0; i < a_.size(); ++i) r.a_[i] -= o.a_[i];
        return r;
    }
    Matrix scaled(const C& s) const {
        Matrix r = *this;
        for (auto& x : r.a_) x = x * s;
        return r;
    }
    Matrix transpose() const {
        Matrix r(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }
    Matrix conj_transpose() const {
        Matrix r(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) r(j, i) = Tr::conj((*this)(i, j));
        return r;
    }
    bool operator==(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) return false;
        for (size_t i = 0; i < a_.size(); ++i)
            if (!(Tr::is_zero(a_[i] - o.a_[i]))) return false;
        return true;
    }

    std::vector<C> apply(const std::vector<C>& x) const {
        std::vector<C> y((size_t)rows_, Tr::zero());
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j)
                if (!Tr::is_zero((*this)(i, j))) y[(size_t)i] += (*this)(i, j) * x[(size_t)j];
        return y;
    }

    void swap_rows(int i, int j) {
        for (int k = 0; k < cols_; ++k) std::swap((*this)(i, k), (*this)(j, k));
    }

  private:
    int rows_, cols_;
    std::vector<C> a_;
};

// Row-reduced echelon form computed in place; returns pivot column indices.
// Pivot choice scans columns left to right (deg-lex order upstream) and takes
// the best row by pivot_size (exact: any nonzero; float: max modulus).
template <class C>
std::vector<int> rref(Matrix<C>& m) {
    using Tr = scalar_traits<C>;
    std::vector<int> pivots;
    int row = 0;
    for (int col = 0; col < m.cols() && row < m.rows(); ++col) {
        int best = -1;
        double bestsz = 0.0;
        for (int i = row; i < m.rows(); ++i) {
            double sz = Tr::pivot_size(m(i, col));
            if (sz > bestsz) { bestsz = sz; best = i; }
        }
        if (best < 0) continue;
        m.swap_rows(row, best);
        C inv = m(row, col).inverse();
        for (int k = 0; k < m.cols(); ++k) m(row, k) = m(row, k) * inv;
        m(row, col) = Tr::one();
        for (int i = 0; i < m.rows(); ++i) {
            if (i == row || Tr::is_zero(m(i, col))) continue;
            C f = m(i, col);
            for (int k = 0; k < m.cols(); ++k) m(i, k) -= f * m(row, k);
            m(i, col) = Tr::zero();
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

template <class C>
int rank(Matrix<C> m) {
    return (int)rref(m).size();
}

// Basis of the right kernel.
template <class C>
std::vector<std::vector<C>> kernel_basis(Matrix<C> m) {
    using Tr = scalar_traits<C>;
    auto pivots = rref(m);
    std::vector<bool> is_piv((size_t)m.cols(), false);
    for (int p : pivots) is_piv[(size_t)p] = true;
    std::vector<std::vector<C>> basis;
    for (int j = 0; j < m.cols(); ++j) {
        if (is_piv[(size_t)j]) continue;
        std::vector<C> v((size_t)m.cols(), Tr::zero());
        v[(size_t)j] = Tr::one();
        for (size_t r = 0; r < pivots.size(); ++r)
            v[(size_t)pivots[r]] = -m((int)r, j);
        basis.push_back(std::move(v));
    }
    return basis;
}

// Solve A x = b; returns nullopt when inconsistent.  The solution has zeros
// in the free coordinates (minimal support, not minimal norm).
template <class C>
std::optional<std::vector<C>> solve_linear(Matrix<C> a, std::vector<C> b) {
    using Tr = scalar_traits<C>;
    Matrix<C> aug(a.rows(), a.cols() + 1);
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
        aug(i, a.cols()) = b[(size_t)i];
    }
    auto pivots = rref(aug);
    if (!pivots.empty() && pivots.back() == a.cols()) return std::nullopt; // pivot in b column
    std::vector<C> x((size_t)a.cols(), Tr::zero());
    for (size_t r = 0; r < pivots.size(); ++r)
        x[(size_t)pivots[r]] = aug((int)r, a.cols());
    return x;
}

template <class C>
std::optional<Matrix<C>> inverse(const Matrix<C>& a) {
    using Tr = scalar_traits<C>;
    if (a.rows() != a.cols()) return std::nullopt;
    int n = a.rows();
    Matrix<C> aug(n, 2 * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) aug(i, j) = a(i, j);
        aug(i, n + i) = Tr::one();
    }
    auto pivots = rref(aug);
    if ((int)pivots.size() < n || pivots[(size_t)n - 1] >= n) return std::nullopt;
    Matrix<C> inv(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
    return inv;
}

template <class C>
C det(Matrix<C> m) {
    using Tr = scalar_traits<C>;
    if (m.rows() != m.cols()) throw Error("det: not square");
    int n = m.rows();
    C d = Tr::one();
    for (int col = 0; col < n; ++col) {
        int best = -1;
        double bestsz = 0.0;
        for (int i = col; i < n; ++i) {
            double sz = Tr::pivot_size(m(i, col));
            if (sz > bestsz) { bestsz = sz; best = i; }
        }
        if (best < 0) return Tr::zero();
        if (best != col) {
            m.swap_rows(col, best);
            d = -d;
        }
        d = d * m(col, col);
        C inv = m(col, col).inverse();
        for (int i = col + 1; i < n; ++i) {
            if (Tr::is_zero(m(i, col))) continue;
            C f = m(i, col) * inv;
            for (int k = col; k < n; ++k) m(i, k) -= f * m(col, k);
        }
    }
    return d;
}

// Characteristic polynomial by Faddeev-LeVerrier (exact in char 0).
template <class C>
Poly<C> char_poly(const Matrix<C>& a) {
    using Tr = scalar_traits<C>;
    int n = a.rows();
    std::vector<C> c((size_t)n + 1, Tr::zero());
    c[(size_t)n] = Tr::one(); // monic: det(tI - A)
    Matrix<C> m = Matrix<C>::identity(n);
    C ck = Tr::one();
    for (int k = 1; k <= n; ++k) {
        m = a * m;
        C tr = Tr::zero();
        for (int i = 0; i < n; ++i) tr += m(i, i);
        ck = tr * C(-1, (long)k);
        c[(size_t)(n - k)] = ck;
        for (int i = 0; i < n; ++i) m(i, i) += ck;
    }
    return Poly<C>(std::move(c));
}

// Least-norm solver for a fixed matrix, factored once and reused across
// right-hand sides.
template <class C>
class FrozenLeastNorm {
  public:
    using Tr = scalar_traits<C>;

    explicit FrozenLeastNorm(Matrix<C> a) : a_(std::move(a)) {
        // T A = R recorded via an augmented identity block
        rref_ = Matrix<C>(a_.rows(), a_.cols() + a_.rows());
        for (int i = 0; i < a_.rows(); ++i) {
            for (int j = 0; j < a_.cols(); ++j) rref_(i, j) = a_(i, j);
            rref_(i, a_.cols() + i) = Tr::one();
        }
        int row = 0;
        for (int col = 0; col < a_.cols() && row < a_.rows(); ++col) {
            int best = -1;
            double bestsz = 0.0;
            for (int i = row; i < rref_.rows(); ++i) {
                double sz = Tr::pivot_size(rref_(i, col));
                if (sz > bestsz) { bestsz = sz; best = i; }
            }
            if (best < 0) continue;
            rref_.swap_rows(row, best);
            C inv = rref_(row, col).inverse();
            for (int k = 0; k < rref_.cols(); ++k) rref_(row, k) = rref_(row, k) * inv;
            for (int i = 0; i < rref_.rows(); ++i) {
                if (i == row || Tr::is_zero(rref_(i, col))) continue;
                C f = rref_(i, col);
                for (int k = 0; k < rref_.cols(); ++k) rref_(i, k) -= f * rref_(row, k);
            }
            pivots_.push_back(col);
            ++row;
        }
        rank_ = (int)pivots_.size();
        kernel_ = kernel_basis(a_);
        if (!kernel_.empty()) {
            int kd = (int)kernel_.size();
            Matrix<C> gram(kd, kd);
            for (int i = 0; i < kd; ++i)
                for (int j = 0; j < kd; ++j) {
                    C s = Tr::zero();
                    for (size_t t = 0; t < kernel_[(size_t)i].size(); ++t)
                        s += Tr::conj(kernel_[(size_t)i][t]) * kernel_[(size_t)j][t];
                    gram(i, j) = s;
                }
            auto gi = inverse(gram);
            if (gi) gram_inv_ = *gi;
        }
    }

    int rank() const { return rank_; }

    std::optional<std::vector<C>> solve(const std::vector<C>& b) const {
        std::vector<C> y((size_t)a_.rows(), Tr::zero());
        for (int i = 0; i < a_.rows(); ++i) {
            C s = Tr::zero();
            for (int j = 0; j < a_.rows(); ++j)
                if (!Tr::is_zero(rref_(i, a_.cols() + j)))
                    s += rref_(i, a_.cols() + j) * b[(size_t)j];
            y[(size_t)i] = s;
        }
        for (int i = rank_; i < a_.rows(); ++i)
            if (!Tr::is_zero(y[(size_t)i])) return std::nullopt;
        std::vector<C> x((size_t)a_.cols(), Tr::zero());
        for (int r = 0; r < rank_; ++r) x[(size_t)pivots_[(size_t)r]] = y[(size_t)r];
        if (!kernel_.empty() && gram_inv_.rows() > 0) {
            int kd = (int)kernel_.size();
            std::vector<C> khx((size_t)kd, Tr::zero());
            for (int i = 0; i < kd; ++i) {
                C s = Tr::zero();
                for (size_t t = 0; t < x.size(); ++t)
                    s += Tr::conj(kernel_[(size_t)i][t]) * x[t];
                khx[(size_t)i] = s;
            }
            for (int i = 0; i < kd; ++i) {
                C z = Tr::zero();
                for (int j = 0; j < kd; ++j) z += gram_inv_(i, j) * khx[(size_t)j];
                for (size_t t = 0; t < x.size(); ++t)
                    x[t] -= kernel_[(size_t)i][t] * z;
            }
        }
        return x;
    }

  private:
    Matrix<C> a_, rref_, gram_inv_;
    std::vector<int> pivots_;
    std::vector<std::vector<C>> kernel_;
    int rank_ = 0;
};

// Minimal-norm solution of A x = b (Hermitian norm), or nullopt when
// inconsistent.  Exact over Q(i): take any particular solution, then remove
// its projection onto the kernel via the normal equations.
template <class C>
std::optional<std::vector<C>> least_norm_solve(const Matrix<C>& a, const std::vector<C>& b) {
    using Tr = scalar_traits<C>;
    auto part = solve_linear(a, b);
    if (!part) return std::nullopt;
    auto ker = kernel_basis(a);
    if (ker.empty()) return part;
    int kd = (int)ker.size();
    // Solve (K* K) y = K* x_part and subtract K y.
    Matrix<C> g(kd, kd);
    std::vector<C> rhs((size_t)kd, Tr::zero());
    for (int i = 0; i < kd; ++i) {
        for (int j = 0; j < kd; ++j) {
            C s = Tr::zero();
            for (size_t t = 0; t < ker[(size_t)i].size(); ++t)
                s += Tr::conj(ker[(size_t)i][t]) * ker[(size_t)j][t];
            g(i, j) = s;
        }
        C s = Tr::zero();
        for (size_t t = 0; t < ker[(size_t)i].size(); ++t)
            s += Tr::conj(ker[(size_t)i][t]) * (*part)[t];
        rhs[(size_t)i] = s;
    }
    auto y = solve_linear(g, rhs);
    if (!y) return part; // Gram singular only in float round-off corners
    for (int i = 0; i < kd; ++i)
        for (size_t t = 0; t < part->size(); ++t)
            (*part)[t] -= ker[(size_t)i][t] * (*y)[(size_t)i];
    return part;
}

} // namespace germ
