#pragma once

#include <algorithm>
#include <vector>

#include "germ/jet.hpp"
#include "germ/linalg.hpp"
#include "germ/roots.hpp"

namespace germ {

// Pair of symmetric matrices (q_f, q_g); q_f nondegenerate where claimed.
template <class C>
struct QuadraticPair {
    Matrix<C> qf, qg;
};

template <class C>
struct PencilBlock {
    C lambda;
    int size;
};

template <class C>
struct PencilResult {
    Matrix<C> basis; // columns form the new basis P
    std::vector<PencilBlock<C>> blocks;
    bool diagonalizable = true;
    Matrix<C> qf_normal, qg_normal; // P^T q P, recomputed and verified
};

// Quadratic part of a jet as a symmetric matrix Q with f_2 = x^T Q x.
template <class C>
Matrix<C> quadratic_part(const Jet<C>& f) {
    using Tr = scalar_traits<C>;
    int n = f.nvars();
    Matrix<C> q(n, n);
    Jet<C> f2 = f.graded_part(2);
    for (auto& [m, c] : f2.terms()) {
        int i = -1, j = -1;
        for (int k = 0; k < n; ++k) {
            for (int e = 0; e < m[k]; ++e) {
                if (i < 0) i = k;
                else j = k;
            }
        }
        if (i == j || j < 0) {
            q(i, i) = c;
        } else {
            C half = c * C(1, 2);
            q(i, j) += half;
            q(j, i) += half;
        }
        (void)Tr::zero();
    }
    return q;
}

namespace detail {

// Canonical chain construction for a nilpotent operator N that is
// self-adjoint for a nondegenerate symmetric form B.  Returns chains as
// column groups [N^{h-1}v | ... | Nv | v]; in that order B restricted to a
// chain is the anti-identity.
template <class C>
std::vector<std::vector<std::vector<C>>> canonical_chains(Matrix<C> B, Matrix<C> N) {
    using Tr = scalar_traits<C>;
    int m = B.rows();
    std::vector<std::vector<std::vector<C>>> chains;
    if (m == 0) return chains;

    auto mat_vec = [](const Matrix<C>& a, const std::vector<C>& x) { return a.apply(x); };
    auto form = [&](const std::vector<C>& u, const std::vector<C>& w) {
        C s = Tr::zero();
        auto bu = B.apply(w);
        for (size_t i = 0; i < u.size(); ++i) s += u[i] * bu[i];
        return s;
    };

    // nilpotency index
    int h = 0;
    {
        Matrix<C> p = Matrix<C>::identity(m);
        while (h <= m) {
            bool zero = true;
            for (int i = 0; i < m && zero; ++i)
                for (int j = 0; j < m && zero; ++j)
                    if (!Tr::is_zero(p(i, j))) zero = false;
            if (zero) break;
            p = N * p;
            ++h;
        }
    }
    if (h == 0) h = 1; // N = 0 on a nonzero space still yields 1-chains

    // N^{h-1}
    Matrix<C> nh1 = Matrix<C>::identity(m);
    for (int k = 0; k < h - 1; ++k) nh1 = N * nh1;

    // Find v with B(N^{h-1} v, v) != 0 among basis vectors and pairwise sums.
    std::vector<C> v;
    {
        auto q_of = [&](const std::vector<C>& u) { return form(mat_vec(nh1, u), u); };
        std::vector<std::vector<C>> cand;
        for (int i = 0; i < m; ++i) {
            std::vector<C> e((size_t)m, Tr::zero());
            e[(size_t)i] = Tr::one();
            cand.push_back(e);
        }
        int mm = m;
        for (int i = 0; i < mm; ++i)
            for (int j = i + 1; j < mm; ++j) {
                std::vector<C> s((size_t)m, Tr::zero());
                s[(size_t)i] = Tr::one();
                s[(size_t)j] = Tr::one();
                cand.push_back(s);
            }
        for (auto& u : cand) {
            if (!Tr::is_zero(q_of(u))) { v = u; break; }
        }
        if (v.empty())
            throw Error("pencil: degenerate pairing (q_f not nondegenerate?)");
    }

    // Normalize B(N^{h-1}v, v) = 1 (needs a square root in the field).
    {
        C beta = form(mat_vec(nh1, v), v);
        auto r = Tr::sqrt(beta);
        if (!r)
            throw FieldError("pencil: chain normalization needs sqrt(" +
                             Tr::str(beta) + ") outside the field; use float mode");
        C rinv = r->inverse();
        for (auto& x : v) x = x * rinv;
    }

    // Powers N^k v.
    std::vector<std::vector<C>> pw;
    pw.push_back(v);
    for (int k = 1; k < h; ++k) pw.push_back(mat_vec(N, pw.back()));

    // Kill B(N^s v, v) for s = h-2 .. 0 via v <- v + t N^{h-1-s} v.
    for (int s = h - 2; s >= 0; --s) {
        C beta_s = form(pw[(size_t)s], pw[0]);
        if (Tr::is_zero(beta_s)) continue;
        C t = -(beta_s * C(1, 2));
        int k = h - 1 - s;
        for (size_t i = 0; i < v.size(); ++i) v[i] += pw[(size_t)k][i] * t;
        pw.clear();
        pw.push_back(v);
        for (int kk = 1; kk < h; ++kk) pw.push_back(mat_vec(N, pw.back()));
    }

    // Chain columns bottom-up: [N^{h-1}v, ..., Nv, v].
    std::vector<std::vector<C>> chain;
    for (int k = h - 1; k >= 0; --k) chain.push_back(pw[(size_t)k]);
    chains.push_back(chain);

    if (h == m) return chains;

    // B-orthogonal complement of the chain span; N stabilizes it.
    Matrix<C> eqs(h, m);
    for (int r = 0; r < h; ++r) {
        auto bw = B.apply(pw[(size_t)r]);
        for (int j = 0; j < m; ++j) eqs(r, j) = bw[(size_t)j];
    }
    auto comp = kernel_basis(eqs);
    int c = (int)comp.size();
    if (c != m - h) throw Error("pencil: complement dimension mismatch");

    // Restrict B and N to the complement: columns of E are the comp basis.
    Matrix<C> E(m, c);
    for (int j = 0; j < c; ++j)
        for (int i = 0; i < m; ++i) E(i, j) = comp[(size_t)j][(size_t)i];
    Matrix<C> Bc = E.transpose() * B * E;
    // N E = E X  =>  X = solve (columnwise)
    Matrix<C> NE = N * E;
    Matrix<C> X(c, c);
    {
        // Solve E X = NE column by column (E has full column rank).
        for (int j = 0; j < c; ++j) {
            std::vector<C> rhs((size_t)m, Tr::zero());
            for (int i = 0; i < m; ++i) rhs[(size_t)i] = NE(i, j);
            auto sol = solve_linear(E, rhs);
            if (!sol) throw Error("pencil: complement not N-stable");
            for (int i = 0; i < c; ++i) X(i, j) = (*sol)[(size_t)i];
        }
    }
    auto sub = canonical_chains(Bc, X);
    for (auto& ch : sub) {
        std::vector<std::vector<C>> lifted;
        for (auto& w : ch) {
            std::vector<C> lw((size_t)m, Tr::zero());
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < c; ++j) lw[(size_t)i] += E(i, j) * w[(size_t)j];
            lifted.push_back(std::move(lw));
        }
        chains.push_back(std::move(lifted));
    }
    return chains;
}

} // namespace detail

// Simultaneous block normal form for a pair of symmetric forms with q_f
// nondegenerate: returns P with P^T q_f P made of anti-identity blocks and
// P^T q_g P the matching lambda blocks.  Works over Q(i) exactly; raises
// FieldError when an eigenvalue or a normalizing square root leaves the field.
template <class C>
PencilResult<C> block_diagonalize_pencil(const QuadraticPair<C>& p) {
    using Tr = scalar_traits<C>;
    int n = p.qf.rows();
    if (p.qf.cols() != n || p.qg.rows() != n || p.qg.cols() != n)
        throw InputError("pencil: shape mismatch");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (!Tr::is_zero(p.qf(i, j) - p.qf(j, i)) || !Tr::is_zero(p.qg(i, j) - p.qg(j, i)))
                throw InputError("pencil: matrices must be symmetric");
    auto qfinv = inverse(p.qf);
    if (!qfinv) throw NotMorse("pencil: q_f is degenerate");
    Matrix<C> M = *qfinv * p.qg;

    auto roots = field_roots(char_poly(M));
    // canonical eigenvalue order
    std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
        return scalar_traits<C>::lex_less(a.value, b.value);
    });

    PencilResult<C> out;
    out.basis = Matrix<C>(n, n);
    int col = 0;
    for (auto& rm : roots) {
        // generalized eigenspace: ker (M - lambda)^mult
        Matrix<C> A = Matrix<C>::identity(n);
        Matrix<C> Mshift = M;
        for (int i = 0; i < n; ++i) Mshift(i, i) -= rm.value;
        for (int k = 0; k < rm.multiplicity; ++k) A = Mshift * A;
        auto basis = kernel_basis(A);
        int m = (int)basis.size();
        if (m != rm.multiplicity)
            throw Error("pencil: generalized eigenspace dimension mismatch");
        Matrix<C> E(n, m);
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < n; ++i) E(i, j) = basis[(size_t)j][(size_t)i];
        Matrix<C> B = E.transpose() * p.qf * E;
        Matrix<C> ME = Mshift * E;
        Matrix<C> Nmat(m, m);
        for (int j = 0; j < m; ++j) {
            std::vector<C> rhs((size_t)n, Tr::zero());
            for (int i = 0; i < n; ++i) rhs[(size_t)i] = ME(i, j);
            auto sol = solve_linear(E, rhs);
            if (!sol) throw Error("pencil: eigenspace not invariant");
            for (int i = 0; i < m; ++i) Nmat(i, j) = (*sol)[(size_t)i];
        }
        auto chains = detail::canonical_chains(B, Nmat);
        std::sort(chains.begin(), chains.end(),
                  [](const auto& a, const auto& b) { return a.size() > b.size(); });
        for (auto& ch : chains) {
            out.blocks.push_back({rm.value, (int)ch.size()});
            if ((int)ch.size() > 1) out.diagonalizable = false;
            for (auto& w : ch) {
                for (int i = 0; i < n; ++i) {
                    C x = Tr::zero();
                    for (int j = 0; j < m; ++j) x += E(i, j) * w[(size_t)j];
                    out.basis(i, col) = x;
                }
                ++col;
            }
        }
    }
    if (col != n) throw Error("pencil: basis assembly failed");

    // Exact congruence verification against the expected block shapes.
    out.qf_normal = out.basis.transpose() * p.qf * out.basis;
    out.qg_normal = out.basis.transpose() * p.qg * out.basis;
    Matrix<C> ef(n, n), eg(n, n);
    int at = 0;
    for (auto& b : out.blocks) {
        for (int i = 0; i < b.size; ++i) {
            ef(at + i, at + b.size - 1 - i) = Tr::one();
            eg(at + i, at + b.size - 1 - i) = b.lambda;
            if (i + 1 < b.size) eg(at + i + 1, at + b.size - 1 - i) += Tr::one();
        }
        at += b.size;
    }
    // symmetrize the expected q_g (the sub-anti-diagonal ones)
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            C s = (eg(i, j) + eg(j, i)) * C(1, 2);
            eg(i, j) = s;
            eg(j, i) = s;
        }
    if (!(out.qf_normal == ef) || !(out.qg_normal == eg))
        throw Error("pencil: congruence verification failed");
    return out;
}

} // namespace germ
