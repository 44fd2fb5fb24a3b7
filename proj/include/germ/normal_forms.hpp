#pragma once

#include <algorithm>
#include <vector>

#include "germ/diffeo.hpp"
#include "germ/pencil.hpp"
#include "germ/series.hpp"

namespace germ {

template <class C>
Jet<C> sum_of_squares_jet(int nvars, int order) {
    Jet<C> f(nvars, order);
    for (int i = 0; i < nvars; ++i)
        f.add_term(Monomial::var(i, nvars, 2), scalar_traits<C>::one());
    return f;
}

namespace detail {

template <class C>
C GaussQish_i();
template <>
inline GaussQ GaussQish_i<GaussQ>() { return GaussQ::i_unit(); }
template <>
inline FloatC GaussQish_i<FloatC>() { return FloatC(std::complex<double>(0.0, 1.0)); }

// Split a jet lying in <x_lo..x_{n-1}>^2 as sum x_i x_j H_ij(x) with H
// symmetric (Hadamard splitting at jet level).
template <class C>
std::vector<std::vector<Jet<C>>> hadamard_split(const Jet<C>& t, int lo) {
    int n = t.nvars(), K = t.order();
    std::vector<std::vector<Jet<C>>> h((size_t)n, std::vector<Jet<C>>((size_t)n, Jet<C>::zero(n, K)));
    for (auto& [m, c] : t.terms()) {
        int i = -1, j = -1;
        for (int k = lo; k < n && j < 0; ++k) {
            int e = m[k];
            if (e == 0) continue;
            if (i < 0) {
                i = k;
                if (e >= 2) j = k;
            } else {
                j = k;
            }
        }
        if (j < 0)
            throw Error("morse: remainder not quadratic in the working variables");
        Monomial q = m;
        q.e[(size_t)i] -= 1;
        q.e[(size_t)j] -= 1;
        if (i == j) {
            h[(size_t)i][(size_t)i].add_term(q, c);
        } else {
            C half = c * C(1, 2);
            h[(size_t)i][(size_t)j].add_term(q, half);
            h[(size_t)j][(size_t)i].add_term(q, half);
        }
    }
    return h;
}

// Try to make position (r, r) of the split carry a pivot whose constant term
// has a square root in the field: swaps, then bounded mixes x_s <- x_s + t x_u.
// Returns the linear pre-change applied to F (identity when none needed).
template <class C>
std::optional<Matrix<C>> pivot_fixup(const std::vector<std::vector<Jet<C>>>& h, int r) {
    using Tr = scalar_traits<C>;
    int n = (int)h.size();
    auto diag0 = [&](int s) { return h[(size_t)s][(size_t)s].constant_term(); };
    auto off0 = [&](int s, int u) { return h[(size_t)s][(size_t)u].constant_term(); };
    auto usable = [&](const C& c) {
        if (Tr::is_zero(c)) return false;
        if constexpr (Tr::exact) return Tr::sqrt(c).has_value();
        else return true;
    };
    // 1) a diagonal entry that already works: swap it into place
    for (int s = r; s < n; ++s) {
        if (usable(diag0(s))) {
            Matrix<C> lin = Matrix<C>::identity(n);
            if (s != r) {
                lin(r, r) = Tr::zero(); lin(s, s) = Tr::zero();
                lin(r, s) = Tr::one(); lin(s, r) = Tr::one();
            }
            return lin;
        }
    }
    // 2) mix two variables: new pivot = H_ss + 2t H_su + t^2 H_uu at 0
    std::vector<C> ts;
    for (long num : {1L, -1L, 2L, -2L, 3L, -3L}) {
        for (long den : {1L, 2L, 3L}) {
            ts.push_back(C(num, den));
            if constexpr (Tr::exact) {
                C t = C(num, den);
                ts.push_back(t * GaussQish_i<C>());
            }
        }
    }
    for (int s = r; s < n; ++s)
        for (int u = r; u < n; ++u) {
            if (s == u) continue;
            for (auto& t : ts) {
                C cand = diag0(s) + off0(s, u) * t * C(2) + diag0(u) * t * t;
                if (!usable(cand)) continue;
                Matrix<C> lin = Matrix<C>::identity(n);
                lin(u, s) = t; // x_s <- x_s + t x_u means column update on points
                if (s != r) {
                    // swap roles of r and s afterwards
                    Matrix<C> sw = Matrix<C>::identity(n);
                    sw(r, r) = Tr::zero(); sw(s, s) = Tr::zero();
                    sw(r, s) = Tr::one(); sw(s, r) = Tr::one();
                    lin = lin * sw;
                }
                return lin;
            }
        }
    return std::nullopt;
}

} // namespace detail

// Completion of squares in the variables [start, n): finds phi with
// F o phi = head + sum_{i >= start} x_i^2 through the order, where head is
// the part of F depending only on the earlier variables and F - head lies in
// <x_start, ..., x_{n-1}>^2.  Exact mode requires each pivot (after a bounded
// fix-up search) to be a square in the field; FieldError directs to float.
template <class C>
DiffeoJet<C> complete_squares_from(const Jet<C>& f, int start, const Jet<C>& head) {
    using Tr = scalar_traits<C>;
    int n = f.nvars(), K = f.order();
    Jet<C> F = f;
    DiffeoJet<C> phi = DiffeoJet<C>::identity(n, K);
    Jet<C> squares = head;
    for (int r = start; r < n; ++r) {
        auto h = detail::hadamard_split(F - squares, r);
        auto fix = detail::pivot_fixup(h, r);
        if (!fix)
            throw FieldError("morse: no pivot with a field square root; the Hessian "
                             "may not be congruent to the identity over Q(i): use float mode");
        bool is_id = (*fix == Matrix<C>::identity(n));
        if (!is_id) {
            DiffeoJet<C> lin = DiffeoJet<C>::from_linear(*fix, K);
            F = lin.apply(F);
            phi = phi.then_after(lin);
            h = detail::hadamard_split(F - squares, r);
        }
        Jet<C>& hrr = h[(size_t)r][(size_t)r];
        C pivot = hrr.constant_term();
        auto root0 = Tr::sqrt(pivot);
        if (!root0)
            throw FieldError("morse: pivot " + Tr::str(pivot) + " has no field square root");
        // y_r = sqrt(H_rr) (x_r + sum_{i>r} x_i H_ir / H_rr)
        Jet<C> w = Jet<C>::zero(n, K);
        Jet<C> hrr_inv = hrr.inverse();
        for (int i = r + 1; i < n; ++i)
            w += Jet<C>::variable(i, n, K) * h[(size_t)i][(size_t)r] * hrr_inv;
        Jet<C> yr = hrr.kth_root_with(*root0, 2) * (Jet<C>::variable(r, n, K) + w);
        std::vector<Jet<C>> comps;
        for (int i = 0; i < n; ++i)
            comps.push_back(i == r ? yr : Jet<C>::variable(i, n, K));
        DiffeoJet<C> step(std::move(comps));
        DiffeoJet<C> stepinv = step.inverse_diffeo();
        F = stepinv.apply(F);
        phi = phi.then_after(stepinv);
        squares.add_term(Monomial::var(r, n, 2), Tr::one());
    }
    if (!(F == squares))
        throw Error("morse: completion of squares did not verify");
    if (!(phi.apply(f) == F))
        throw Error("morse: composition check failed");
    return phi;
}

// Morse normalization: phi with f o phi = sum x_i^2 through the jet order.
template <class C>
DiffeoJet<C> morse_normalize(const Jet<C>& f) {
    using Tr = scalar_traits<C>;
    int n = f.nvars(), K = f.order();
    if (!Tr::is_zero(f.constant_term())) throw NotMorse("morse: f(0) != 0");
    for (int i = 0; i < n; ++i)
        if (!Tr::is_zero(f.derivative(i).constant_term()))
            throw NotMorse("morse: df(0) != 0");
    {
        Matrix<C> q = quadratic_part(f);
        if (!inverse(q)) throw NotMorse("morse: degenerate Hessian");
    }
    return complete_squares_from(f, 0, Jet<C>::zero(n, K));
}

// Diagonalized pair: quadratic parts exactly (sum x^2, sum lambda x^2).
template <class C>
struct DiagonalizedPair {
    DiffeoJet<C> phi;
    std::vector<C> lambda;
    Jet<C> f, g; // transformed jets
};

template <class C>
DiagonalizedPair<C> diagonalize_pair(const Jet<C>& f, const Jet<C>& g) {
    using Tr = scalar_traits<C>;
    int n = f.nvars();
    if (g.nvars() != n) throw InputError("diagonalize_pair: variable mismatch");
    DiffeoJet<C> phi1 = morse_normalize(f);
    Jet<C> f1 = phi1.apply(f);
    Jet<C> g1 = phi1.apply(g);
    {
        // g must be Morse too
        if (!Tr::is_zero(g.constant_term())) throw NotMorse("diagonalize_pair: g(0) != 0");
        for (int i = 0; i < n; ++i)
            if (!Tr::is_zero(g.derivative(i).constant_term()))
                throw NotMorse("diagonalize_pair: dg(0) != 0");
        if (!inverse(quadratic_part(g))) throw NotMorse("diagonalize_pair: g not Morse");
    }
    Matrix<C> Q = quadratic_part(g1);
    auto roots = field_roots(char_poly(Q));
    for (auto& rm : roots) {
        if (rm.multiplicity > 1) {
            Matrix<C> shifted = Q;
            for (int i = 0; i < n; ++i) shifted(i, i) -= rm.value;
            int geo = n - rank(shifted);
            if (geo < rm.multiplicity)
                throw NotDiagonalizable("pencil has a block of size >= 2: the pair "
                                        "cannot be simultaneously diagonalized");
            throw NotGeneric("repeated pencil eigenvalue " + Tr::str(rm.value),
                             Tr::str(rm.value));
        }
    }
    std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
        return scalar_traits<C>::lex_less(a.value, b.value);
    });
    Matrix<C> P(n, n);
    std::vector<C> lambda;
    for (int k = 0; k < n; ++k) {
        Matrix<C> shifted = Q;
        for (int i = 0; i < n; ++i) shifted(i, i) -= roots[(size_t)k].value;
        auto kb = kernel_basis(shifted);
        if (kb.size() != 1) throw Error("diagonalize_pair: eigenvector extraction failed");
        auto v = kb[0];
        C s = Tr::zero();
        for (auto& x : v) s += x * x;
        if (Tr::is_zero(s)) throw Error("diagonalize_pair: isotropic eigenvector");
        auto r = Tr::sqrt(s);
        if (!r)
            throw FieldError("diagonalize_pair: eigenvector normalization needs sqrt(" +
                             Tr::str(s) + "); use float mode");
        C rinv = r->inverse();
        for (int i = 0; i < n; ++i) P(i, k) = v[(size_t)i] * rinv;
        lambda.push_back(roots[(size_t)k].value);
    }
    DiffeoJet<C> lin = DiffeoJet<C>::from_linear(P, f.order());
    DiagonalizedPair<C> out;
    out.phi = phi1.then_after(lin);
    out.lambda = std::move(lambda);
    out.f = lin.apply(f1);
    out.g = lin.apply(g1);
    // postcondition: quadratic parts exactly (sum x^2, sum lambda x^2)
    if (!(out.f == sum_of_squares_jet<C>(n, f.order())))
        throw Error("diagonalize_pair: f normalization check failed");
    Matrix<C> qg = quadratic_part(out.g);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            C want = (i == j) ? out.lambda[(size_t)i] : Tr::zero();
            if (!Tr::is_zero(qg(i, j) - want))
                throw Error("diagonalize_pair: g quadratic part check failed");
        }
    return out;
}

// Build the separable pair f = sum u_j(l_j(x)), g = sum v_j(l_j(x)) whose
// tangency curves are the given lines (l = dual coordinates of directions).
template <class C>
std::pair<Jet<C>, Jet<C>> separable_realize(const Matrix<C>& directions,
                                            const std::vector<Jet<C>>& u,
                                            const std::vector<Jet<C>>& v) {
    using Tr = scalar_traits<C>;
    int n = directions.rows();
    if ((int)u.size() != n || (int)v.size() != n)
        throw InputError("separable_realize: need one (u, v) pair per direction");
    auto dinv = inverse(directions);
    if (!dinv) throw InputError("separable_realize: dependent directions");
    int K = u[0].order();
    for (auto* arr : {&u, &v})
        for (auto& s : *arr) {
            if (s.nvars() != 1) throw InputError("separable_realize: u, v must be 1-variable");
            if (s.valuation() != 2) throw NotMorse("separable_realize: u_j, v_j must be Morse");
        }
    Jet<C> f = Jet<C>::zero(n, K), g = Jet<C>::zero(n, K);
    for (int j = 0; j < n; ++j) {
        Jet<C> lj(n, K);
        for (int i = 0; i < n; ++i) lj.add_term(Monomial::var(i, n), (*dinv)(j, i));
        std::vector<Jet<C>> sub{lj};
        f += u[(size_t)j].compose(sub);
        g += v[(size_t)j].compose(sub);
    }
    (void)Tr::zero();
    return {f, g};
}

} // namespace germ
