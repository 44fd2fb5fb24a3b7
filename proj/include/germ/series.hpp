#pragma once

#include <optional>
#include <vector>

#include "germ/jet.hpp"
#include "germ/linalg.hpp"

namespace germ {

// --- 1-variable helpers ----------------------------------------------------

template <class C>
C coeff1(const Jet<C>& j, int k) {
    return j.coeff(Monomial({k}));
}

template <class C>
Jet<C> var1(int order) { return Jet<C>::variable(0, 1, order); }

// Compositional inverse of v (v(0) = 0, v'(0) != 0): v o w = id through K.
template <class C>
Jet<C> invert_scalar_jet(const Jet<C>& v) {
    using Tr = scalar_traits<C>;
    if (v.nvars() != 1) throw InputError("invert_scalar_jet: expects one variable");
    if (!Tr::is_zero(v.constant_term())) throw InputError("invert_scalar_jet: v(0) != 0");
    C a = coeff1(v, 1);
    if (Tr::is_zero(a)) throw Error("invert_scalar_jet: zero linear coefficient");
    int K = v.order();
    Jet<C> t = var1<C>(K);
    C ainv = a.inverse();
    Jet<C> w = t.scaled(ainv);
    // Order-by-order correction: if v(w(t)) = t + e_m t^m + ..., subtract
    // e_m/a t^m from w; each pass fixes one more degree.
    for (int pass = 0; pass <= K; ++pass) {
        Jet<C> err = v.compose(std::vector<Jet<C>>{w}) - t;
        if (err.is_zero()) break;
        int m = err.valuation();
        if (m > K) break;
        Jet<C> corr(1, K);
        Jet<C> low = err.graded_part(m);
        for (auto& [mono, c] : low.terms()) corr.add_term(mono, -(c * ainv));
        w += corr;
    }
    return w;
}

// Valuation-v "principal part": writes u = c t^v (1 + w) and returns
// rho(t) = root0 * t * (1 + w)^{1/v} with rho^v = u, where root0^v = c.
// The principal branch picks root0 lexicographically positive.
template <class C>
std::optional<Jet<C>> principal_root(const Jet<C>& u, unsigned v) {
    using Tr = scalar_traits<C>;
    if (u.nvars() != 1) throw InputError("principal_root: expects one variable");
    if (u.valuation() != (int)v) return std::nullopt;
    int K = u.order();
    C c = coeff1(u, (int)v);
    auto root0 = field_kth_root(c, v);
    if (!root0) return std::nullopt;
    C r0 = *root0;
    if (!r0.lex_positive()) {
        // prefer the lex-positive representative when v is even; for odd v
        // the root is unique up to field roots of unity, keep as computed.
        if (v % 2 == 0) r0 = -r0;
    }
    // unit = u / (c t^v)
    Jet<C> unit(1, K - (int)v);
    for (auto& [m, cc] : u.terms()) {
        int e = m[0] - (int)v;
        if (e < 0) continue;
        if (e <= K - (int)v) unit.add_term(Monomial({e}), cc * c.inverse());
    }
    Jet<C> s = unit.kth_root_with(Tr::one(), v); // (1+w)^{1/v}
    Jet<C> t = var1<C>(K);
    Jet<C> lift(1, K);
    for (auto& [m, cc] : s.terms()) {
        if (m[0] + 1 > K) continue;
        lift.add_term(Monomial({m[0] + 1}), cc);
    }
    return lift.scaled(r0);
}

// --- implicit solving -------------------------------------------------------

// Solve F(x_1..x_m, u) = 0 for u(x) with u(0) = 0, where the last variable of
// F is u and dF/du is a unit at the origin.  Hensel iteration, one degree of
// accuracy per pass.
template <class C>
Jet<C> solve_implicit(const Jet<C>& f) {
    using Tr = scalar_traits<C>;
    int n = f.nvars();
    if (n < 1) throw InputError("solve_implicit: needs at least the unknown variable");
    int m = n - 1;
    int K = f.order();
    if (!Tr::is_zero(f.constant_term()))
        throw Error("solve_implicit: F(0) != 0");
    C c = f.derivative(n - 1).constant_term();
    if (Tr::is_zero(c)) throw Error("solve_implicit: dF/du degenerate at 0");
    C cinv = c.inverse();
    Jet<C> u = Jet<C>::zero(m, K);
    std::vector<Jet<C>> subst;
    for (int i = 0; i < m; ++i) subst.push_back(Jet<C>::variable(i, m, K));
    subst.push_back(u);
    for (int pass = 0; pass <= K + 1; ++pass) {
        subst[(size_t)m] = u;
        Jet<C> err = f.compose(subst);
        if (err.is_zero()) break;
        if (err.valuation() > K) break;
        u -= err.scaled(cinv);
    }
    subst[(size_t)m] = u;
    if (!f.compose(subst).is_zero())
        throw Error("solve_implicit: iteration failed to converge");
    return u;
}

// Vector version: solve F_i(x_1..x_p, u_1..u_q) = 0 (i = 1..q) for u(x) with
// u(0) = 0; the u's are the last q variables and d(F)/d(u)(0) is invertible.
template <class C>
std::vector<Jet<C>> solve_implicit_system(const std::vector<Jet<C>>& fs, int q) {
    using Tr = scalar_traits<C>;
    if ((int)fs.size() != q) throw InputError("solve_implicit_system: count mismatch");
    int n = fs[0].nvars();
    int p = n - q;
    int K = fs[0].order();
    Matrix<C> jac(q, q);
    for (int i = 0; i < q; ++i) {
        if (!Tr::is_zero(fs[(size_t)i].constant_term()))
            throw Error("solve_implicit_system: F(0) != 0");
        for (int j = 0; j < q; ++j)
            jac(i, j) = fs[(size_t)i].derivative(p + j).constant_term();
    }
    auto jinv = inverse(jac);
    if (!jinv) throw Error("solve_implicit_system: Jacobian degenerate at 0");
    std::vector<Jet<C>> u((size_t)q, Jet<C>::zero(p, K));
    std::vector<Jet<C>> subst;
    for (int i = 0; i < p; ++i) subst.push_back(Jet<C>::variable(i, p, K));
    for (int j = 0; j < q; ++j) subst.push_back(u[(size_t)j]);
    for (int pass = 0; pass <= K + 1; ++pass) {
        for (int j = 0; j < q; ++j) subst[(size_t)(p + j)] = u[(size_t)j];
        std::vector<Jet<C>> err;
        bool all_zero = true;
        for (int i = 0; i < q; ++i) {
            err.push_back(fs[(size_t)i].compose(subst));
            if (!err.back().is_zero()) all_zero = false;
        }
        if (all_zero) break;
        for (int j = 0; j < q; ++j) {
            Jet<C> corr = Jet<C>::zero(p, K);
            for (int i = 0; i < q; ++i)
                if (!Tr::is_zero((*jinv)(j, i))) corr += err[(size_t)i].scaled((*jinv)(j, i));
            u[(size_t)j] -= corr;
        }
    }
    for (int j = 0; j < q; ++j) subst[(size_t)(p + j)] = u[(size_t)j];
    for (int i = 0; i < q; ++i)
        if (!fs[(size_t)i].compose(subst).is_zero())
            throw Error("solve_implicit_system: iteration failed to converge");
    return u;
}

} // namespace germ
