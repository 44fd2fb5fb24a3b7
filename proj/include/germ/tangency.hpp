#pragma once

#include <map>
#include <vector>

#include "germ/diffeo.hpp"
#include "germ/normal_forms.hpp"
#include "germ/series.hpp"

namespace germ {

// Finite presentation of an ideal by jet generators, with per-degree linear
// solvers (built lazily) for graded membership questions.
template <class C>
struct IdealPresentation {
    int nvars = 0;
    int order = 0;
    std::vector<Jet<C>> gens;
    std::vector<std::pair<int, int>> pair_index; // (i, j) when gens are the h_ij, i < j

    const Jet<C>& gen(int i, int j) const {
        for (size_t k = 0; k < pair_index.size(); ++k)
            if (pair_index[k] == std::make_pair(i, j)) return gens[k];
        throw InputError("ideal: no generator with that pair index");
    }
};

// Tangency generators h_ij = d_i f d_j g - d_j f d_i g (i < j), truncated to
// one derivative below the input order.
template <class C>
IdealPresentation<C> tangency_generators(const Jet<C>& f, const Jet<C>& g) {
    if (f.nvars() != g.nvars()) throw InputError("tangency: variable mismatch");
    int n = f.nvars();
    IdealPresentation<C> pres;
    pres.nvars = n;
    pres.order = std::min(f.order(), g.order()) - 1;
    std::vector<Jet<C>> df, dg;
    for (int i = 0; i < n; ++i) {
        df.push_back(f.derivative(i));
        dg.push_back(g.derivative(i));
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            pres.gens.push_back(df[(size_t)i] * dg[(size_t)j] - df[(size_t)j] * dg[(size_t)i]);
            pres.pair_index.emplace_back(i, j);
        }
    return pres;
}

// Tangency curve: a parametrized curve plus the axis it is tangent to and
// the scheme multiplicity of the tangency locus along it.
template <class C>
struct TangencyCurve {
    CurveJet<C> curve;
    int axis = 0;
    int multiplicity = 1;
};

namespace detail {

template <class C>
Jet<C> shift_down(const Jet<C>& j, int v) {
    Jet<C> r(1, j.order() - v);
    for (auto& [m, c] : j.terms()) {
        if (m[0] < v) throw Error("shift_down: valuation too small");
        if (m[0] - v <= r.order()) r.add_term(Monomial({m[0] - v}), c);
    }
    return r;
}

// Solve the (n-1)x(n-1) linear system J delta = r over the 1-variable jet
// ring; J must have unit diagonal dominance (diag entries are units).
template <class C>
std::vector<Jet<C>> jet_matrix_solve(std::vector<std::vector<Jet<C>>> J, std::vector<Jet<C>> r) {
    using Tr = scalar_traits<C>;
    int m = (int)r.size();
    for (int col = 0; col < m; ++col) {
        int piv = -1;
        for (int i = col; i < m; ++i)
            if (!Tr::is_zero(J[(size_t)i][(size_t)col].constant_term())) { piv = i; break; }
        if (piv < 0) throw Error("jet_matrix_solve: singular system");
        std::swap(J[(size_t)piv], J[(size_t)col]);
        std::swap(r[(size_t)piv], r[(size_t)col]);
        Jet<C> inv = J[(size_t)col][(size_t)col].inverse();
        for (int k = col; k < m; ++k) J[(size_t)col][(size_t)k] = J[(size_t)col][(size_t)k] * inv;
        r[(size_t)col] = r[(size_t)col] * inv;
        for (int i = 0; i < m; ++i) {
            if (i == col) continue;
            Jet<C> f = J[(size_t)i][(size_t)col];
            if (f.is_zero()) continue;
            for (int k = col; k < m; ++k)
                J[(size_t)i][(size_t)k] -= f * J[(size_t)col][(size_t)k];
            r[(size_t)i] -= f * r[(size_t)col];
        }
    }
    return r;
}

} // namespace detail

// Lift the tangency curve tangent to the given axis by Newton iteration on
// the n-1 equations {h_{i,axis}} seeded at the axis; remaining generators
// are verified on the result.  The pair must be diagonalized.
template <class C>
TangencyCurve<C> lift_tangency_curve(const IdealPresentation<C>& pres, int axis,
                                     const std::vector<C>& lambda) {
    using Tr = scalar_traits<C>;
    int n = pres.nvars;
    int Kh = pres.order; // generators exact through Kh; curve reliable to Kh-1
    int Kc = Kh;         // internal working order
    if (Kc < 3) throw InputError("lift_tangency_curve: order too small");

    std::vector<int> others;
    for (int i = 0; i < n; ++i)
        if (i != axis) others.push_back(i);
    int m = (int)others.size();

    // equations: generator containing (i, axis)
    std::vector<const Jet<C>*> eq;
    for (int i : others) {
        auto pr = i < axis ? std::make_pair(i, axis) : std::make_pair(axis, i);
        eq.push_back(&pres.gen(pr.first, pr.second));
    }

    auto curve_of = [&](const std::vector<Jet<C>>& alpha) {
        std::vector<Jet<C>> comps((size_t)n, Jet<C>::zero(1, Kc));
        comps[(size_t)axis] = var1<C>(Kc);
        Jet<C> t2 = var1<C>(Kc) * var1<C>(Kc);
        for (int k = 0; k < m; ++k)
            comps[(size_t)others[(size_t)k]] = t2 * alpha[(size_t)k];
        return comps;
    };

    std::vector<Jet<C>> alpha((size_t)m, Jet<C>::zero(1, Kc));
    for (int pass = 0; pass <= Kc + 1; ++pass) {
        auto comps = curve_of(alpha);
        std::vector<Jet<C>> res;
        bool done = true;
        int obstructed = -1;
        for (int k = 0; k < m; ++k) {
            Jet<C> r = eq[(size_t)k]->compose(comps);
            if (!r.is_zero()) done = false;
            if (r.valuation() < 3) obstructed = r.valuation();
            res.push_back(std::move(r));
        }
        if (obstructed >= 0)
            throw LiftFailure("tangency curve lift: residual below cubic order", obstructed);
        if (done) break;
        // Newton: J_{ki} = t^{-3} * t^2 * (d_i h_k) o C, residual scaled by t^{-3}
        std::vector<std::vector<Jet<C>>> J((size_t)m, std::vector<Jet<C>>((size_t)m, Jet<C>::zero(1, Kc)));
        for (int k = 0; k < m; ++k)
            for (int i = 0; i < m; ++i) {
                Jet<C> d = eq[(size_t)k]->derivative(others[(size_t)i]).compose(comps);
                J[(size_t)k][(size_t)i] = detail::shift_down(d, 1).truncated(Kc);
            }
        std::vector<Jet<C>> rhs;
        for (int k = 0; k < m; ++k) rhs.push_back(detail::shift_down(res[(size_t)k], 3).truncated(Kc));
        std::vector<Jet<C>> delta;
        try {
            delta = detail::jet_matrix_solve(J, rhs);
        } catch (const Error&) {
            throw LiftFailure("tangency curve lift: singular Newton system "
                              "(repeated eigenvalues?)", 3);
        }
        for (int k = 0; k < m; ++k)
            alpha[(size_t)k] = alpha[(size_t)k] - delta[(size_t)k].extended(Kc);
        (void)Tr::zero();
    }
    auto comps = curve_of(alpha);
    for (int k = 0; k < m; ++k) {
        Jet<C> r = eq[(size_t)k]->compose(comps);
        if (!r.is_zero())
            throw LiftFailure("tangency curve lift did not converge", r.valuation());
    }
    // verify the remaining generators vanish along the curve
    for (size_t gidx = 0; gidx < pres.gens.size(); ++gidx) {
        auto [i, j] = pres.pair_index[gidx];
        if (i == axis || j == axis) continue;
        Jet<C> r = pres.gens[gidx].compose(comps);
        if (!r.is_zero())
            throw LiftFailure("tangency locus has a component not tangent to the axes",
                              r.valuation());
    }
    (void)lambda;
    TangencyCurve<C> out;
    out.curve = CurveJet<C>(comps).truncated(Kh - 1);
    out.axis = axis;
    out.multiplicity = 1;
    return out;
}

// All n tangency curves of a diagonalized R-generic pair.
template <class C>
std::vector<TangencyCurve<C>> tangency_curves(const Jet<C>& f, const Jet<C>& g,
                                              const std::vector<C>& lambda) {
    auto pres = tangency_generators(f, g);
    std::vector<TangencyCurve<C>> out;
    for (int j = 0; j < f.nvars(); ++j)
        out.push_back(lift_tangency_curve(pres, j, lambda));
    return out;
}

// Straightening: phi preserving f = sum x_i^2 exactly with the tangency
// curves of (f o phi, g o phi) equal to the coordinate axes.  Axes are
// processed last to first; each step fixes the others pointwise.
template <class C>
DiffeoJet<C> straighten(const Jet<C>& f, const Jet<C>& g, const std::vector<C>& lambda) {
    using Tr = scalar_traits<C>;
    int n = f.nvars();
    int K = f.order();
    int Kw = K + 3; // internal head-room: curve lifting costs accuracy
    Jet<C> F = f.extended(Kw), G = g.extended(Kw);
    if (!(F == sum_of_squares_jet<C>(n, Kw).truncated(Kw)))
        throw InputError("straighten: f must be exactly sum x_i^2");
    DiffeoJet<C> total = DiffeoJet<C>::identity(n, Kw);
    for (int axis = n - 1; axis >= 0; --axis) {
        auto pres = tangency_generators(F, G);
        auto tc = lift_tangency_curve(pres, axis, lambda);
        int Kc = tc.curve.order();
        // alpha_i(t) with x_i = t^2 alpha_i along the curve
        std::vector<Jet<C>> alpha((size_t)n, Jet<C>::zero(1, Kc));
        bool already = true;
        for (int i = 0; i < n; ++i) {
            if (i == axis) continue;
            alpha[(size_t)i] = detail::shift_down(tc.curve.component(i), 2).truncated(Kc);
            if (!alpha[(size_t)i].is_zero()) already = false;
        }
        if (already) continue;
        // phi(x) = (x_i - x_axis^2 alpha_i(x_axis), (1+u) x_axis)
        // with 2u + u^2 = 2 sum x_i alpha_i(x_axis) - x_axis^2 sum alpha_i^2.
        Jet<C> xa = Jet<C>::variable(axis, n, Kw);
        std::vector<Jet<C>> axis_sub{xa};
        Jet<C> rhs = Jet<C>::zero(n, Kw);
        Jet<C> sq = Jet<C>::zero(n, Kw);
        for (int i = 0; i < n; ++i) {
            if (i == axis) continue;
            Jet<C> ai = alpha[(size_t)i].extended(Kw).compose(axis_sub);
            rhs += Jet<C>::variable(i, n, Kw) * ai;
            sq += ai * ai;
        }
        rhs = rhs.scaled(Tr::from_int(2)) - xa * xa * sq;
        // F_eq(x, u) = 2u + u^2 - rhs(x)
        Jet<C> ueq(n + 1, Kw);
        {
            Jet<C> u = Jet<C>::variable(n, n + 1, Kw);
            ueq = u.scaled(Tr::from_int(2)) + u * u;
            for (auto& [mo, c] : rhs.terms()) {
                std::vector<int> e = mo.e;
                e.push_back(0);
                ueq.add_term(Monomial(e), -c);
            }
        }
        Jet<C> u = solve_implicit(ueq);
        std::vector<Jet<C>> comps;
        for (int i = 0; i < n; ++i) {
            if (i == axis) {
                comps.push_back(xa + xa * u);
            } else {
                Jet<C> ai = alpha[(size_t)i].extended(Kw).compose(axis_sub);
                comps.push_back(Jet<C>::variable(i, n, Kw) - xa * xa * ai);
            }
        }
        DiffeoJet<C> step(std::move(comps));
        if (!(step.apply(F) == F)) throw Error("straighten: step does not preserve f");
        DiffeoJet<C> stepinv = step.inverse_diffeo();
        F = stepinv.apply(F);
        G = stepinv.apply(G);
        total = total.then_after(stepinv);
    }
    total = total.truncated(K);
    // postconditions at the caller's order
    DiffeoJet<C> check = total;
    if (!(check.apply(f) == f)) throw Error("straighten: f not preserved");
    return total;
}

// Radicality certificate: h_ij = sum A[(ij)][(kl)] x_k x_l with A = Lambda + B,
// Lambda = diag(4 (lambda_j - lambda_i)) invertible and B in the maximal ideal.
template <class C>
struct RadicalCertificate {
    std::vector<std::pair<int, int>> pairs;
    std::vector<C> lambda_diag;                  // 4 (lambda_j - lambda_i)
    std::vector<std::vector<Jet<C>>> a_matrix;   // full A as jets
};

template <class C>
RadicalCertificate<C> radical_certificate(const Jet<C>& f, const Jet<C>& g,
                                          const std::vector<C>& lambda) {
    using Tr = scalar_traits<C>;
    int n = f.nvars();
    auto pres = tangency_generators(f, g);
    int N = (int)pres.gens.size();
    RadicalCertificate<C> cert;
    cert.pairs = pres.pair_index;
    cert.a_matrix.assign((size_t)N, std::vector<Jet<C>>((size_t)N, Jet<C>::zero(n, pres.order)));
    for (int a = 0; a < N; ++a) {
        for (auto& [m, c] : pres.gens[(size_t)a].terms()) {
            int k = -1, l = -1;
            for (int v = 0; v < n && l < 0; ++v) {
                if (m[v] == 0) continue;
                if (k < 0) k = v;
                else l = v;
            }
            if (l < 0)
                throw NotGeneric("radical certificate: generator has a pure-power term " +
                                 m.str() + " (tangency curves not the axes?)");
            int col = -1;
            for (int b = 0; b < N; ++b)
                if (cert.pairs[(size_t)b] == std::make_pair(k, l)) col = b;
            Monomial q = m;
            q.e[(size_t)k] -= 1;
            q.e[(size_t)l] -= 1;
            cert.a_matrix[(size_t)a][(size_t)col].add_term(q, c);
        }
    }
    for (int a = 0; a < N; ++a) {
        auto [i, j] = cert.pairs[(size_t)a];
        C want = (lambda[(size_t)j] - lambda[(size_t)i]) * Tr::from_int(4);
        if (Tr::is_zero(want))
            throw NotGeneric("radical certificate: Lambda singular",
                             "lambda_" + std::to_string(i + 1) + " = lambda_" + std::to_string(j + 1));
        C got = cert.a_matrix[(size_t)a][(size_t)a].constant_term();
        if (!Tr::is_zero(got - want))
            throw Error("radical certificate: unexpected leading coefficient");
        for (int b = 0; b < N; ++b) {
            if (b == a) continue;
            if (!Tr::is_zero(cert.a_matrix[(size_t)a][(size_t)b].constant_term()))
                throw Error("radical certificate: off-diagonal constant term");
        }
        cert.lambda_diag.push_back(want);
    }
    return cert;
}

} // namespace germ
