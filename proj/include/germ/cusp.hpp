#pragma once

#include <optional>
#include <string>
#include <vector>

#include "germ/invariants.hpp"
#include "germ/moser.hpp"

namespace germ {

// The cusp model: f = x^3 + y^2 + z^2 through the order.
template <class C>
Jet<C> cusp_model_f(int order) {
    using Tr = scalar_traits<C>;
    Jet<C> f(3, order);
    f.add_term(Monomial({3, 0, 0}), Tr::one());
    f.add_term(Monomial({0, 2, 0}), Tr::one());
    f.add_term(Monomial({0, 0, 2}), Tr::one());
    return f;
}

// A pair (x^3+y^2+z^2, lambda x^3 + mu y^2 + nu z^2 + eps) with eps in m^3
// carrying no x^3 term and lambda, mu, nu pairwise distinct and nonzero.
template <class C>
struct CuspPair {
    Jet<C> f, g;
    C lambda, mu, nu;
    Jet<C> eps;

    CuspPair(Jet<C> f_, Jet<C> g_) : f(std::move(f_)), g(std::move(g_)) {
        using Tr = scalar_traits<C>;
        if (f.nvars() != 3 || g.nvars() != 3)
            throw InputError("cusp pair: three variables required");
        if (!(f == cusp_model_f<C>(f.order())))
            throw InputError("cusp pair: f must be exactly x^3 + y^2 + z^2 "
                             "(apply the Milnor-2 normalization first)");
        lambda = g.coeff(Monomial({3, 0, 0}));
        mu = g.coeff(Monomial({0, 2, 0}));
        nu = g.coeff(Monomial({0, 0, 2}));
        Jet<C> quad = g.graded_part(2);
        Jet<C> expect(3, g.order());
        expect.add_term(Monomial({0, 2, 0}), mu);
        expect.add_term(Monomial({0, 0, 2}), nu);
        if (!(quad == expect))
            throw InputError("cusp pair: quadratic part of g must be mu y^2 + nu z^2");
        eps = g;
        eps.set_term(Monomial({3, 0, 0}), Tr::zero());
        eps.set_term(Monomial({0, 2, 0}), Tr::zero());
        eps.set_term(Monomial({0, 0, 2}), Tr::zero());
        if (!eps.is_zero() && eps.valuation() < 3)
            throw InputError("cusp pair: eps must lie in m^3");
        auto distinct = [&](const C& a, const C& b) { return !Tr::is_zero(a - b); };
        if (Tr::is_zero(lambda) || Tr::is_zero(mu) || Tr::is_zero(nu) ||
            !distinct(lambda, mu) || !distinct(mu, nu) || !distinct(lambda, nu))
            throw NotGeneric("cusp pair: lambda, mu, nu must be pairwise distinct and nonzero");
    }
};

// Milnor-number-2 normalization in three variables: a chart with
// f o chart = x^3 + y^2 + z^2 through the order.
template <class C>
DiffeoJet<C> milnor2_normalize(const Jet<C>& f) {
    using Tr = scalar_traits<C>;
    if (f.nvars() != 3) throw InputError("milnor2: three variables required");
    int K = f.order();
    if (!Tr::is_zero(f.constant_term())) throw Error("milnor2: f(0) != 0");
    for (int i = 0; i < 3; ++i)
        if (!Tr::is_zero(f.derivative(i).constant_term()))
            throw Error("milnor2: df(0) != 0");
    Matrix<C> Q = quadratic_part(f);
    if (rank(Q) != 2)
        throw Error("milnor2: Hessian rank is " + std::to_string(rank(Q)) +
                    ", expected exactly 2");
    auto ker = kernel_basis(Q);
    // basis: kernel direction first, then two coordinates with an invertible block
    Matrix<C> L(3, 3);
    bool built = false;
    for (int a = 0; a < 3 && !built; ++a)
        for (int b = a + 1; b < 3 && !built; ++b) {
            Matrix<C> cand(3, 3);
            for (int i = 0; i < 3; ++i) {
                cand(i, 0) = ker[0][(size_t)i];
                cand(i, 1) = (i == a) ? Tr::one() : Tr::zero();
                cand(i, 2) = (i == b) ? Tr::one() : Tr::zero();
            }
            Matrix<C> B(2, 2);
            B(0, 0) = Q(a, a); B(0, 1) = Q(a, b);
            B(1, 0) = Q(b, a); B(1, 1) = Q(b, b);
            if (inverse(cand) && inverse(B)) {
                L = cand;
                built = true;
            }
        }
    if (!built) throw Error("milnor2: no nondegenerate transverse block");
    DiffeoJet<C> lin = DiffeoJet<C>::from_linear(L, K);
    Jet<C> F = lin.apply(f);
    DiffeoJet<C> chart = lin;

    // critical-point shift in (y, z) with x as the parameter
    std::vector<Jet<C>> eqs{F.derivative(1).extended(K), F.derivative(2).extended(K)};
    auto gamma = solve_implicit_system(eqs, 2);
    {
        std::vector<Jet<C>> comps;
        comps.push_back(Jet<C>::variable(0, 3, K));
        for (int i = 1; i <= 2; ++i) {
            Jet<C> gi(3, K);
            for (auto& [mo, c] : gamma[(size_t)(i - 1)].terms())
                gi.add_term(Monomial::var(0, 3, mo[0]), c);
            comps.push_back(Jet<C>::variable(i, 3, K) + gi);
        }
        DiffeoJet<C> shift(std::move(comps));
        F = shift.apply(F);
        chart = chart.then_after(shift);
    }
    // residual along the x-axis must be an honest cusp: valuation exactly 3
    auto axis = CurveJet<C>::axis(0, 3, K);
    Jet<C> phi1 = restrict_to_curve(F, axis);
    if (phi1.valuation() != 3)
        throw Error("milnor2: residual valuation " + std::to_string(phi1.valuation()) +
                    " along the kernel direction; Milnor number is not 2");
    // transverse completion of squares
    Jet<C> head(3, K);
    for (auto& [mo, c] : phi1.terms()) head.add_term(Monomial::var(0, 3, mo[0]), c);
    DiffeoJet<C> comp = complete_squares_from(F, 1, head);
    F = comp.apply(F);
    chart = chart.then_after(comp);
    // cube normalization of the x-part
    {
        C a3 = phi1.coeff(Monomial({3}));
        auto c = field_kth_root(a3, 3);
        if (!c)
            throw FieldError("milnor2: cube root of " + Tr::str(a3) +
                             " not in the field; use float mode");
        Jet<C> unit(1, K - 3);
        for (auto& [mo, cc] : phi1.terms()) {
            int e = mo[0] - 3;
            if (e >= 0 && e <= K - 3) unit.add_term(Monomial({e}), cc * a3.inverse());
        }
        Jet<C> root = unit.kth_root_with(Tr::one(), 3); // (1 + w)^{1/3}
        Jet<C> s(3, K);
        for (auto& [mo, cc] : root.terms())
            if (mo[0] + 1 <= K) s.add_term(Monomial::var(0, 3, mo[0] + 1), cc * *c);
        std::vector<Jet<C>> comps{s, Jet<C>::variable(1, 3, K), Jet<C>::variable(2, 3, K)};
        DiffeoJet<C> cube(std::move(comps));
        DiffeoJet<C> cubeinv = cube.inverse_diffeo();
        F = cubeinv.apply(F);
        chart = chart.then_after(cubeinv);
    }
    if (!(F == cusp_model_f<C>(K))) throw Error("milnor2: normal form check failed");
    if (!(chart.apply(f) == F)) throw Error("milnor2: composition check failed");
    return chart;
}

namespace detail {

// Newton lift of a curve tangent to `axis` with the moving coordinates
// written x_i = t^weight alpha_i(t); `eqs[k]` is the equation paired with
// unknown `vars[k]`, and residuals start at t^res_shift.
template <class C>
std::vector<Jet<C>> weighted_curve_lift(const std::vector<Jet<C>>& eqs,
                                        const std::vector<int>& vars, int axis,
                                        int weight, int res_shift, int n, int Kc) {
    using Tr = scalar_traits<C>;
    int m = (int)vars.size();
    auto curve_of = [&](const std::vector<Jet<C>>& alpha) {
        std::vector<Jet<C>> comps((size_t)n, Jet<C>::zero(1, Kc));
        comps[(size_t)axis] = var1<C>(Kc);
        Jet<C> tw = var1<C>(Kc);
        for (int e = 1; e < weight; ++e) tw = tw * var1<C>(Kc);
        for (int k = 0; k < m; ++k) comps[(size_t)vars[(size_t)k]] = tw * alpha[(size_t)k];
        return comps;
    };
    std::vector<Jet<C>> alpha((size_t)m, Jet<C>::zero(1, Kc));
    for (int pass = 0; pass <= Kc + 1; ++pass) {
        auto comps = curve_of(alpha);
        std::vector<Jet<C>> res;
        bool done = true;
        for (int k = 0; k < m; ++k) {
            Jet<C> r = eqs[(size_t)k].compose(comps);
            if (!r.is_zero()) done = false;
            if (r.valuation() < res_shift)
                throw LiftFailure("curve lift: residual below expected order",
                                  r.valuation());
            res.push_back(std::move(r));
        }
        if (done) break;
        std::vector<std::vector<Jet<C>>> J((size_t)m,
                                           std::vector<Jet<C>>((size_t)m, Jet<C>::zero(1, Kc)));
        for (int k = 0; k < m; ++k)
            for (int i = 0; i < m; ++i) {
                Jet<C> d = eqs[(size_t)k].derivative(vars[(size_t)i]).compose(comps);
                J[(size_t)k][(size_t)i] = shift_down(d, res_shift - weight).truncated(Kc);
            }
        std::vector<Jet<C>> rhs;
        for (int k = 0; k < m; ++k)
            rhs.push_back(shift_down(res[(size_t)k], res_shift).truncated(Kc));
        std::vector<Jet<C>> delta;
        try {
            delta = jet_matrix_solve(J, rhs);
        } catch (const Error&) {
            throw LiftFailure("curve lift: singular Newton system", res_shift);
        }
        for (int k = 0; k < m; ++k)
            alpha[(size_t)k] = alpha[(size_t)k] - delta[(size_t)k].extended(Kc);
    }
    auto comps = curve_of(alpha);
    for (int k = 0; k < m; ++k)
        if (!eqs[(size_t)k].compose(comps).is_zero())
            throw LiftFailure("curve lift did not converge",
                              eqs[(size_t)k].compose(comps).valuation());
    return alpha;
}

// Roots of a quadratic a x^2 + b x + c over the field, when representable.
template <class C>
std::vector<C> quadratic_roots(const C& a, const C& b, const C& c) {
    using Tr = scalar_traits<C>;
    std::vector<C> out;
    if (Tr::is_zero(a)) {
        if (!Tr::is_zero(b)) out.push_back(-(c / b));
        return out;
    }
    C disc = b * b - a * c * Tr::from_int(4);
    auto r = Tr::sqrt(disc);
    if (!r) return out;
    C two_a = (a * Tr::from_int(2)).inverse();
    out.push_back((-b + *r) * two_a);
    if (!Tr::is_zero(*r)) out.push_back((-b - *r) * two_a);
    return out;
}

} // namespace detail

// Result of the exceptionality test: the degree-3 obstruction, the split
// diagnostics, and (when exceptional) the three lifted tangency curves.
template <class C>
struct ExceptionalReport {
    bool exceptional = false;
    std::string detail;
    std::vector<TangencyCurve<C>> curves; // x (simple), y, z (double)
};

template <class C>
ExceptionalReport<C> exceptional_check(const CuspPair<C>& p) {
    using Tr = scalar_traits<C>;
    ExceptionalReport<C> rep;
    Jet<C> eps3 = p.eps.graded_part(3);
    // monomials containing x in the 3-jet of eps split the double curves
    Jet<C> bad(3, p.eps.order());
    for (auto& [m, c] : eps3.terms())
        if (m[0] > 0) bad.add_term(m, c);
    if (!bad.is_zero()) {
        rep.exceptional = false;
        rep.detail = "d_x eps_3 != 0 (offending terms: " + bad.str() + ")";
        // split directions from the projectivized tangency cone, per axis
        for (int ax = 1; ax <= 2; ++ax) {
            const char* name = ax == 1 ? "y" : "z";
            C other = ax == 1 ? p.mu : p.nu;
            // the slope s of a cone direction x = s t along the axis solves
            // (3 (mu_ax - lambda)) s^2 - B s - A = 0 with A, B read off d_x eps_3
            Jet<C> dx = eps3.derivative(0).extended(p.eps.order());
            auto axis = CurveJet<C>::axis(ax, 3, p.eps.order());
            C c2 = Tr::from_int(3) * (other - p.lambda);
            C c0 = restrict_to_curve(dx, axis).coeff(Monomial({2}));
            Jet<C> d2 = eps3.derivative(0).derivative(0).extended(p.eps.order());
            C c1 = restrict_to_curve(d2, axis).coeff(Monomial({1}));
            if (Tr::is_zero(c0) && Tr::is_zero(c1)) continue; // this axis holds
            auto roots = detail::quadratic_roots(c2, -c1, -c0);
            rep.detail += std::string("; the ") + name + "-axis splits into two curves";
            if (!roots.empty()) {
                rep.detail += " with directions x/" + std::string(name) + " in {";
                bool first = true;
                for (auto& r : roots) {
                    if (!first) rep.detail += ", ";
                    rep.detail += Tr::str(r);
                    first = false;
                }
                rep.detail += "}";
            }
        }
        return rep;
    }
    // lift the three tangency curves; the double ones must not split
    auto pres = tangency_generators(p.f, p.g);
    int Kc = pres.order;
    try {
        // simple curve tangent to the x-axis at order 2: y = x^3 a2, z = x^3 a3
        auto ax = detail::weighted_curve_lift<C>(
            std::vector<Jet<C>>{pres.gen(0, 1), pres.gen(0, 2)}, {1, 2}, 0, 3, 5, 3, Kc);
        std::vector<Jet<C>> comps(3, Jet<C>::zero(1, Kc));
        comps[0] = var1<C>(Kc);
        Jet<C> t3 = var1<C>(Kc) * var1<C>(Kc) * var1<C>(Kc);
        comps[1] = t3 * ax[0];
        comps[2] = t3 * ax[1];
        Jet<C> check = pres.gen(1, 2).compose(comps);
        if (!check.is_zero())
            throw LiftFailure("x-curve does not satisfy the remaining generator",
                              check.valuation());
        TangencyCurve<C> tx;
        tx.curve = CurveJet<C>(comps).truncated(Kc - 1);
        tx.axis = 0;
        tx.multiplicity = 1;
        rep.curves.push_back(tx);
    } catch (const LiftFailure& e) {
        rep.detail = std::string("x-curve lift failed: ") + e.what();
        return rep;
    }
    for (int axn = 1; axn <= 2; ++axn) {
        const char* name = axn == 1 ? "y" : "z";
        int ov = axn == 1 ? 2 : 1; // the other transverse variable
        // double curve: equations {d_x h_{x,ax} = 0, h_{y,z} = 0} define it,
        // and the defining generator h_{x,ax} must then vanish identically
        Jet<C> e1 = pres.gen(0, axn).derivative(0).extended(Kc);
        Jet<C> e2 = pres.gen(1, 2);
        std::vector<Jet<C>> alpha;
        try {
            alpha = detail::weighted_curve_lift<C>(std::vector<Jet<C>>{e1, e2}, {0, ov},
                                                   axn, 2, 3, 3, Kc);
        } catch (const LiftFailure& e) {
            rep.detail = std::string(name) + "-curve lift failed: " + e.what();
            return rep;
        }
        std::vector<Jet<C>> comps(3, Jet<C>::zero(1, Kc));
        comps[(size_t)axn] = var1<C>(Kc);
        Jet<C> t2 = var1<C>(Kc) * var1<C>(Kc);
        comps[0] = t2 * alpha[0];
        comps[(size_t)ov] = t2 * alpha[1];
        // no-split certificate: the full generators vanish along the curve
        Jet<C> r1 = pres.gen(0, axn).compose(comps);
        Jet<C> r2 = pres.gen(0, ov).compose(comps);
        if (!r1.is_zero() || !r2.is_zero()) {
            int d = std::min(r1.is_zero() ? Kc + 1 : r1.valuation(),
                             r2.is_zero() ? Kc + 1 : r2.valuation());
            rep.detail = std::string("the ") + name +
                         "-axis double curve splits into two jet branches "
                         "(obstruction at degree " + std::to_string(d) + ")";
            return rep;
        }
        TangencyCurve<C> tc;
        tc.curve = CurveJet<C>(comps).truncated(Kc - 1);
        tc.axis = axn;
        tc.multiplicity = 2;
        rep.curves.push_back(tc);
    }
    rep.exceptional = true;
    rep.detail = "eps_3 in <y^3, y^2 z, y z^2, z^3>; double curves do not split";
    return rep;
}

// Two-way membership certificate between the computed tangency generators
// and the model ideal <x^2 y, x^2 z, y z>.
template <class C>
struct CuspIdealCertificate {
    std::vector<DecompositionWitness<C>> model_in_computed; // x^2y, x^2z, yz over h
    std::vector<DecompositionWitness<C>> computed_in_model; // h over the monomials
};

template <class C>
CuspIdealCertificate<C> cusp_ideal_check(const CuspPair<C>& p) {
    auto pres = tangency_generators(p.f, p.g);
    IdealPresentation<C> model;
    model.nvars = 3;
    model.order = pres.order;
    for (auto mono : {Monomial({2, 1, 0}), Monomial({2, 0, 1}), Monomial({0, 1, 1})}) {
        Jet<C> m(3, pres.order);
        m.add_term(mono, scalar_traits<C>::one());
        model.gens.push_back(m);
    }
    IdealMembership<C> in_h(pres), in_model(model);
    CuspIdealCertificate<C> cert;
    for (auto& m : model.gens) cert.model_in_computed.push_back(in_h.decompose(m));
    for (auto& h : pres.gens) cert.computed_in_model.push_back(in_model.decompose(h));
    return cert;
}

// Straightening of an exceptional pair: phi preserving f with the tangency
// locus of (f o phi, g o phi) equal to the union of the axes.
template <class C>
DiffeoJet<C> cusp_straighten(const CuspPair<C>& p) {
    using Tr = scalar_traits<C>;
    int K = p.f.order();
    int Kw = K + 4;
    Jet<C> F = p.f.extended(Kw);
    Jet<C> G = p.g.extended(Kw);
    DiffeoJet<C> total = DiffeoJet<C>::identity(3, Kw);
    // transverse double curves first (each step fixes the other axes), the
    // cubic x-step last
    for (int axn : {1, 2}) {
        CuspPair<C> cur(F, G);
        auto rep = exceptional_check(cur);
        if (!rep.exceptional)
            throw LiftFailure("cusp straighten: " + rep.detail, 3);
        const TangencyCurve<C>& tc = rep.curves[(size_t)axn];
        int ov = axn == 1 ? 2 : 1;
        int Kc = tc.curve.order();
        Jet<C> au = detail::shift_down(tc.curve.component(0), 2).truncated(Kc);
        Jet<C> av = detail::shift_down(tc.curve.component(ov), 2).truncated(Kc);
        if (au.is_zero() && av.is_zero()) continue;
        Jet<C> ta = Jet<C>::variable(axn, 3, Kw);
        std::vector<Jet<C>> sub{ta};
        Jet<C> u = (ta * ta) * au.extended(Kw).compose(sub); // x-displacement
        Jet<C> v = (ta * ta) * av.extended(Kw).compose(sub); // other displacement
        // f o phi = f with phi = (x - u, (1+w) t_ax, z - v) requires
        // (2w + w^2) t_ax^2 = 3 x^2 u - 3 x u^2 + u^3 + 2 z v - v^2.
        Jet<C> x = Jet<C>::variable(0, 3, Kw), z = Jet<C>::variable(ov, 3, Kw);
        Jet<C> rhs = x * x * u.scaled(Tr::from_int(3)) - x * u * u.scaled(Tr::from_int(3)) +
                     u * u * u + z * v.scaled(Tr::from_int(2)) - v * v;
        Jet<C> rhs_div(3, Kw);
        for (auto& [mo, c] : rhs.terms()) {
            if (mo[(size_t)axn] < 2)
                throw Error("cusp straighten: right-hand side not divisible");
            Monomial q = mo;
            q.e[(size_t)axn] -= 2;
            rhs_div.add_term(q, c);
        }
        Jet<C> weq(4, Kw);
        {
            Jet<C> w = Jet<C>::variable(3, 4, Kw);
            weq = w.scaled(Tr::from_int(2)) + w * w;
            for (auto& [mo, c] : rhs_div.terms()) {
                std::vector<int> e = mo.e;
                e.push_back(0);
                weq.add_term(Monomial(e), -c);
            }
        }
        Jet<C> w = solve_implicit(weq);
        std::vector<Jet<C>> comps(3, Jet<C>());
        comps[0] = x - u;
        comps[(size_t)axn] = ta + ta * w;
        comps[(size_t)ov] = z - v;
        DiffeoJet<C> step(std::move(comps));
        if (!(step.apply(F) == F)) throw Error("cusp straighten: step broke f");
        DiffeoJet<C> stepinv = step.inverse_diffeo();
        F = stepinv.apply(F);
        G = stepinv.apply(G);
        total = total.then_after(stepinv);
    }
    // the x-axis step via the cubic equation
    {
        CuspPair<C> cur(F, G);
        auto rep = exceptional_check(cur);
        if (!rep.exceptional)
            throw LiftFailure("cusp straighten: " + rep.detail, 3);
        const TangencyCurve<C>& tc = rep.curves[0];
        int Kc = tc.curve.order();
        Jet<C> a2 = detail::shift_down(tc.curve.component(1), 3).truncated(Kc);
        Jet<C> a3 = detail::shift_down(tc.curve.component(2), 3).truncated(Kc);
        if (!(a2.is_zero() && a3.is_zero())) {
            Jet<C> x = Jet<C>::variable(0, 3, Kw);
            std::vector<Jet<C>> sub{x};
            Jet<C> A2 = a2.extended(Kw).compose(sub), A3 = a3.extended(Kw).compose(sub);
            Jet<C> y = Jet<C>::variable(1, 3, Kw), z = Jet<C>::variable(2, 3, Kw);
            // 3u + 3u^2 + u^3 = 2 (y alpha2 + z alpha3) - x^3 (alpha2^2 + alpha3^2)
            Jet<C> rhs = (y * A2 + z * A3).scaled(Tr::from_int(2)) -
                         x * x * x * (A2 * A2 + A3 * A3);
            Jet<C> ueq(4, Kw);
            Jet<C> uu = Jet<C>::variable(3, 4, Kw);
            ueq = uu.scaled(Tr::from_int(3)) + (uu * uu).scaled(Tr::from_int(3)) + uu * uu * uu;
            for (auto& [mo, c] : rhs.terms()) {
                std::vector<int> e = mo.e;
                e.push_back(0);
                ueq.add_term(Monomial(e), -c);
            }
            Jet<C> u = solve_implicit(ueq);
            std::vector<Jet<C>> comps{x + x * u, y - x * x * x * A2, z - x * x * x * A3};
            DiffeoJet<C> step(std::move(comps));
            if (!(step.apply(F) == F)) throw Error("cusp straighten: x-step broke f");
            DiffeoJet<C> stepinv = step.inverse_diffeo();
            F = stepinv.apply(F);
            G = stepinv.apply(G);
            total = total.then_after(stepinv);
        }
    }
    total = total.truncated(K);
    if (!(total.apply(p.f) == p.f)) throw Error("cusp straighten: f not preserved");
    return total;
}

// Equivalence of exceptional pairs: straighten both, compare the canonical
// restrictions on the three curves, then close the gap with the path engine.
template <class C>
Decision<DiffeoJet<C>> cusp_equivalent(const CuspPair<C>& p0, const CuspPair<C>& p1) {
    using Tr = scalar_traits<C>;
    int K = p0.f.order();
    auto rep0 = exceptional_check(p0);
    auto rep1 = exceptional_check(p1);
    if (!rep0.exceptional || !rep1.exceptional)
        throw NotGeneric("cusp_equivalent: input is not an exceptional pair: " +
                         (rep0.exceptional ? rep1.detail : rep0.detail));
    // invariant stage: (lambda, {mu, nu}) must match, allowing the y-z swap
    bool swap1 = false;
    if (!Tr::is_zero(p0.lambda - p1.lambda))
        return {std::nullopt, "lambda differs"};
    if (!Tr::is_zero(p0.mu - p1.mu) || !Tr::is_zero(p0.nu - p1.nu)) {
        if (Tr::is_zero(p0.mu - p1.nu) && Tr::is_zero(p0.nu - p1.mu)) {
            swap1 = true;
        } else {
            return {std::nullopt, "(mu, nu) multisets differ"};
        }
    }
    DiffeoJet<C> s0 = cusp_straighten(p0);
    DiffeoJet<C> s1 = cusp_straighten(p1);
    Jet<C> g0 = s0.apply(p0.g);
    Jet<C> g1 = s1.apply(p1.g);
    Jet<C> f = p0.f;
    DiffeoJet<C> pre1 = s1;
    if (swap1) {
        Matrix<C> sw(3, 3);
        sw(0, 0) = Tr::one();
        sw(1, 2) = Tr::one();
        sw(2, 1) = Tr::one();
        DiffeoJet<C> swd = DiffeoJet<C>::from_linear(sw, K);
        g1 = swd.apply(g1);
        pre1 = pre1.then_after(swd);
    }
    // canonical signs on the y and z axes; the x-axis admits no sign change
    std::vector<bool> fl0{false, false, false}, fl1{false, false, false};
    for (int ax : {1, 2}) {
        auto axis = CurveJet<C>::axis(ax, 3, K);
        auto [v0, a] = sign_canonicalize(restrict_to_curve(g0, axis));
        auto [v1, b] = sign_canonicalize(restrict_to_curve(g1, axis));
        fl0[(size_t)ax] = a;
        fl1[(size_t)ax] = b;
        (void)v0;
        (void)v1;
    }
    DiffeoJet<C> flip0 = axis_flips<C>(fl0, 3, K);
    DiffeoJet<C> flip1 = axis_flips<C>(fl1, 3, K);
    g0 = flip0.apply(g0);
    g1 = flip1.apply(g1);
    // restriction comparison on the three straightened curves (the axes)
    for (int ax = 0; ax < 3; ++ax) {
        auto axis = CurveJet<C>::axis(ax, 3, K);
        Jet<C> r0 = restrict_to_curve(g0, axis);
        Jet<C> r1 = restrict_to_curve(g1, axis);
        if (!(r0 == r1)) {
            const char* names[3] = {"x (simple)", "y", "z"};
            return {std::nullopt, std::string("restrictions differ on the ") + names[ax] +
                                      " tangency curve at degree " +
                                      std::to_string((r0 - r1).valuation())};
        }
    }
    // ideal certificates and the membership-based path conjugation
    (void)cusp_ideal_check(CuspPair<C>(f, g0));
    (void)cusp_ideal_check(CuspPair<C>(f, g1));
    DiffeoJet<C> psi = conjugate_by_path(f, g0, g1);
    DiffeoJet<C> phi = s0.then_after(flip0).then_after(psi)
                           .then_after(flip1.inverse_diffeo())
                           .then_after(pre1.inverse_diffeo());
    if (!(phi.apply(p0.f) == p1.f) || !(phi.apply(p0.g) == p1.g))
        throw Error("cusp_equivalent: assembled conjugacy failed verification");
    return {phi, ""};
}

} // namespace germ
