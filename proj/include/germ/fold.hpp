#pragma once

#include <vector>

#include "germ/normal_forms.hpp"
#include "germ/series.hpp"
#include "germ/tangency.hpp"

namespace germ {

// Fold normal form: coordinates with f = x_1 and g = phi(x_1) + sum_{i>1} x_i^2.
template <class C>
struct FoldNormalForm {
    Jet<C> phi1;        // the unique 1-variable function with phi o f = g on Tang
    DiffeoJet<C> chart; // source diffeo realizing the normal form
    bool g_regular;     // then the foliation pair is (x_1, x_1 + sum x_i^2)
};

template <class C>
FoldNormalForm<C> fold_normalize(const Jet<C>& f, const Jet<C>& g) {
    using Tr = scalar_traits<C>;
    int n = f.nvars(), K = f.order();
    if (g.nvars() != n) throw InputError("fold: variable mismatch");
    if (!Tr::is_zero(f.constant_term()) || !Tr::is_zero(g.constant_term()))
        throw InputError("fold: f(0) and g(0) must vanish");
    int m = -1;
    for (int i = 0; i < n; ++i)
        if (!Tr::is_zero(f.derivative(i).constant_term())) { m = i; break; }
    if (m < 0) throw NotAFold("fold: f is singular at the origin");

    // straighten f to the first coordinate: S = (f, other coordinates)
    std::vector<Jet<C>> comps;
    comps.push_back(f);
    for (int i = 0; i < n; ++i)
        if (i != m) comps.push_back(Jet<C>::variable(i, n, K));
    DiffeoJet<C> S(std::move(comps));
    DiffeoJet<C> chart = S.inverse_diffeo();
    Jet<C> g1 = chart.apply(g);
    Jet<C> x1 = Jet<C>::variable(0, n, K);
    if (!(chart.apply(f) == x1)) throw Error("fold: f straightening failed");

    // tangency locus: the common zeros of d_i g1, i >= 2
    for (int i = 1; i < n; ++i)
        if (!Tr::is_zero(g1.derivative(i).constant_term()))
            throw NotAFold("fold: tangency locus does not pass through the origin");
    Matrix<C> hess(n - 1, n - 1);
    for (int i = 1; i < n; ++i)
        for (int j = 1; j < n; ++j)
            hess(i - 1, j - 1) = g1.derivative(i).derivative(j).constant_term();
    if (!inverse(hess))
        throw NotAFold("fold: tangency ideal is not reduced (transverse Hessian "
                       "block is degenerate)");

    // curve x_i = gamma_i(x_1): Hensel on the n-1 equations d_i g1 = 0
    if (n > 1) {
        std::vector<Jet<C>> eqs;
        for (int i = 1; i < n; ++i) eqs.push_back(g1.derivative(i).extended(K));
        auto gamma = solve_implicit_system(eqs, n - 1);
        std::vector<Jet<C>> shift;
        shift.push_back(x1);
        for (int i = 1; i < n; ++i) {
            std::vector<int> e(1, 0);
            // gamma_i is a jet in x_1 only; view it in n variables
            Jet<C> gi(n, K);
            for (auto& [mo, c] : gamma[(size_t)(i - 1)].terms())
                gi.add_term(Monomial::var(0, n, mo[0]), c);
            shift.push_back(Jet<C>::variable(i, n, K) + gi);
        }
        DiffeoJet<C> move(std::move(shift));
        g1 = move.apply(g1);
        chart = chart.then_after(move);
        if (!(chart.apply(f) == x1)) throw Error("fold: curve shift broke f");
    }
    // now Tang = x_1-axis; phi1 is the restriction of g there
    auto axis = CurveJet<C>::axis(0, n, K);
    for (int i = 1; i < n; ++i)
        if (!restrict_to_curve(g1.derivative(i).extended(K), axis).is_zero())
            throw Error("fold: tangency curve not straightened");
    Jet<C> phi1 = restrict_to_curve(g1, axis);

    // g1 = phi1(x_1) + Q with Q in <x_2..x_n>^2: complete squares there
    Jet<C> head(n, K);
    for (auto& [mo, c] : phi1.terms()) head.add_term(Monomial::var(0, n, mo[0]), c);
    DiffeoJet<C> comp = complete_squares_from(g1, 1, head);
    chart = chart.then_after(comp);

    FoldNormalForm<C> out;
    out.phi1 = phi1;
    out.chart = chart;
    out.g_regular = (phi1.valuation() == 1);
    // postconditions
    if (!(chart.apply(f) == x1)) throw Error("fold: final f check failed");
    Jet<C> expect = head;
    for (int i = 1; i < n; ++i) expect.add_term(Monomial::var(i, n, 2), Tr::one());
    if (!(chart.apply(g) == expect)) throw Error("fold: final g check failed");
    return out;
}

} // namespace germ
