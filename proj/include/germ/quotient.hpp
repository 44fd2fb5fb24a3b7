#pragma once

#include <vector>

#include "germ/invariants.hpp"
#include "germ/normal_forms.hpp"

namespace germ {

// Canonical data of a generic quotient: (lambda_i, alpha_i) with alpha_1
// normalized to 1 by a global scaling, signs fixed by lexicographic
// minimization over the 2^n axis flips.
template <class C>
struct QNormalForm {
    std::vector<C> lambda;
    std::vector<C> alpha; // alpha[0] == 1

    bool operator==(const QNormalForm& o) const {
        if (lambda.size() != o.lambda.size()) return false;
        for (size_t i = 0; i < lambda.size(); ++i)
            if (lambda[i] != o.lambda[i] || alpha[i] != o.alpha[i]) return false;
        return true;
    }
};

namespace detail {

template <class C>
bool lex_less_vec(const std::vector<C>& a, const std::vector<C>& b) {
    using Tr = scalar_traits<C>;
    for (size_t i = 0; i < a.size(); ++i) {
        if (Tr::is_zero(a[i] - b[i])) continue;
        return Tr::lex_less(a[i], b[i]);
    }
    return false;
}

} // namespace detail

// Extract (lambda_i, alpha_i): diagonalize + straighten, read the cubic
// coefficients of the axis restrictions, then canonicalize.
template <class C>
QNormalForm<C> q_normal_form(const Jet<C>& f, const Jet<C>& g) {
    using Tr = scalar_traits<C>;
    int n = f.nvars(), K = f.order();
    if (K < 3) throw InputError("q_normal_form: order must be at least 3");
    auto np = normalize_pair(f, g);
    std::vector<C> alpha;
    for (int j = 0; j < n; ++j) {
        auto axis = CurveJet<C>::axis(j, n, K);
        C a = restrict_to_curve(np.g, axis).coeff(Monomial({3}));
        if (Tr::is_zero(a))
            throw NotGeneric("quotient not Q-generic: cubic coefficient vanishes",
                             "alpha_" + std::to_string(j + 1) + " = 0");
        alpha.push_back(a);
    }
    // quotient out the residual symmetry: per-axis sign flips followed by the
    // global scaling that sets alpha_1 = 1; keep the lexicographically least.
    QNormalForm<C> best;
    best.lambda = np.lambda;
    bool have = false;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        std::vector<C> a = alpha;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) a[(size_t)i] = -a[(size_t)i];
        C scale = a[0].inverse();
        for (auto& x : a) x = x * scale;
        if (!have || detail::lex_less_vec(a, best.alpha)) {
            best.alpha = a;
            have = true;
        }
    }
    return best;
}

// Restriction of g to the cone {f = 0}: classified by the n-1 differences
// mu_i = lambda_i - lambda_n (g and g + c f agree on the cone).
template <class C>
std::vector<C> cone_restriction_form(const Jet<C>& f, const Jet<C>& g) {
    auto d = diagonalize_pair(f, g);
    int n = f.nvars();
    std::vector<C> mu;
    for (int i = 0; i + 1 < n; ++i) mu.push_back(d.lambda[(size_t)i] - d.lambda[(size_t)n - 1]);
    std::sort(mu.begin(), mu.end(),
              [](const C& a, const C& b) { return scalar_traits<C>::lex_less(a, b); });
    return mu;
}

// The degree-2 Euler-type identity used by the quotient engine: for
// f = sum x_i^2 (exactly) and any g,
//   (1/2) sum x_i omega_i = f (g - (1/2) sum x_i d_i g),  omega = g df - f dg.
template <class C>
bool euler_identity_holds(const Jet<C>& f, const Jet<C>& g) {
    using Tr = scalar_traits<C>;
    int n = f.nvars();
    Jet<C> lhs(n, f.order() - 1), rhs_sum(n, f.order() - 1);
    Jet<C> half = Jet<C>::constant(C(1, 2), n, f.order());
    for (int i = 0; i < n; ++i) {
        Jet<C> xi = Jet<C>::variable(i, n, f.order());
        Jet<C> omega_i = g * f.derivative(i).extended(f.order()) -
                         f * g.derivative(i).extended(f.order());
        lhs += (xi * omega_i).truncated(f.order() - 1).scaled(C(1, 2));
        rhs_sum += (xi * g.derivative(i).extended(f.order())).truncated(f.order() - 1);
    }
    Jet<C> rhs = (f.truncated(f.order() - 1) *
                  (g.truncated(f.order() - 1) - rhs_sum.scaled(C(1, 2))));
    (void)Tr::zero();
    (void)half;
    return lhs == rhs;
}

// Quotient conjugation (3-jet determinacy): phi with
// (g0/f0) o phi = g1/f1, i.e. (g0 o phi) f1 = g1 (f0 o phi) through K+2.
template <class C>
DiffeoJet<C> conjugate_quotient(const Jet<C>& f0in, const Jet<C>& g0in,
                                const Jet<C>& f1in, const Jet<C>& g1in) {
    using Tr = scalar_traits<C>;
    int n = f0in.nvars();
    int K = std::min({f0in.order(), g0in.order(), f1in.order(), g1in.order()});
    int Kv = K + 2; // verification order of the cross-multiplied identity
    int Kw = Kv + 3; // padding: the endpoint identity costs two degrees, h one
    Jet<C> f0 = f0in.extended(Kw), g0 = g0in.extended(Kw);
    Jet<C> f1 = f1in.extended(Kw), g1 = g1in.extended(Kw);
    if (!(f0.truncated(3) == f1.truncated(3)) || !(g0.truncated(3) == g1.truncated(3)))
        throw HypothesisFailed(HypothesisFailed::Which::JetMismatch,
                               "3-jets of the two quotients differ");
    // canonical separable models via the restriction invariants
    auto np0 = normalize_pair(f0, g0);
    auto np1 = normalize_pair(f1, g1);
    if (np0.lambda != np1.lambda)
        throw HypothesisFailed(HypothesisFailed::Which::JetMismatch,
                               "pencil eigenvalues differ despite matching 3-jets");
    std::vector<Jet<C>> u, v0, v1;
    for (int j = 0; j < n; ++j) {
        auto axis = CurveJet<C>::axis(j, n, Kw);
        u.push_back(jet_of_monomial<C>(2, Kw));
        Jet<C> a = restrict_to_curve(np0.g, axis);
        Jet<C> b = restrict_to_curve(np1.g, axis);
        C a3 = a.coeff(Monomial({3})), b3 = b.coeff(Monomial({3}));
        if (Tr::is_zero(a3) || Tr::is_zero(b3))
            throw NotGeneric("quotient not Q-generic: cubic coefficient vanishes",
                             "axis " + std::to_string(j + 1));
        if (!Tr::is_zero(a3 - b3))
            throw Error("conjugate_quotient: cubic restriction data differs despite "
                        "matching 3-jets");
        v0.push_back(a);
        v1.push_back(b);
    }
    Matrix<C> axesm = Matrix<C>::identity(n);
    auto [F, G0] = separable_realize(axesm, u, v0);
    auto [F1, G1] = separable_realize(axesm, u, v1);
    if (!(F == F1)) throw Error("conjugate_quotient: model denominators differ");
    // pair_k -> model_k
    auto dec0 = r_equivalent(f0, g0, F, G0);
    auto dec1 = r_equivalent(f1, g1, F, G1);
    if (!dec0.witness || !dec1.witness)
        throw Error("conjugate_quotient: model reduction failed: " + dec0.reason + dec1.reason);
    // Moser step on the quotient between the separable models
    Jet<C> delta = G1 - G0;
    DiffeoJet<C> path = DiffeoJet<C>::identity(n, Kw);
    if (!delta.is_zero()) {
        if (delta.valuation() < 4)
            throw Error("conjugate_quotient: model gap not in m^4");
        // omega_i(t) = g_t d_i F - F d_i g_t,  g_t = G0 + t delta
        Jet<Poly<C>> Gt = lift_poly(G0) + lift_poly(delta).scaled(Poly<C>::variable());
        Jet<Poly<C>> Fl = lift_poly(F);
        std::vector<Jet<Poly<C>>> omega;
        int oord = Kw - 1;
        for (int i = 0; i < n; ++i)
            omega.push_back((Gt * Fl.derivative(i) - Fl * Gt.derivative(i)).truncated(oord));
        // r = -F d_t g = -F delta; solve omega(X) = 0
        Jet<Poly<C>> target = (-(Fl * lift_poly(delta))).truncated(oord);
        ParametricMembership<C> mem(omega, n, oord);
        std::string why;
        auto wit = mem.try_decompose(target, &why);
        if (!wit)
            throw HypothesisFailed(HypothesisFailed::Which::NotInIdeal,
                                   "quotient path field unsolvable: " + why);
        HomotopyField<C> X;
        X.order = oord;
        X.components = *wit;
        for (auto& c : X.components)
            if (c.valuation() < 1)
                throw Error("conjugate_quotient: field does not vanish at the origin");
        DiffeoJet<C> chi = flow_to_time_one(X);
        path = chi.inverse_diffeo();
        // cross-multiplied identity between the models, through Kv
        Jet<C> lhs = (path.apply(G0) * F).truncated(Kv);
        Jet<C> rhs = (G1 * path.apply(F)).truncated(Kv);
        if (!(lhs == rhs))
            throw Error("conjugate_quotient: model quotient identity failed");
    }
    DiffeoJet<C> phi = dec0.witness->then_after(path)
                           .then_after(dec1.witness->inverse_diffeo());
    // final verification on the original (padded) data through Kv
    Jet<C> lhs = (phi.apply(g0) * f1).truncated(Kv);
    Jet<C> rhs = (g1 * phi.apply(f0)).truncated(Kv);
    if (!(lhs == rhs)) throw Error("conjugate_quotient: quotient identity failed");
    return phi;
}

} // namespace germ
