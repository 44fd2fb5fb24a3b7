#pragma once

#include <vector>

#include "germ/invariants.hpp"

namespace germ {

// The nontrivial solution of f(i(t)) = f(t) for a 1-variable Morse jet:
// i(0) = 0, i'(0) = -1, i o i = id through the order.
template <class C>
Jet<C> involution(const Jet<C>& f) {
    using Tr = scalar_traits<C>;
    if (f.nvars() != 1) throw InputError("involution: expects a 1-variable jet");
    if (f.valuation() != 2)
        throw Error("involution: valuation must be exactly 2, got " +
                    std::to_string(f.valuation()));
    int K = f.order();
    C a = f.coeff(Monomial({2}));
    C scale = (a * Tr::from_int(2)).inverse();
    Jet<C> i = -var1<C>(K);
    for (int pass = 0; pass <= K + 1; ++pass) {
        Jet<C> err = f.compose(std::vector<Jet<C>>{i}) - f;
        if (err.is_zero()) break;
        int m = err.valuation();
        if (m > K) break;
        Jet<C> corr(1, K);
        Jet<C> low = err.graded_part(m);
        for (auto& [mo, c] : low.terms()) corr.add_term(Monomial({mo[0] - 1}), c * scale);
        i += corr;
    }
    if (!(f.compose(std::vector<Jet<C>>{i}) == f))
        throw Error("involution: failed to satisfy f o i = f");
    if (!(i.compose(std::vector<Jet<C>>{i}) == var1<C>(K)))
        throw Error("involution: i o i != id");
    return i;
}

// Holonomy composite between the axis-j and last-axis tangency curves of a
// straightened pair: f-transport out, g-transport back.  Its linear part
// squares to lambda_j / lambda_n, and g o alpha_j = g o phi o alpha_n holds.
template <class C>
Jet<C> holonomy_composite(const Jet<C>& f, const Jet<C>& g, int j) {
    int n = f.nvars(), K = f.order();
    int last = n - 1;
    if (j < 0 || j >= last) throw InputError("holonomy_composite: need 0 <= j < n-1");
    auto axis_j = CurveJet<C>::axis(j, n, K);
    auto axis_n = CurveJet<C>::axis(last, n, K);
    Jet<C> uj = restrict_to_curve(f, axis_j), un = restrict_to_curve(f, axis_n);
    Jet<C> vj = restrict_to_curve(g, axis_j), vn = restrict_to_curve(g, axis_n);
    auto r_uj = principal_root(uj, 2), r_un = principal_root(un, 2);
    auto r_vj = principal_root(vj, 2), r_vn = principal_root(vn, 2);
    if (!r_uj || !r_un)
        throw Error("holonomy_composite: f restriction is not Morse on an axis");
    if (!r_vj || !r_vn)
        throw FieldError("holonomy_composite: branch of sqrt(lambda) not in the field "
                         "(use float mode)");
    // f-transport T_n -> T_j : s = (rho^f_j)^{-1} o rho^f_n
    Jet<C> to_j = invert_scalar_jet(*r_uj).compose(std::vector<Jet<C>>{*r_un});
    // g-transport T_j -> T_n : tau = (rho^g_n)^{-1} o rho^g_j
    Jet<C> back = invert_scalar_jet(*r_vn).compose(std::vector<Jet<C>>{*r_vj});
    Jet<C> comp = back.compose(std::vector<Jet<C>>{to_j});
    // reconstruction identity: v_n o comp = v_j (exact through the order)
    if (!(vn.compose(std::vector<Jet<C>>{comp}) == vj))
        throw Error("holonomy_composite: reconstruction identity failed");
    return comp;
}

// Foliation-level invariant: involutions of the last-axis restrictions plus
// the holonomy composites anchored there.
template <class C>
struct FInvariant {
    Jet<C> i_f, i_g;
    std::vector<Jet<C>> composites; // j = 0 .. n-2
};

template <class C>
FInvariant<C> f_invariant_normalized(const Jet<C>& f, const Jet<C>& g) {
    int n = f.nvars(), K = f.order();
    auto axis_n = CurveJet<C>::axis(n - 1, n, K);
    FInvariant<C> inv;
    inv.i_f = involution(restrict_to_curve(f, axis_n));
    inv.i_g = involution(restrict_to_curve(g, axis_n));
    for (int j = 0; j + 1 < n; ++j) inv.composites.push_back(holonomy_composite(f, g, j));
    return inv;
}

template <class C>
FInvariant<C> f_invariant(const Jet<C>& f, const Jet<C>& g) {
    auto np = normalize_pair(f, g);
    return f_invariant_normalized(np.f, np.g);
}

namespace detail {

// Solve psi (1-variable, psi(0) = 0) with A o psi = psi o B for every pair
// (A, B) in the list, degree by degree; gamma = psi'(0) is supplied.
template <class C>
std::optional<Jet<C>> conjugacy_solve(const std::vector<std::pair<Jet<C>, Jet<C>>>& eqs,
                                      const C& gamma, int K, std::string* why) {
    using Tr = scalar_traits<C>;
    Jet<C> psi = var1<C>(K).scaled(gamma);
    for (int m = 2; m <= K; ++m) {
        // residual with c_m = 0 and the linear coefficient of c_m per equation
        std::vector<C> coef, resid;
        Jet<C> probe = psi + jet_of_monomial<C>(m, K);
        for (auto& [A, B] : eqs) {
            Jet<C> r0 = A.compose(std::vector<Jet<C>>{psi}) -
                        psi.compose(std::vector<Jet<C>>{B});
            Jet<C> r1 = A.compose(std::vector<Jet<C>>{probe}) -
                        probe.compose(std::vector<Jet<C>>{B});
            resid.push_back(r0.coeff(Monomial({m})));
            coef.push_back((r1 - r0).coeff(Monomial({m})));
        }
        // one unknown, many equations
        C cm = Tr::zero();
        bool pinned = false;
        for (size_t e = 0; e < eqs.size(); ++e) {
            if (Tr::is_zero(coef[e])) continue;
            C cand = -(resid[e] / coef[e]);
            if (!pinned) {
                cm = cand;
                pinned = true;
            } else if (!Tr::is_zero(cm - cand)) {
                if (why) *why = "inconsistent conjugacy equations at degree " + std::to_string(m);
                return std::nullopt;
            }
        }
        for (size_t e = 0; e < eqs.size(); ++e) {
            if (Tr::is_zero(coef[e]) && !Tr::is_zero(resid[e])) {
                if (why) *why = "obstructed conjugacy at degree " + std::to_string(m);
                return std::nullopt;
            }
        }
        if (pinned && !Tr::is_zero(cm)) psi += jet_of_monomial<C>(m, K).scaled(cm);
    }
    for (auto& [A, B] : eqs) {
        if (!(A.compose(std::vector<Jet<C>>{psi}) == psi.compose(std::vector<Jet<C>>{B}))) {
            if (why) *why = "final conjugacy verification failed";
            return std::nullopt;
        }
    }
    return psi;
}

// Candidate values for psi'(0) from the lowest-degree nonlinear data.
template <class C>
std::vector<C> gamma_candidates(const std::vector<std::pair<Jet<C>, Jet<C>>>& eqs) {
    using Tr = scalar_traits<C>;
    std::vector<C> out;
    auto push = [&](const C& g) {
        if (Tr::is_zero(g)) return;
        for (auto& x : out)
            if (Tr::is_zero(x - g)) return;
        out.push_back(g);
    };
    // degree-2 data with c_2 = 0 (odd psi forced by the i_f equation):
    // a2 gamma^2 = b2 gamma  =>  gamma = b2 / a2
    for (auto& [A, B] : eqs) {
        C a2 = A.coeff(Monomial({2})), b2 = B.coeff(Monomial({2}));
        if (!Tr::is_zero(a2)) push(b2 / a2);
    }
    // degree-3 data: a3 gamma^3 = b3 gamma  =>  gamma^2 = b3 / a3
    for (auto& [A, B] : eqs) {
        C a3 = A.coeff(Monomial({3})), b3 = B.coeff(Monomial({3}));
        if (Tr::is_zero(a3) || Tr::is_zero(b3)) continue;
        auto r = Tr::sqrt(b3 / a3);
        if (r) {
            push(*r);
            push(-*r);
        }
    }
    push(Tr::one());
    push(-Tr::one());
    return out;
}

} // namespace detail

// Formal equivalence of foliation pairs: solves for a single psi conjugating
// both involutions and every holonomy composite.  Decided at jet level only.
template <class C>
Decision<Jet<C>> f_equivalent(const Jet<C>& f0, const Jet<C>& g0,
                              const Jet<C>& f1, const Jet<C>& g1) {
    using Tr = scalar_traits<C>;
    auto np0 = normalize_pair(f0, g0);
    auto np1 = normalize_pair(f1, g1);
    auto inv0 = f_invariant_normalized(np0.f, np0.g);
    auto inv1 = f_invariant_normalized(np1.f, np1.g);
    // linear-part data must match: the composite linear parts square to the
    // lambda-ratio invariants
    std::string last_reason = "no matching of tangency curves succeeded";
    if (inv0.composites.size() != inv1.composites.size())
        return {std::nullopt, "different variable counts"};
    size_t ncomp = inv0.composites.size();
    // enumerate pairings of the non-anchor axes
    std::vector<size_t> perm(ncomp);
    for (size_t i = 0; i < ncomp; ++i) perm[i] = i;
    do {
        bool linear_ok = true;
        for (size_t j = 0; j < ncomp; ++j) {
            C l0 = inv0.composites[j].coeff(Monomial({1}));
            C l1 = inv1.composites[perm[j]].coeff(Monomial({1}));
            if (!Tr::is_zero(l0 * l0 - l1 * l1)) { linear_ok = false; break; }
        }
        if (!linear_ok) {
            last_reason = "lambda-ratio data differs at linear degree";
            continue;
        }
        // Per composite, the square-root determination can be switched by
        // composing with the involutions; keep the variants whose linear
        // part matches the left-hand side.
        auto comp1 = [&](const Jet<C>& a, const Jet<C>& b) {
            return a.compose(std::vector<Jet<C>>{b});
        };
        std::vector<std::vector<Jet<C>>> cands(ncomp);
        bool feasible = true;
        for (size_t j = 0; j < ncomp && feasible; ++j) {
            C l0 = inv0.composites[j].coeff(Monomial({1}));
            const Jet<C>& t = inv1.composites[perm[j]];
            std::vector<Jet<C>> vars{t, comp1(t, inv1.i_f), comp1(inv1.i_g, t),
                                     comp1(inv1.i_g, comp1(t, inv1.i_f))};
            for (auto& v : vars) {
                if (!Tr::is_zero(v.coeff(Monomial({1})) - l0)) continue;
                bool dup = false;
                for (auto& c : cands[j])
                    if (c == v) dup = true;
                if (!dup) cands[j].push_back(v);
            }
            if (cands[j].empty()) feasible = false;
        }
        if (!feasible) {
            last_reason = "composite linear parts not alignable";
            continue;
        }
        // enumerate determination choices
        std::vector<size_t> choice(ncomp, 0);
        while (true) {
            std::vector<std::pair<Jet<C>, Jet<C>>> eqs;
            eqs.emplace_back(inv1.i_f, inv0.i_f);
            eqs.emplace_back(inv1.i_g, inv0.i_g);
            for (size_t j = 0; j < ncomp; ++j)
                eqs.emplace_back(cands[j][choice[j]], inv0.composites[j]);
            std::string why;
            for (auto& gamma : detail::gamma_candidates(eqs)) {
                auto psi = detail::conjugacy_solve(eqs, gamma, f0.order(), &why);
                if (psi) return {*psi, ""};
            }
            if (!why.empty()) last_reason = why;
            size_t k = 0;
            while (k < ncomp && ++choice[k] == cands[k].size()) choice[k++] = 0;
            if (k == ncomp) break;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return {std::nullopt, last_reason};
}

} // namespace germ
