#pragma once

#include <optional>
#include <string>
#include <vector>

#include "germ/moser.hpp"

namespace germ {

// Decision of an equivalence question: a witness on success, a reason for a
// determinate negative.  Hypothesis failures throw instead.
template <class T>
struct Decision {
    std::optional<T> witness;
    std::string reason;
    explicit operator bool() const { return witness.has_value(); }
};

// Canonical restriction data of an R-generic pair: per axis, the couple
// (t^2, v_j) after straightening and the sign normalization.
template <class C>
struct RInvariant {
    std::vector<C> lambda;       // pencil eigenvalues, canonically sorted
    std::vector<Jet<C>> v;       // canonical g-restriction per axis
    std::vector<bool> flipped;   // sign choice made on each axis

    bool operator==(const RInvariant& o) const {
        return lambda == o.lambda && v == o.v;
    }
};

// Normalized position of a pair: f = sum x^2 exactly, tangency curves the
// axes, plus the diffeo realizing it.
template <class C>
struct NormalizedPair {
    DiffeoJet<C> phi; // original o phi = normalized
    Jet<C> f, g;
    std::vector<C> lambda;
};

// Flip t -> -t so the lowest odd coefficient is lex-positive; when all odd
// coefficients vanish through the order both signs agree.
template <class C>
std::pair<Jet<C>, bool> sign_canonicalize(const Jet<C>& v) {
    using Tr = scalar_traits<C>;
    int lowest_odd = -1;
    for (auto& [m, c] : v.terms()) {
        if (m[0] % 2 == 1) { lowest_odd = m[0]; break; }
        (void)c;
    }
    if (lowest_odd < 0) return {v, false};
    C c = v.coeff(Monomial({lowest_odd}));
    if (c.lex_positive()) return {v, false};
    Jet<C> w(1, v.order());
    for (auto& [m, cc] : v.terms())
        w.add_term(m, m[0] % 2 == 1 ? -cc : cc);
    return {w, true};
}

template <class C>
NormalizedPair<C> normalize_pair(const Jet<C>& f, const Jet<C>& g) {
    auto d = diagonalize_pair(f, g);
    auto phi2 = straighten(d.f, d.g, d.lambda);
    NormalizedPair<C> np;
    np.phi = d.phi.then_after(phi2);
    np.f = phi2.apply(d.f);
    np.g = phi2.apply(d.g);
    np.lambda = d.lambda;
    if (!(np.f == sum_of_squares_jet<C>(f.nvars(), f.order())))
        throw Error("normalize_pair: f normalization lost");
    return np;
}

template <class C>
Jet<C> jet_of_monomial(int deg, int order) {
    Jet<C> j(1, order);
    j.add_term(Monomial({deg}), scalar_traits<C>::one());
    return j;
}

// R-invariant: diagonalize, straighten, restrict to each axis, then apply
// the sign canonicalization.  f restricts to exactly t^2 on every axis.
template <class C>
RInvariant<C> r_invariants(const Jet<C>& f, const Jet<C>& g) {
    auto np = normalize_pair(f, g);
    int n = f.nvars(), K = f.order();
    RInvariant<C> inv;
    inv.lambda = np.lambda;
    for (int j = 0; j < n; ++j) {
        auto axis = CurveJet<C>::axis(j, n, K);
        Jet<C> u = restrict_to_curve(np.f, axis);
        if (!(u == jet_of_monomial<C>(2, K)))
            throw Error("r_invariants: f restriction is not t^2");
        auto [v, flip] = sign_canonicalize(restrict_to_curve(np.g, axis));
        inv.v.push_back(v);
        inv.flipped.push_back(flip);
    }
    return inv;
}

// Ambient sign-flip diffeo x_j -> -x_j for the flagged axes.
template <class C>
DiffeoJet<C> axis_flips(const std::vector<bool>& flips, int n, int order) {
    using Tr = scalar_traits<C>;
    Matrix<C> m = Matrix<C>::identity(n);
    for (int j = 0; j < n; ++j)
        if (flips[(size_t)j]) m(j, j) = -Tr::one();
    return DiffeoJet<C>::from_linear(m, order);
}

// Theorem-level decision: equal invariants yield an explicit conjugacy
// (f0 o phi, g0 o phi) = (f1, g1); unequal invariants are a determinate no.
template <class C>
Decision<DiffeoJet<C>> r_equivalent(const Jet<C>& f0, const Jet<C>& g0,
                                    const Jet<C>& f1, const Jet<C>& g1) {
    using Tr = scalar_traits<C>;
    int n = f0.nvars(), K = f0.order();
    auto np0 = normalize_pair(f0, g0);
    auto np1 = normalize_pair(f1, g1);
    if (np0.lambda != np1.lambda) {
        std::string s = "pencil eigenvalue lists differ:";
        for (auto& l : np0.lambda) s += " " + Tr::str(l);
        s += " vs";
        for (auto& l : np1.lambda) s += " " + Tr::str(l);
        return {std::nullopt, s};
    }
    // canonical restrictions
    std::vector<bool> flips0, flips1;
    std::vector<Jet<C>> v0, v1;
    for (int j = 0; j < n; ++j) {
        auto axis = CurveJet<C>::axis(j, n, K);
        auto [a, fa] = sign_canonicalize(restrict_to_curve(np0.g, axis));
        auto [b, fb] = sign_canonicalize(restrict_to_curve(np1.g, axis));
        if (!(a == b)) {
            // first differing coefficient as the witness
            Jet<C> diff = a - b;
            int d = diff.valuation();
            return {std::nullopt,
                    "restrictions differ on axis " + std::to_string(j + 1) +
                        " at degree " + std::to_string(d)};
        }
        flips0.push_back(fa);
        flips1.push_back(fb);
        v0.push_back(a);
        v1.push_back(b);
    }
    // realize the sign choices ambiently, then close the gap with the path
    // engine: both g's now share every axis restriction.
    DiffeoJet<C> s0 = axis_flips<C>(flips0, n, K);
    DiffeoJet<C> s1 = axis_flips<C>(flips1, n, K);
    Jet<C> gc0 = s0.apply(np0.g);
    Jet<C> gc1 = s1.apply(np1.g);
    Jet<C> fc = np0.f; // = sum x^2 = np1.f, flips preserve it
    DiffeoJet<C> psi = conjugate_by_path(fc, gc0, gc1);
    DiffeoJet<C> phi = np0.phi.then_after(s0).then_after(psi)
                           .then_after(s1.inverse_diffeo())
                           .then_after(np1.phi.inverse_diffeo());
    if (!(phi.apply(f0) == f1) || !(phi.apply(g0) == g1))
        throw Error("r_equivalent: assembled conjugacy failed verification");
    return {phi, ""};
}

} // namespace germ
