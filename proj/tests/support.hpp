#pragma once

// Shared helpers for the test suites: seeded random jets, diffeos and pairs.

#include <random>
#include <vector>

#include "germ/diffeo.hpp"
#include "germ/jet.hpp"
#include "germ/series.hpp"

namespace germ::testsupport {

using Rng = std::mt19937;

inline Rat rand_rat(Rng& rng, int num_range = 3, int den_max = 3) {
    std::uniform_int_distribution<int> num(-num_range, num_range);
    std::uniform_int_distribution<int> den(1, den_max);
    return Rat(num(rng), den(rng));
}

inline GaussQ rand_gauss(Rng& rng, bool allow_imag = true) {
    GaussQ g(rand_rat(rng));
    if (allow_imag && std::uniform_int_distribution<int>(0, 3)(rng) == 0)
        g.im = rand_rat(rng);
    return g;
}

// Random jet with terms of degree in [lo, hi], mostly sparse.
inline Jet<GaussQ> rand_jet(Rng& rng, int nvars, int order, int lo = 0, int hi = -1,
                            int tries = 6) {
    if (hi < 0) hi = order;
    Jet<GaussQ> j(nvars, order);
    auto monos_all = std::vector<Monomial>{};
    for (int d = lo; d <= hi; ++d)
        for (auto& m : monomials_of_degree(nvars, d)) monos_all.push_back(m);
    std::uniform_int_distribution<size_t> pick(0, monos_all.size() - 1);
    for (int t = 0; t < tries; ++t)
        j.add_term(monos_all[pick(rng)], rand_gauss(rng));
    return j;
}

// Random diffeo jet whose linear part keeps exact-mode pipelines inside the
// field: diag of squares times a unipotent triangular matrix, plus random
// higher-order terms.
inline DiffeoJet<GaussQ> rand_diffeo(Rng& rng, int nvars, int order, bool square_friendly = true) {
    Matrix<GaussQ> lin = Matrix<GaussQ>::identity(nvars);
    std::uniform_int_distribution<int> small(-2, 2);
    std::uniform_int_distribution<int> sq(1, 2);
    for (int i = 0; i < nvars; ++i) {
        if (square_friendly) {
            long s = sq(rng);
            lin(i, i) = GaussQ(s * s);
        } else {
            lin(i, i) = GaussQ(sq(rng));
        }
        for (int j = i + 1; j < nvars; ++j) lin(i, j) = GaussQ(small(rng));
    }
    std::vector<Jet<GaussQ>> comps;
    for (int i = 0; i < nvars; ++i) {
        Jet<GaussQ> c(nvars, order);
        for (int k = 0; k < nvars; ++k) c.add_term(Monomial::var(k, nvars), lin(i, k));
        // a few higher-order terms
        Jet<GaussQ> h = rand_jet(rng, nvars, order, 2, std::min(order, 4), 3);
        c += h;
        comps.push_back(std::move(c));
    }
    return DiffeoJet<GaussQ>(std::move(comps));
}

// Sum of squares of the variables.
inline Jet<GaussQ> sum_of_squares(int nvars, int order) {
    Jet<GaussQ> f(nvars, order);
    for (int i = 0; i < nvars; ++i) f.add_term(Monomial::var(i, nvars, 2), GaussQ(1));
    return f;
}

// Parse helpers for terse test input.
inline Jet<GaussQ> jet_of_terms(int nvars, int order,
                                std::vector<std::pair<std::vector<int>, GaussQ>> terms) {
    Jet<GaussQ> j(nvars, order);
    for (auto& [e, c] : terms) j.add_term(Monomial(e), c);
    return j;
}

} // namespace germ::testsupport
