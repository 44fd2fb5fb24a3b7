#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "germ/moser.hpp"

#include "support.hpp"

using namespace germ;
using namespace germ::testsupport;

using J = Jet<GaussQ>;

TEST_CASE("decompose_in_ideal: spec examples") {
    int K = 8;
    // a = 8x^2 y over {4xy} -> r = 2x
    {
        IdealPresentation<GaussQ> pres;
        pres.nvars = 2;
        pres.order = K;
        pres.gens = {jet_of_terms(2, K, {{{1, 1}, GaussQ(4)}})};
        auto w = decompose_in_ideal(jet_of_terms(2, K, {{{2, 1}, GaussQ(8)}}), pres);
        CHECK(w.coeffs[0] == jet_of_terms(2, K, {{{1, 0}, GaussQ(2)}}));
    }
    // a = x^2 -> obstruction at degree 2
    {
        IdealPresentation<GaussQ> pres;
        pres.nvars = 2;
        pres.order = K;
        pres.gens = {jet_of_terms(2, K, {{{1, 1}, GaussQ(4)}})};
        try {
            (void)decompose_in_ideal(jet_of_terms(2, K, {{{2, 0}, GaussQ(1)}}), pres);
            FAIL("expected NotInIdeal");
        } catch (const NotInIdeal& e) {
            CHECK(e.degree == 2);
        }
    }
    // cusp model ideal {6x^2y, 18x^2z, 8yz}: a = x^2 y + y z -> r = (1/6, 0, 1/8)
    {
        IdealPresentation<GaussQ> pres;
        pres.nvars = 3;
        pres.order = K;
        pres.gens = {jet_of_terms(3, K, {{{2, 1, 0}, GaussQ(6)}}),
                     jet_of_terms(3, K, {{{2, 0, 1}, GaussQ(18)}}),
                     jet_of_terms(3, K, {{{0, 1, 1}, GaussQ(8)}})};
        auto w = decompose_in_ideal(
            jet_of_terms(3, K, {{{2, 1, 0}, GaussQ(1)}, {{0, 1, 1}, GaussQ(1)}}), pres);
        CHECK(w.coeffs[0] == J::constant(GaussQ(1, 6), 3, K));
        CHECK(w.coeffs[1].is_zero());
        CHECK(w.coeffs[2] == J::constant(GaussQ(1, 8), 3, K));
    }
}

TEST_CASE("decompose_in_ideal: higher corrections and minimal-norm determinism") {
    int K = 8;
    // generators with tails force iterated correction
    IdealPresentation<GaussQ> pres;
    pres.nvars = 2;
    pres.order = K;
    J g1 = jet_of_terms(2, K, {{{1, 1}, GaussQ(4)}, {{3, 0}, GaussQ(2)}});
    pres.gens = {g1};
    J a = jet_of_terms(2, K, {{{2, 1}, GaussQ(8)}, {{4, 0}, GaussQ(4)}});
    // a = 2x g1 exactly
    auto w = decompose_in_ideal(a, pres);
    CHECK(w.coeffs[0] == jet_of_terms(2, K, {{{1, 0}, GaussQ(2)}}));
    // determinism: same call gives the same witness
    auto w2 = decompose_in_ideal(a, pres);
    CHECK(w.coeffs[0] == w2.coeffs[0]);
}

TEST_CASE("radical certificate two-way membership via decompose (n = 3)") {
    int K = 8;
    J f = sum_of_squares(3, K);
    J g = jet_of_terms(3, K, {{{2, 0, 0}, GaussQ(1)},
                              {{0, 2, 0}, GaussQ(2)},
                              {{0, 0, 2}, GaussQ(3)},
                              {{1, 1, 1}, GaussQ(1, 3)}});
    auto pres = tangency_generators(f, g);
    IdealMembership<GaussQ> mem(pres);
    // x_i x_j in <h_kl>
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            Monomial m = Monomial::var(i, 3) * Monomial::var(j, 3);
            J target(3, pres.order);
            target.add_term(m, GaussQ(1));
            CHECK(mem.try_decompose(target).has_value());
        }
    // h_ij in <x_k x_l>
    IdealPresentation<GaussQ> monopres;
    monopres.nvars = 3;
    monopres.order = pres.order;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            J m(3, pres.order);
            m.add_term(Monomial::var(i, 3) * Monomial::var(j, 3), GaussQ(1));
            monopres.gens.push_back(m);
        }
    IdealMembership<GaussQ> mono(monopres);
    for (auto& h : pres.gens) CHECK(mono.try_decompose(h).has_value());
}

TEST_CASE("flow: trivial field gives the identity") {
    HomotopyField<GaussQ> X;
    X.order = 6;
    X.components.assign(2, Jet<Poly<GaussQ>>::zero(2, 6));
    CHECK(flow_to_time_one(X) == DiffeoJet<GaussQ>::identity(2, 6));
}

TEST_CASE("flow: linear rotation field against the closed form (float mode)") {
    // X = t (y d_x - x d_y)/c + d_t integrates to a rotation by 1/(2c).
    using JF = Jet<FloatC>;
    double c = 3.0;
    int K = 8;
    HomotopyField<FloatC> X;
    X.order = K;
    Jet<Poly<FloatC>> xc(2, K), yc(2, K);
    xc.add_term(Monomial({0, 1}), Poly<FloatC>(std::vector<FloatC>{FloatC(0.0), FloatC(1.0 / c)}));
    yc.add_term(Monomial({1, 0}), Poly<FloatC>(std::vector<FloatC>{FloatC(0.0), FloatC(-1.0 / c)}));
    X.components = {xc, yc};
    auto phi = flow_to_time_one(X);
    double ang = 1.0 / (2.0 * c);
    CHECK(phi.component(0).coeff(Monomial({1, 0})) == FloatC(std::cos(ang)));
    CHECK(phi.component(0).coeff(Monomial({0, 1})) == FloatC(std::sin(ang)));
    CHECK(phi.component(1).coeff(Monomial({1, 0})) == FloatC(-std::sin(ang)));
    CHECK(phi.component(1).coeff(Monomial({0, 1})) == FloatC(std::cos(ang)));
    // exact mode refuses fields with a linear part
    HomotopyField<GaussQ> Xq;
    Xq.order = K;
    Jet<Poly<GaussQ>> xq(2, K);
    xq.add_term(Monomial({0, 1}), Poly<GaussQ>(GaussQ(1)));
    Xq.components = {xq, Jet<Poly<GaussQ>>::zero(2, K)};
    CHECK_THROWS_AS((void)flow_to_time_one(Xq), FieldError);
    (void)JF::zero(2, 2);
}

TEST_CASE("conjugate_by_path: spec examples") {
    int K = 8;
    J f = sum_of_squares(2, K);
    J g0 = jet_of_terms(2, K, {{{2, 0}, GaussQ(1)}, {{0, 2}, GaussQ(2)}});

    // g1 = g0 -> identity
    CHECK(conjugate_by_path(f, g0, g0) == DiffeoJet<GaussQ>::identity(2, K));

    // g1 = g0 + x^2 y^2 = g0 + (xy)^2: in the ideal, engine must succeed
    J g1 = g0 + jet_of_terms(2, K, {{{2, 2}, GaussQ(1)}});
    auto phi = conjugate_by_path(f, g0, g1);
    CHECK(phi.apply(f) == f);
    CHECK(phi.apply(g0) == g1);

    // g1 = g0 + x^3: x^3 is not in <xy>
    J gbad = g0 + jet_of_terms(2, K, {{{3, 0}, GaussQ(1)}});
    try {
        (void)conjugate_by_path(f, g0, gbad);
        FAIL("expected HypothesisFailed");
    } catch (const HypothesisFailed& e) {
        CHECK(e.which == HypothesisFailed::Which::NotInIdeal);
    }
}

TEST_CASE("homotopy_field: regular f with non-vanishing coefficients is rejected") {
    int K = 6;
    // f = x is regular; a witness whose coefficient r_12 has a nonzero value
    // at the origin must be refused before any field is assembled.
    J f = jet_of_terms(2, K + 1, {{{1, 0}, GaussQ(1)}});
    J g0b = jet_of_terms(2, K + 1, {{{0, 2}, GaussQ(1)}});
    std::vector<Jet<Poly<GaussQ>>> witness{
        Jet<Poly<GaussQ>>::constant(Poly<GaussQ>(GaussQ(1, 2)), 2, K)};
    std::vector<std::pair<int, int>> idx{{0, 1}};
    try {
        (void)homotopy_field(f, g0b, g0b, witness, idx, K);
        FAIL("expected HypothesisFailed");
    } catch (const HypothesisFailed& e) {
        CHECK(e.which == HypothesisFailed::Which::RegularWithoutVanishing);
    }
}

TEST_CASE("conjugate_by_path: random instances with planted ideal-squared deformations") {
    Rng rng(5151);
    for (int it = 0; it < 10; ++it) {
        int n = 2 + (it % 2), K = 8;
        J f = sum_of_squares(n, K);
        J g0(n, K);
        for (int i = 0; i < n; ++i) g0.add_term(Monomial::var(i, n, 2), GaussQ(2 * i + 1, 2));
        g0 += rand_jet(rng, n, K, 3, 4, 2);
        auto pres = tangency_generators(f.extended(K + 1), g0.extended(K + 1));
        // delta = random combination of products of two generators
        J delta(n, K);
        std::uniform_int_distribution<size_t> pick(0, pres.gens.size() - 1);
        for (int t = 0; t < 2; ++t) {
            J prod = (pres.gens[pick(rng)] * pres.gens[pick(rng)]).truncated(K);
            delta += prod.scaled(rand_gauss(rng, false));
        }
        J g1 = g0 + delta;
        auto phi = conjugate_by_path(f, g0, g1);
        CHECK(phi.apply(f) == f);
        CHECK(phi.apply(g0) == g1);
    }
}
