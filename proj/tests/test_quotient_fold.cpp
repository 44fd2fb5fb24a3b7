#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "germ/fold.hpp"
#include "germ/genericity.hpp"
#include "germ/quotient.hpp"
#include "germ/sigma.hpp"

#include "support.hpp"

using namespace germ;
using namespace germ::testsupport;

using J = Jet<GaussQ>;

static std::pair<J, J> diag_pair(std::vector<GaussQ> lam, int K,
                                 std::vector<GaussQ> alpha = {}) {
    int n = (int)lam.size();
    J f = sum_of_squares(n, K);
    J g(n, K);
    for (int i = 0; i < n; ++i) {
        g.add_term(Monomial::var(i, n, 2), lam[(size_t)i]);
        if (!alpha.empty()) g.add_term(Monomial::var(i, n, 3), alpha[(size_t)i]);
    }
    return {f, g};
}

TEST_CASE("sigma_curves: spec examples") {
    int K = 8;
    auto [f, g] = diag_pair({GaussQ(1), GaussQ(2)}, K);
    auto sc = sigma_curves(f, g);
    REQUIRE(sc.size() == 2);
    for (auto& s : sc) CHECK(s.multiplicity == 2);
    CHECK(sc[0].curve.component(0) == jet_of_terms(1, K, {{{2}, GaussQ(1)}}));
    CHECK(sc[0].curve.component(1) == jet_of_terms(1, K, {{{2}, GaussQ(1)}}));
    CHECK(sc[1].curve.component(1) == jet_of_terms(1, K, {{{2}, GaussQ(2)}}));

    // cubic-perturbed pair: the cusp-image case
    auto [f2, g2] = diag_pair({GaussQ(1), GaussQ(2)}, K, {GaussQ(1), GaussQ(1)});
    auto sc2 = sigma_curves(f2, g2);
    CHECK(sc2[0].curve.component(1).coeff(Monomial({3})) == GaussQ(1));
    CHECK(sc2[0].multiplicity == 2);

    // multiplicity is the valuation of the parametrization
    CurveJet<GaussQ> c(std::vector<J>{jet_of_terms(1, K, {{{3}, GaussQ(1)}}),
                                      jet_of_terms(1, K, {{{3}, GaussQ(1)}})});
    CHECK(sigma_multiplicity(c) == 3);

    // multiplicity invariant under reparametrization
    Rng rng(4);
    for (int it = 0; it < 10; ++it) {
        J rho = var1<GaussQ>(K).scaled(GaussQ(1 + (it % 3))) + rand_jet(rng, 1, K, 2, 5, 2);
        CHECK(sigma_multiplicity(c.reparametrized(rho)) == 3);
    }
}

TEST_CASE("a_equivalent: identity and round trips") {
    int K = 7;
    auto [f, g] = diag_pair({GaussQ(1), GaussQ(2)}, K, {GaussQ(1), GaussQ(1, 2)});
    // p1 = p0
    {
        auto dec = a_equivalent(f, g, f, g);
        REQUIRE(dec.witness.has_value());
    }
    // p1 = psi o p0 o phi for a source diffeo and a target tweak
    {
        Rng rng(31);
        auto phi0 = rand_diffeo(rng, 2, K);
        // target diffeo: identity linear part plus quadratic mixing
        J t1 = J::variable(0, 2, K) + (J::variable(1, 2, K) * J::variable(1, 2, K)).scaled(GaussQ(1, 2));
        J t2 = J::variable(1, 2, K) + (J::variable(0, 2, K) * J::variable(0, 2, K)).scaled(GaussQ(1, 3));
        DiffeoJet<GaussQ> psi0({t1, t2});
        J f1 = psi0.component(0).compose(std::vector<J>{phi0.apply(f), phi0.apply(g)});
        J g1 = psi0.component(1).compose(std::vector<J>{phi0.apply(f), phi0.apply(g)});
        auto dec = a_equivalent(f, g, f1, g1);
        REQUIRE(dec.witness.has_value());
    }
    // a target-linear move: g receives a multiple of f
    {
        auto dec = a_equivalent(f, g, f, g + f.scaled(GaussQ(3)));
        REQUIRE(dec.witness.has_value());
    }
}

TEST_CASE("a_equivalent: cross-ratio obstruction for n = 4") {
    int K = 5;
    auto [f0, g0] = diag_pair({GaussQ(1), GaussQ(2), GaussQ(3), GaussQ(4)}, K);
    auto [f1, g1] = diag_pair({GaussQ(1), GaussQ(2), GaussQ(3), GaussQ(100)}, K);
    auto dec = a_equivalent(f0, g0, f1, g1);
    CHECK(!dec.witness.has_value());
    CHECK(dec.reason.find("cross-ratio") != std::string::npos);
}

TEST_CASE("q_normal_form: spec examples and round trips") {
    int K = 8;
    // normal-form input reports its own tuple with alpha_1 = 1
    {
        auto [f, g] = diag_pair({GaussQ(1), GaussQ(2)}, K, {GaussQ(1), GaussQ(1, 2)});
        auto q = q_normal_form(f, g);
        CHECK(q.lambda == std::vector<GaussQ>{GaussQ(1), GaussQ(2)});
        CHECK(q.alpha[0] == GaussQ(1));
        CHECK(q.alpha[1] * q.alpha[1] == GaussQ(1, 4)); // canonical sign choice
    }
    // invariance under source diffeos and unit multiplication of the pair
    {
        Rng rng(606);
        int done = 0;
        for (int it = 0; it < 30 && done < 10; ++it) {
            int n = 2 + (it % 2);
            std::vector<GaussQ> lam, alpha;
            for (int i = 0; i < n; ++i) {
                lam.push_back(GaussQ(i + 1));
                alpha.push_back(rand_gauss(rng, false));
            }
            bool bad = false;
            for (auto& a : alpha)
                if (a.is_zero()) bad = true;
            if (bad) continue;
            auto [f, g] = diag_pair(lam, K, alpha);
            g += rand_jet(rng, n, K, 4, K, 2);
            auto base = q_normal_form(f, g);
            auto psi = rand_diffeo(rng, n, K);
            // unit with U(0) = 1
            J unit = J::constant(GaussQ(1), n, K) + rand_jet(rng, n, K, 1, 2, 2);
            J fu = (f * unit), gu = (g * unit);
            try {
                auto viaPsi = q_normal_form(psi.apply(f), psi.apply(g));
                auto viaUnit = q_normal_form(fu, gu);
                CHECK(base == viaPsi);
                CHECK(base == viaUnit);
                ++done;
            } catch (const FieldError&) {
                continue;
            }
        }
        CHECK(done >= 6);
    }
    // perturbing a single lambda or alpha changes the tuple
    {
        auto [f, g] = diag_pair({GaussQ(1), GaussQ(2)}, K, {GaussQ(1), GaussQ(1, 2)});
        auto base = q_normal_form(f, g);
        auto [f2, g2] = diag_pair({GaussQ(1), GaussQ(3)}, K, {GaussQ(1), GaussQ(1, 2)});
        CHECK(!(base == q_normal_form(f2, g2)));
        auto [f3, g3] = diag_pair({GaussQ(1), GaussQ(2)}, K, {GaussQ(1), GaussQ(1, 3)});
        CHECK(!(base == q_normal_form(f3, g3)));
    }
    // vanishing alpha: not Q-generic
    {
        auto [f, g] = diag_pair({GaussQ(1), GaussQ(2)}, K, {GaussQ(1), GaussQ(0)});
        CHECK_THROWS_AS((void)q_normal_form(f, g), NotGeneric);
    }
}

TEST_CASE("Euler-type identity for separable pairs") {
    Rng rng(11);
    int K = 8;
    for (int it = 0; it < 20; ++it) {
        int n = 2 + (it % 2);
        J f = sum_of_squares(n, K);
        J g(n, K);
        for (int i = 0; i < n; ++i) {
            g.add_term(Monomial::var(i, n, 2), GaussQ(i + 1));
            g.add_term(Monomial::var(i, n, 3), rand_gauss(rng, false));
            g.add_term(Monomial::var(i, n, 4), rand_gauss(rng));
        }
        CHECK(euler_identity_holds(f, g));
    }
}

TEST_CASE("conjugate_quotient: spec examples") {
    int K = 6;
    auto [f, g] = diag_pair({GaussQ(1), GaussQ(2)}, K, {GaussQ(1), GaussQ(1, 2)});
    // identical pairs
    {
        auto phi = conjugate_quotient(f, g, f, g);
        CHECK((phi.apply(g) * f) == (g * phi.apply(f)));
    }
    // g1 = g0 + quartic in <f, g> m^4
    {
        J delta = (f * jet_of_terms(2, K, {{{2, 2}, GaussQ(1, 3)}})).truncated(K);
        J g1 = g + delta;
        auto phi = conjugate_quotient(f, g, f, g1);
        Jet<GaussQ> lhs = (phi.apply(g) * f).truncated(K);
        Jet<GaussQ> rhs = (g1 * phi.apply(f)).truncated(K);
        CHECK(lhs == rhs);
    }
    // alpha_1 = 0: not Q-generic
    {
        auto [f2, g2] = diag_pair({GaussQ(1), GaussQ(2)}, K, {GaussQ(0), GaussQ(1)});
        CHECK_THROWS_AS((void)conjugate_quotient(f2, g2, f2, g2), NotGeneric);
    }
    // 3-jet mismatch
    {
        auto [f3, g3] = diag_pair({GaussQ(1), GaussQ(2)}, K, {GaussQ(1), GaussQ(1)});
        CHECK_THROWS_AS((void)conjugate_quotient(f, g, f3, g3), HypothesisFailed);
    }
}

TEST_CASE("cone_restriction_form: spec examples and invariance") {
    int K = 6;
    auto [f, g] = diag_pair({GaussQ(1), GaussQ(2), GaussQ(3)}, K);
    auto mu = cone_restriction_form(f, g);
    CHECK(mu == std::vector<GaussQ>{GaussQ(-2), GaussQ(-1)});
    // g + c f leaves the cone restriction unchanged
    Rng rng(5);
    for (int it = 0; it < 20; ++it) {
        GaussQ c = rand_gauss(rng, false);
        J g2 = g + f.scaled(c);
        try {
            auto got = cone_restriction_form(f, g2);
            CHECK(got == mu);
        } catch (const NotGeneric&) {
            // c may collapse two eigenvalues; that leaves the generic stratum
        } catch (const NotMorse&) {
            // c = -lambda_i makes g degenerate; also off-stratum
        }
        J g3 = g + rand_jet(rng, 3, K, 3, 3, 2);
        CHECK(cone_restriction_form(f, g3) == mu);
    }
}

TEST_CASE("fold_normalize: spec examples") {
    int K = 8;
    // (x, x^3 + y^2): already normal
    {
        J f = jet_of_terms(2, K, {{{1, 0}, GaussQ(1)}});
        J g = jet_of_terms(2, K, {{{3, 0}, GaussQ(1)}, {{0, 2}, GaussQ(1)}});
        auto nf = fold_normalize(f, g);
        CHECK(nf.phi1 == jet_of_terms(1, K, {{{3}, GaussQ(1)}}));
        CHECK(nf.chart == DiffeoJet<GaussQ>::identity(2, K));
        CHECK(!nf.g_regular);
    }
    // (x, x^2 + y^2 + x y^2): phi = s^2, chart of the (1+x)^{1/2} kind
    {
        J f = jet_of_terms(2, K, {{{1, 0}, GaussQ(1)}});
        J g = jet_of_terms(2, K, {{{2, 0}, GaussQ(1)}, {{0, 2}, GaussQ(1)}, {{1, 2}, GaussQ(1)}});
        auto nf = fold_normalize(f, g);
        CHECK(nf.phi1 == jet_of_terms(1, K, {{{2}, GaussQ(1)}}));
        CHECK(nf.chart.component(1).coeff(Monomial({0, 1})) == GaussQ(1));
        CHECK(nf.chart.component(1).coeff(Monomial({1, 1})) == GaussQ(-1, 2));
        CHECK(nf.chart.apply(g) ==
              jet_of_terms(2, K, {{{2, 0}, GaussQ(1)}, {{0, 2}, GaussQ(1)}}));
    }
    // (x, x^2 + y^3): tangency ideal <y^2> is not reduced
    {
        J f = jet_of_terms(2, K, {{{1, 0}, GaussQ(1)}});
        J g = jet_of_terms(2, K, {{{2, 0}, GaussQ(1)}, {{0, 3}, GaussQ(1)}});
        CHECK_THROWS_AS((void)fold_normalize(f, g), NotAFold);
    }
    // regular g reports the foliation normal form
    {
        J f = jet_of_terms(2, K, {{{1, 0}, GaussQ(1)}});
        J g = jet_of_terms(2, K, {{{1, 0}, GaussQ(1)}, {{2, 0}, GaussQ(1)}, {{0, 2}, GaussQ(1)}});
        auto nf = fold_normalize(f, g);
        CHECK(nf.g_regular);
    }
}

TEST_CASE("fold_normalize: round-trip recovery of a planted phi") {
    Rng rng(808);
    int K = 8;
    for (int it = 0; it < 10; ++it) {
        int n = 2 + (it % 2);
        // plant phi with valuation >= 2
        J phi1 = jet_of_terms(1, K, {{{2}, rand_gauss(rng, false)}});
        while (phi1.valuation() != 2)
            phi1 = jet_of_terms(1, K, {{{2}, rand_gauss(rng, false)}});
        phi1 += rand_jet(rng, 1, K, 3, K, 3);
        J f(n, K);
        f.add_term(Monomial::var(0, n), GaussQ(1));
        J g(n, K);
        for (auto& [mo, c] : phi1.terms()) g.add_term(Monomial::var(0, n, mo[0]), c);
        for (int i = 1; i < n; ++i) g.add_term(Monomial::var(i, n, 2), GaussQ(1));
        auto psi = rand_diffeo(rng, n, K);
        auto nf = fold_normalize(psi.apply(f), psi.apply(g));
        CHECK(nf.phi1 == phi1);
    }
}

TEST_CASE("genericity_class: flags and witnesses") {
    int K = 8;
    auto [f, g] = diag_pair({GaussQ(1), GaussQ(2)}, K, {GaussQ(1), GaussQ(1)});
    auto rep = genericity_class(f, g);
    CHECK(rep.r_generic);
    CHECK(rep.q_generic);
    CHECK(rep.f_generic);
    CHECK(rep.a_generic);

    // alpha_2 = 0: Q fails with a witness
    auto [f2, g2] = diag_pair({GaussQ(1), GaussQ(2)}, K, {GaussQ(1), GaussQ(0)});
    auto rep2 = genericity_class(f2, g2);
    CHECK(rep2.r_generic);
    CHECK(!rep2.q_generic);
    CHECK(rep2.witness.find("alpha_2") != std::string::npos);

    // repeated lambda: R fails (and so Q)
    auto [f3, g3] = diag_pair({GaussQ(1), GaussQ(1)}, K);
    auto rep3 = genericity_class(f3, g3);
    CHECK(!rep3.r_generic);
    CHECK(!rep3.q_generic);

    // flags invariant under random linear changes of coordinates
    Rng rng(13);
    for (int it = 0; it < 8; ++it) {
        auto psi = rand_diffeo(rng, 2, K);
        auto repP = genericity_class(psi.apply(f), psi.apply(g));
        CHECK(repP.r_generic == rep.r_generic);
        CHECK(repP.q_generic == rep.q_generic);
    }
}
