#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "germ/diffeo.hpp"
#include "germ/jet.hpp"
#include "germ/series.hpp"

#include "support.hpp"

using namespace germ;
using namespace germ::testsupport;

using J = Jet<GaussQ>;

TEST_CASE("rational and Gaussian rational basics") {
    Rat a(2, 3), b(1, 6);
    CHECK(a + b == Rat(5, 6));
    CHECK((a * b).str() == "1/9");
    CHECK(Rat(4, 9).sqrt().value() == Rat(2, 3));
    CHECK(!Rat(2).sqrt().has_value());
    CHECK(Rat(-8).kth_root(3).value() == Rat(-2));

    GaussQ z(Rat(3), Rat(4));
    CHECK(z * z.conj() == GaussQ(Rat(25)));
    CHECK(z / z == GaussQ(1));
    // sqrt(-1) = i, sqrt(2i) = 1+i
    CHECK(GaussQ(Rat(-1)).sqrt().value() == GaussQ::i_unit());
    CHECK(GaussQ(Rat(0), Rat(2)).sqrt().value() == GaussQ(Rat(1), Rat(1)));
    CHECK(!GaussQ(Rat(2)).sqrt().has_value());
}

TEST_CASE("jet arithmetic: spec examples") {
    // (1+x)(1-x) = 1-x^2 at K=3
    J one = J::constant(GaussQ(1), 1, 3);
    J x = J::variable(0, 1, 3);
    J lhs = (one + x) * (one - x);
    J expect = one - x * x;
    CHECK(lhs == expect);

    // f + 0 = f
    J f = jet_of_terms(2, 4, {{{2, 0}, GaussQ(1)}, {{1, 1}, GaussQ(3, 2)}});
    CHECK(f + J::zero(2, 4) == f);

    // (x+y)^2 = x^2 + 2xy + y^2 at K=2
    J xy = J::variable(0, 2, 2) + J::variable(1, 2, 2);
    J sq = xy * xy;
    CHECK(sq == jet_of_terms(2, 2, {{{2, 0}, GaussQ(1)}, {{1, 1}, GaussQ(2)}, {{0, 2}, GaussQ(1)}}));

    // mixed orders truncate to the minimum
    J g5 = J::variable(0, 5, 1).extended(5);
    CHECK((f.extended(4) + J::zero(2, 6)).order() == 4);
    (void)g5;

    // variable-count mismatch is an error
    CHECK_THROWS_AS((void)(f + J::zero(3, 4)), InputError);
}

TEST_CASE("jet compose: spec examples") {
    // F = x^2, subst x <- x+y
    J F = jet_of_terms(1, 2, {{{2}, GaussQ(1)}});
    J sub = J::variable(0, 2, 2) + J::variable(1, 2, 2);
    CHECK(F.compose({sub}) ==
          jet_of_terms(2, 2, {{{2, 0}, GaussQ(1)}, {{1, 1}, GaussQ(2)}, {{0, 2}, GaussQ(1)}}));

    // F o identity = F
    J G = jet_of_terms(2, 5, {{{2, 1}, GaussQ(5, 3)}, {{0, 2}, GaussQ(-1)}});
    auto id = DiffeoJet<GaussQ>::identity(2, 5);
    CHECK(id.apply(G) == G);

    // nonzero constant term rejected
    J bad = J::constant(GaussQ(1), 2, 5);
    CHECK_THROWS_AS((void)G.compose({bad, bad}), InputError);
}

TEST_CASE("ring axioms: property test over random jets") {
    Rng rng(12345);
    for (int it = 0; it < 1100; ++it) {
        int n = 1 + (it % 3);
        int K = 3 + (it % 2);
        J a = rand_jet(rng, n, K), b = rand_jet(rng, n, K), c = rand_jet(rng, n, K);
        CHECK(a + b == b + a);
        CHECK((a + b) + c == a + (b + c));
        CHECK(a * b == b * a);
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * (b + c) == a * b + a * c);
    }
}

TEST_CASE("compose associativity: (F o phi) o psi == F o (phi o psi)") {
    Rng rng(777);
    for (int it = 0; it < 60; ++it) {
        int n = 2 + (it % 2);
        int K = 5;
        J F = rand_jet(rng, n, K);
        auto phi = rand_diffeo(rng, n, K);
        auto psi = rand_diffeo(rng, n, K);
        J lhs = psi.apply(phi.apply(F));
        J rhs = phi.then_after(psi).apply(F);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("invert_diffeo: spec examples and round trips") {
    // identity -> identity
    auto id = DiffeoJet<GaussQ>::identity(2, 6);
    CHECK(id.inverse_diffeo() == id);

    // (2x, 3y) -> (x/2, y/3)
    Matrix<GaussQ> d(2, 2);
    d(0, 0) = GaussQ(2);
    d(1, 1) = GaussQ(3);
    auto lin = DiffeoJet<GaussQ>::from_linear(d, 6);
    auto lininv = lin.inverse_diffeo();
    CHECK(lininv.component(0) == J::variable(0, 2, 6).scaled(GaussQ(1, 2)));
    CHECK(lininv.component(1) == J::variable(1, 2, 6).scaled(GaussQ(1, 3)));

    // (x + y^2, y) -> (x - y^2, y)
    J c0 = J::variable(0, 2, 6) + J::variable(1, 2, 6) * J::variable(1, 2, 6);
    J c1 = J::variable(1, 2, 6);
    DiffeoJet<GaussQ> phi({c0, c1});
    auto inv = phi.inverse_diffeo();
    J e0 = J::variable(0, 2, 6) - J::variable(1, 2, 6) * J::variable(1, 2, 6);
    CHECK(inv.component(0) == e0);
    CHECK(inv.component(1) == c1);

    // random round trips (the inverse ctor self-checks, so survival is the test)
    Rng rng(4242);
    for (int it = 0; it < 40; ++it) {
        auto psi = rand_diffeo(rng, 2 + (it % 2), 5);
        auto psinv = psi.inverse_diffeo();
        CHECK(psi.then_after(psinv) == DiffeoJet<GaussQ>::identity(psi.nvars(), 5));
    }

    // singular linear part
    Matrix<GaussQ> sing(2, 2);
    sing(0, 0) = GaussQ(1);
    CHECK_THROWS_AS(DiffeoJet<GaussQ>::from_linear(sing, 4), Error);
}

TEST_CASE("solve_implicit: spec examples") {
    // F = 2u + u^2 - 2xy  ->  u = xy - x^2 y^2 / 2 + ...
    {
        int K = 8;
        J u = J::variable(2, 3, K);
        J x = J::variable(0, 3, K), y = J::variable(1, 3, K);
        J F = u.scaled(GaussQ(2)) + u * u - (x * y).scaled(GaussQ(2));
        J sol = solve_implicit(F);
        CHECK(sol.coeff(Monomial({1, 1})) == GaussQ(1));
        CHECK(sol.coeff(Monomial({2, 2})) == GaussQ(-1, 2));
        // back-substitution oracle
        std::vector<J> sub{J::variable(0, 2, K), J::variable(1, 2, K), sol};
        CHECK(F.compose(sub).is_zero());
    }
    // F = u - x -> u = x
    {
        J u = J::variable(1, 2, 5), x = J::variable(0, 2, 5);
        CHECK(solve_implicit(u - x) == J::variable(0, 1, 5));
    }
    // F = 3u + 3u^2 + u^3 - x^3 -> u = x^3/3 - x^6/9 + ... (cube-root series)
    {
        int K = 9;
        J u = J::variable(1, 2, K), x = J::variable(0, 2, K);
        J F = u.scaled(GaussQ(3)) + (u * u).scaled(GaussQ(3)) + u * u * u - x * x * x;
        J sol = solve_implicit(F);
        CHECK(sol.coeff(Monomial({3})) == GaussQ(1, 3));
        CHECK(sol.coeff(Monomial({6})) == GaussQ(-1, 9));
        std::vector<J> sub{J::variable(0, 1, K), sol};
        CHECK(F.compose(sub).is_zero());
    }
    // degenerate dF/du
    {
        J u = J::variable(1, 2, 4), x = J::variable(0, 2, 4);
        CHECK_THROWS_AS((void)solve_implicit(u * u - x), Error);
    }
}

TEST_CASE("solve_implicit: back-substitution property on random instances") {
    Rng rng(99);
    for (int it = 0; it < 50; ++it) {
        int m = 1 + (it % 2), K = 6;
        int n = m + 1;
        // F = c u + (terms of degree >= 1 in x, degree >= 0 in u), F(0) = 0
        J F = J::variable(n - 1, n, K).scaled(GaussQ(1 + (it % 3)));
        J noise = rand_jet(rng, n, K, 1, K, 5);
        // keep dF/du(0) fixed: drop constant and pure-u-linear noise
        noise.set_term(Monomial(n), GaussQ());
        noise.set_term(Monomial::var(n - 1, n), GaussQ());
        F += noise;
        J sol = solve_implicit(F);
        std::vector<J> sub;
        for (int i = 0; i < m; ++i) sub.push_back(J::variable(i, m, K));
        sub.push_back(sol);
        CHECK(F.compose(sub).is_zero());
        CHECK(sol.valuation() >= 1);
    }
}

TEST_CASE("invert_scalar_jet: spec examples") {
    // v = 2t -> t/2
    J v = var1<GaussQ>(6).scaled(GaussQ(2));
    CHECK(invert_scalar_jet(v) == var1<GaussQ>(6).scaled(GaussQ(1, 2)));

    // v = t -> t
    CHECK(invert_scalar_jet(var1<GaussQ>(6)) == var1<GaussQ>(6));

    // v = t + t^2 -> t - t^2 + 2t^3 - 5t^4 + 14t^5 (signed Catalan numbers)
    J t = var1<GaussQ>(6);
    J w = invert_scalar_jet(t + t * t);
    CHECK(coeff1(w, 1) == GaussQ(1));
    CHECK(coeff1(w, 2) == GaussQ(-1));
    CHECK(coeff1(w, 3) == GaussQ(2));
    CHECK(coeff1(w, 4) == GaussQ(-5));
    CHECK(coeff1(w, 5) == GaussQ(14));
    CHECK((t + t * t).compose(std::vector<J>{w}) == t);

    // zero linear coefficient
    CHECK_THROWS_AS((void)invert_scalar_jet(t * t), Error);
}

TEST_CASE("unit jet inverse and roots") {
    Rng rng(55);
    for (int it = 0; it < 30; ++it) {
        J u = J::constant(GaussQ(1), 2, 6) + rand_jet(rng, 2, 6, 1, 6, 4);
        J inv = u.inverse();
        CHECK(u * inv == J::constant(GaussQ(1), 2, 6));
        J s = u.kth_root_with(GaussQ(1), 2);
        CHECK(s * s == u);
        J c = u.kth_root_with(GaussQ(1), 3);
        CHECK(c * c * c == u);
    }
}

TEST_CASE("float mode basics") {
    using JF = Jet<FloatC>;
    JF x = JF::variable(0, 2, 4), y = JF::variable(1, 2, 4);
    JF f = x * x + y * y.scaled(FloatC(2.0));
    auto one = JF::constant(FloatC(1.0), 2, 4);
    CHECK((f + one) * (f + one) == f * f + f.scaled(FloatC(2.0)) + one);
    FloatC a(1.0), b(1.0 + 1e-13);
    CHECK(a == b); // tolerance-mediated equality
}
