#pragma once

#include <vector>

#include "germ/invariants.hpp"

namespace germ {

// Image of a tangency curve under (f, g): a parametrized plane curve germ
// considered up to right reparametrization.
template <class C>
struct SigmaCurve {
    CurveJet<C> curve; // two components (f|_T, g|_T)
    int multiplicity = 0;
};

template <class C>
int sigma_multiplicity(const CurveJet<C>& c) {
    if (c.nvars() != 2) throw InputError("sigma_multiplicity: expects a plane curve");
    return c.valuation();
}

template <class C>
std::vector<SigmaCurve<C>> sigma_curves(const Jet<C>& f, const Jet<C>& g) {
    auto np = normalize_pair(f, g);
    int n = f.nvars(), K = f.order();
    std::vector<SigmaCurve<C>> out;
    for (int j = 0; j < n; ++j) {
        auto axis = CurveJet<C>::axis(j, n, K);
        CurveJet<C> img(std::vector<Jet<C>>{restrict_to_curve(np.f, axis),
                                            restrict_to_curve(np.g, axis)});
        SigmaCurve<C> sc;
        sc.multiplicity = sigma_multiplicity(img);
        sc.curve = std::move(img);
        out.push_back(std::move(sc));
    }
    return out;
}

namespace detail {

// Linear stage of the plane-diffeo matching: 2x2 L with L (1, l0_i)
// parallel to (1, l1_{pi(i)}) for all i.  The conditions are linear in L.
template <class C>
std::vector<Matrix<C>> cone_matching_linear(const std::vector<C>& l0,
                                            const std::vector<C>& l1) {
    using Tr = scalar_traits<C>;
    int n = (int)l0.size();
    Matrix<C> A(n, 4);
    for (int i = 0; i < n; ++i) {
        A(i, 0) = l1[(size_t)i];
        A(i, 1) = l0[(size_t)i] * l1[(size_t)i];
        A(i, 2) = -Tr::one();
        A(i, 3) = -l0[(size_t)i];
    }
    auto ker = kernel_basis(A);
    std::vector<Matrix<C>> out;
    auto to_mat = [](const std::vector<C>& v) {
        Matrix<C> m(2, 2);
        m(0, 0) = v[0];
        m(0, 1) = v[1];
        m(1, 0) = v[2];
        m(1, 1) = v[3];
        return m;
    };
    for (auto& v : ker) {
        Matrix<C> m = to_mat(v);
        if (inverse(m)) out.push_back(m);
    }
    // kernel combinations can be invertible even when the basis vectors are not
    if (out.empty() && ker.size() >= 2) {
        for (size_t a = 0; a < ker.size(); ++a)
            for (size_t b = a + 1; b < ker.size(); ++b) {
                std::vector<C> v = ker[a];
                for (size_t k = 0; k < 4; ++k) v[k] += ker[b][k];
                Matrix<C> m = to_mat(v);
                if (inverse(m)) out.push_back(m);
            }
    }
    return out;
}

// Extend the linear stage to a jet of a plane diffeomorphism matching the
// two curve families up to reparametrizations: Gauss-Newton over all psi and
// rho coefficients jointly, with exact derivatives.  The joint solve lets a
// later obstruction feed back into the lower-degree choices.
template <class C>
std::optional<std::pair<DiffeoJet<C>, std::vector<Jet<C>>>> match_curve_families(
    const Matrix<C>& L, const std::vector<CurveJet<C>>& s0,
    const std::vector<CurveJet<C>>& s1, const std::vector<C>& rho1, int K,
    std::string* why) {
    using Tr = scalar_traits<C>;
    int n = (int)s0.size();
    std::vector<Jet<C>> psi;
    for (int c = 0; c < 2; ++c) {
        Jet<C> comp(2, K);
        comp.add_term(Monomial({1, 0}), L(c, 0));
        comp.add_term(Monomial({0, 1}), L(c, 1));
        psi.push_back(std::move(comp));
    }
    std::vector<Jet<C>> rho;
    for (int i = 0; i < n; ++i) rho.push_back(var1<C>(K).scaled(rho1[(size_t)i]));
    std::vector<Jet<C>> ds1; // derivatives of the target components
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < 2; ++c)
            ds1.push_back(s1[(size_t)i].component(c).derivative(0).extended(K));

    auto resid = [&](int i, int c) {
        return psi[(size_t)c].compose(s0[(size_t)i].components()) -
               s1[(size_t)i].component(c).compose(std::vector<Jet<C>>{rho[(size_t)i]});
    };

    struct Unknown {
        bool is_psi;
        int comp; // psi: component; rho: curve index
        Monomial mono{0};
        int rho_deg = 0;
    };
    std::vector<Unknown> unknowns;
    for (int d = 2; 2 * d <= K; ++d)
        for (int c = 0; c < 2; ++c)
            for (auto& mu : monomials_of_degree(2, d)) unknowns.push_back({true, c, mu, 0});
    for (int i = 0; i < n; ++i)
        for (int k = 2; k < K; ++k) unknowns.push_back({false, i, Monomial({0}), k});

    std::vector<std::pair<int, int>> eqidx;
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < 2; ++c) eqidx.emplace_back(i, c);
    std::vector<int> degs;
    for (int m = 3; m <= K; ++m) degs.push_back(m);

    int rows = (int)(eqidx.size() * degs.size());
    // Jacobian at the seed, factored once; the update iteration keeps it
    // frozen (Hensel style) so exact coefficients stay tame.
    Matrix<C> A(rows, (int)unknowns.size());
    for (size_t u = 0; u < unknowns.size(); ++u) {
        auto& un = unknowns[u];
        if (un.is_psi) {
            // d/d(coeff) psi_c(sigma0_i) = mono(sigma0_i)
            for (size_t e = 0; e < eqidx.size(); ++e) {
                auto [i, c] = eqidx[e];
                if (c != un.comp) continue;
                Jet<C> mono_jet(2, K);
                mono_jet.add_term(un.mono, Tr::one());
                Jet<C> dcol = mono_jet.compose(s0[(size_t)i].components());
                for (size_t dm = 0; dm < degs.size(); ++dm)
                    A((int)(e * degs.size() + dm), (int)u) = dcol.coeff(Monomial({degs[dm]}));
            }
        } else {
            // d/d(coeff) sigma1_c(rho_i) = sigma1_c'(rho_i) t^k at the seed
            int i = un.comp;
            for (int c = 0; c < 2; ++c) {
                size_t e = (size_t)(i * 2 + c);
                Jet<C> dcol = ds1[(size_t)(i * 2 + c)].compose(
                                  std::vector<Jet<C>>{rho[(size_t)i]}) *
                              jet_of_monomial<C>(un.rho_deg, K);
                for (size_t dm = 0; dm < degs.size(); ++dm)
                    A((int)(e * degs.size() + dm), (int)u) = -dcol.coeff(Monomial({degs[dm]}));
            }
        }
    }
    // Degree-windowed Hensel iteration with the Jacobian frozen at the seed:
    // rows up to the target degree are solved jointly so later obstructions
    // feed back into the earlier underdetermined choices.
    for (int target = 3; target <= K; ++target) {
        int subrows = (int)eqidx.size() * (target - 2);
        Matrix<C> sub(subrows, (int)unknowns.size());
        for (size_t e = 0; e < eqidx.size(); ++e)
            for (int dm = 0; dm < target - 2; ++dm)
                for (size_t u = 0; u < unknowns.size(); ++u)
                    sub((int)(e * (size_t)(target - 2) + (size_t)dm), (int)u) =
                        A((int)(e * degs.size() + (size_t)dm), (int)u);
        FrozenLeastNorm<C> solver(std::move(sub));
        int guard = 0;
        while (true) {
            std::vector<Jet<C>> res;
            int val = target + 1;
            for (auto& [i, c] : eqidx) {
                res.push_back(resid(i, c));
                Jet<C> low = res.back().truncated(target);
                if (!low.is_zero()) val = std::min(val, low.valuation());
            }
            if (val > target) break; // window cleared
            if (++guard > target + 2) {
                if (why) *why = "curve matching stalled at degree " + std::to_string(val);
                return std::nullopt;
            }
            std::vector<C> b((size_t)subrows, Tr::zero());
            for (size_t e = 0; e < eqidx.size(); ++e)
                for (int dm = 0; dm < target - 2; ++dm)
                    b[e * (size_t)(target - 2) + (size_t)dm] =
                        -res[e].coeff(Monomial({degs[(size_t)dm]}));
            auto dx = solver.solve(b);
            if (!dx) {
                if (why) *why = "curve matching obstructed at degree " + std::to_string(val);
                return std::nullopt;
            }
            for (size_t u = 0; u < unknowns.size(); ++u) {
                if (Tr::is_zero((*dx)[u])) continue;
                auto& un = unknowns[u];
                if (un.is_psi)
                    psi[(size_t)un.comp].add_term(un.mono, (*dx)[u]);
                else
                    rho[(size_t)un.comp] += jet_of_monomial<C>(un.rho_deg, K).scaled((*dx)[u]);
            }
        }
    }
    (void)rows;
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < 2; ++c)
            if (!resid(i, c).is_zero()) {
                if (why) *why = "curve matching residual at final verification";
                return std::nullopt;
            }
    return std::make_pair(DiffeoJet<C>(psi), rho);
}

} // namespace detail

// A-equivalence: a source diffeo and a plane target diffeo with
// psi o (f0, g0) o phi = (f1, g1) through the order.  The search enumerates
// tangent-cone matchings and extends each degree by degree.
template <class C>
Decision<std::pair<DiffeoJet<C>, DiffeoJet<C>>> a_equivalent(const Jet<C>& f0, const Jet<C>& g0,
                                                             const Jet<C>& f1, const Jet<C>& g1) {
    using Tr = scalar_traits<C>;
    int n = f0.nvars(), K = f0.order();
    auto np0 = normalize_pair(f0, g0);
    auto np1 = normalize_pair(f1, g1);
    std::string last = "no tangent-cone matching extends";
    // sigma data of the normalized pairs
    std::vector<CurveJet<C>> s0, s1base;
    for (int j = 0; j < n; ++j) {
        auto axis = CurveJet<C>::axis(j, n, K);
        s0.push_back(CurveJet<C>(std::vector<Jet<C>>{restrict_to_curve(np0.f, axis),
                                                     restrict_to_curve(np0.g, axis)}));
        s1base.push_back(CurveJet<C>(std::vector<Jet<C>>{restrict_to_curve(np1.f, axis),
                                                         restrict_to_curve(np1.g, axis)}));
        if (s0.back().valuation() != 2 || s1base.back().valuation() != 2)
            return {std::nullopt, "sigma-multiplicities differ from 2"};
    }
    std::vector<size_t> perm((size_t)n);
    for (size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    bool field_blocked = false;
    do {
        std::vector<CurveJet<C>> s1;
        std::vector<C> l1;
        for (int i = 0; i < n; ++i) {
            s1.push_back(s1base[perm[(size_t)i]]);
            l1.push_back(np1.lambda[perm[(size_t)i]]);
        }
        auto lins = detail::cone_matching_linear(np0.lambda, l1);
        if (lins.empty()) {
            last = "tangent cones unmatchable at linear degree (cross-ratio obstruction)";
            continue;
        }
        for (auto& L : lins) {
            // rho'(0)^2 from the degree-2 coefficients (the first component of
            // the normalized sigma-curves is exactly t^2)
            std::vector<C> rho1;
            bool ok = true;
            for (int i = 0; i < n && ok; ++i) {
                C mu = L(0, 0) + L(0, 1) * np0.lambda[(size_t)i];
                auto r = Tr::sqrt(mu);
                if (!r) {
                    field_blocked = true;
                    ok = false;
                    break;
                }
                rho1.push_back(*r);
            }
            if (!ok) continue;
            // sign choices for each rho'(0)
            for (unsigned mask = 0; mask < (1u << n); ++mask) {
                std::vector<C> r1 = rho1;
                for (int i = 0; i < n; ++i)
                    if (mask & (1u << i)) r1[(size_t)i] = -r1[(size_t)i];
                std::string why;
                auto match = detail::match_curve_families(L, s0, s1, r1, K, &why);
                if (!match) {
                    if (!why.empty()) last = why;
                    continue;
                }
                DiffeoJet<C>& psi = match->first;
                // adjusted pair: psi o (normalized pair 0)
                Jet<C> ftil = psi.component(0).compose(std::vector<Jet<C>>{np0.f, np0.g});
                Jet<C> gtil = psi.component(1).compose(std::vector<Jet<C>>{np0.f, np0.g});
                Decision<DiffeoJet<C>> dec{std::nullopt, ""};
                try {
                    dec = r_equivalent(ftil, gtil, np1.f, np1.g);
                } catch (const Error&) {
                    last = "source-side conjugation failed after target matching";
                    continue;
                }
                if (!dec.witness) {
                    last = "restrictions differ after target matching: " + dec.reason;
                    continue;
                }
                DiffeoJet<C> phi = np0.phi.then_after(*dec.witness)
                                       .then_after(np1.phi.inverse_diffeo());
                // final verification on the original pairs
                Jet<C> c0 = psi.component(0).compose(std::vector<Jet<C>>{phi.apply(f0), phi.apply(g0)});
                Jet<C> c1 = psi.component(1).compose(std::vector<Jet<C>>{phi.apply(f0), phi.apply(g0)});
                if (!(c0 == f1) || !(c1 == g1))
                    throw Error("a_equivalent: assembled conjugacy failed verification");
                return {std::make_pair(phi, psi), ""};
            }
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (field_blocked)
        throw FieldError("a_equivalent: a reparametrization square root left the field "
                         "before any matching succeeded; use float mode");
    return {std::nullopt, last};
}

} // namespace germ
