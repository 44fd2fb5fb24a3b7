#pragma once

#include <string>
#include <vector>

#include "germ/invariants.hpp"

namespace germ {

// Stratification flags with witnesses.  A-genericity coincides with
// R-genericity for pairs of Morse functions; both flags are kept for
// reporting clarity.
template <class C>
struct GenericityReport {
    bool r_generic = false;
    bool q_generic = false;
    bool f_generic = false;
    bool a_generic = false;
    std::vector<C> lambda;
    std::vector<C> alpha;
    std::string witness; // filled on failures
};

template <class C>
GenericityReport<C> genericity_class(const Jet<C>& f, const Jet<C>& g) {
    using Tr = scalar_traits<C>;
    GenericityReport<C> rep;
    NormalizedPair<C> np;
    try {
        np = normalize_pair(f, g);
    } catch (const NotDiagonalizable& e) {
        rep.witness = e.what();
        return rep;
    } catch (const NotGeneric& e) {
        rep.witness = e.what();
        return rep;
    }
    rep.r_generic = true;
    rep.f_generic = true;
    rep.a_generic = true;
    rep.lambda = np.lambda;
    int n = f.nvars();
    rep.q_generic = true;
    for (int j = 0; j < n; ++j) {
        auto axis = CurveJet<C>::axis(j, n, f.order());
        C a = restrict_to_curve(np.g, axis).coeff(Monomial({3}));
        rep.alpha.push_back(a);
        if (Tr::is_zero(a)) {
            rep.q_generic = false;
            if (!rep.witness.empty()) rep.witness += "; ";
            rep.witness += "alpha_" + std::to_string(j + 1) + " = 0";
        }
    }
    return rep;
}

} // namespace germ
