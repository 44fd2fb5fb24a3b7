#pragma once

#include <complex>
#include <vector>

#include "germ/poly.hpp"

namespace germ {

// Durand-Kerner simultaneous root iteration on complex doubles.  Inputs are
// assumed square-free (callers split off repeated factors first).
inline std::vector<std::complex<double>> durand_kerner(std::vector<std::complex<double>> c) {
    using CD = std::complex<double>;
    while (c.size() > 1 && std::abs(c.back()) == 0.0) c.pop_back();
    int n = (int)c.size() - 1;
    std::vector<CD> r;
    if (n <= 0) return r;
    CD lead = c.back();
    for (auto& x : c) x /= lead;
    r.resize((size_t)n);
    CD seed(0.4, 0.9);
    CD p(1.0, 0.0);
    for (int i = 0; i < n; ++i) {
        p *= seed;
        r[(size_t)i] = p;
    }
    auto eval = [&](CD x) {
        CD acc = 0.0;
        for (size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
        return acc;
    };
    for (int it = 0; it < 500; ++it) {
        double delta = 0.0;
        for (int i = 0; i < n; ++i) {
            CD num = eval(r[(size_t)i]);
            CD den(1.0, 0.0);
            for (int j = 0; j < n; ++j)
                if (j != i) den *= (r[(size_t)i] - r[(size_t)j]);
            if (std::abs(den) == 0.0) den = CD(1e-30, 0);
            CD step = num / den;
            r[(size_t)i] -= step;
            delta = std::max(delta, std::abs(step));
        }
        if (delta < 1e-14) break;
    }
    return r;
}

template <class C>
std::vector<std::complex<double>> to_complex_coeffs(const Poly<C>& p) {
    std::vector<std::complex<double>> c;
    for (auto& x : p.coeffs()) c.push_back(scalar_traits<C>::to_complex(x));
    return c;
}

struct RootMult {
    GaussQ value;
    int multiplicity;
};

// All roots of p in Q(i), with multiplicity, verified exactly; fails with a
// FieldError if any root is not representable (irrational eigenvalue, or a
// denominator beyond the reconstruction bound -- float mode handles those).
inline std::vector<RootMult> exact_roots(const Poly<GaussQ>& p) {
    if (p.degree() <= 0) return {};
    Poly<GaussQ> sf = p;
    // Square-free part: p / gcd(p, p').
    Poly<GaussQ> g = Poly<GaussQ>::gcd(p, p.derivative());
    if (g.degree() > 0) sf = p.divmod(g).first;
    auto approx = durand_kerner(to_complex_coeffs(sf));
    std::vector<RootMult> out;
    Poly<GaussQ> rem = p;
    for (auto z : approx) {
        auto re = Rat::reconstruct(std::abs(z.real()) < 1e-12 ? 0.0 : z.real());
        auto im = Rat::reconstruct(std::abs(z.imag()) < 1e-12 ? 0.0 : z.imag());
        bool ok = false;
        GaussQ root;
        if (re && im) {
            root = GaussQ(*re, *im);
            ok = p.eval(root).is_zero();
        }
        if (!ok)
            throw FieldError("eigenvalue/root not representable in Q(i) "
                             "(use float mode): approx " + std::to_string(z.real()) +
                             (z.imag() >= 0 ? "+" : "") + std::to_string(z.imag()) + "i");
        bool seen = false;
        for (auto& rm : out)
            if (rm.value == root) { seen = true; break; }
        if (seen) continue;
        // multiplicity by exact deflation
        int mult = 0;
        Poly<GaussQ> lin(std::vector<GaussQ>{-root, GaussQ(1)});
        while (true) {
            auto [q, r] = rem.divmod(lin);
            if (!r.is_zero()) break;
            rem = q;
            ++mult;
        }
        if (mult == 0)
            throw FieldError("root verification failed during deflation");
        out.push_back({root, mult});
    }
    if (rem.degree() > 0)
        throw FieldError("characteristic polynomial does not split over Q(i)");
    return out;
}

struct RootMultF {
    FloatC value;
    int multiplicity;
};

// Float-mode roots with tolerance clustering for multiplicities.
inline std::vector<RootMultF> float_roots(const Poly<FloatC>& p) {
    auto zs = durand_kerner(to_complex_coeffs(p));
    std::vector<RootMultF> out;
    double tol = std::max(1e-7, float_tolerance());
    for (auto z : zs) {
        bool merged = false;
        for (auto& rm : out) {
            if (std::abs(rm.value.v - z) < tol * std::max(1.0, std::abs(z))) {
                rm.value.v = (rm.value.v * (double)rm.multiplicity + z) / (double)(rm.multiplicity + 1);
                rm.multiplicity += 1;
                merged = true;
                break;
            }
        }
        if (!merged) out.push_back({FloatC(z), 1});
    }
    return out;
}

// Uniform interface used by the pencil code.
inline std::vector<RootMult> field_roots(const Poly<GaussQ>& p) { return exact_roots(p); }
inline std::vector<RootMultF> field_roots(const Poly<FloatC>& p) { return float_roots(p); }

} // namespace germ
