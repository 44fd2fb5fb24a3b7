#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "germ/poly.hpp"
#include "germ/scalar.hpp"

namespace germ {

// Exponent multi-index of a monomial.
struct Monomial {
    std::vector<int> e;

    explicit Monomial(int nvars = 0) : e((size_t)nvars, 0) {}
    explicit Monomial(std::vector<int> exps) : e(std::move(exps)) {}
    Monomial(std::initializer_list<int> exps) : e(exps) {}

    int nvars() const { return (int)e.size(); }
    int degree() const { return std::accumulate(e.begin(), e.end(), 0); }
    int operator[](int i) const { return e[(size_t)i]; }

    Monomial operator*(const Monomial& o) const {
        Monomial r = *this;
        for (size_t i = 0; i < e.size(); ++i) r.e[i] += o.e[i];
        return r;
    }
    // Divide by o; caller guarantees divisibility.
    Monomial operator/(const Monomial& o) const {
        Monomial r = *this;
        for (size_t i = 0; i < e.size(); ++i) r.e[i] -= o.e[i];
        return r;
    }
    bool divisible_by(const Monomial& o) const {
        for (size_t i = 0; i < e.size(); ++i)
            if (e[i] < o.e[i]) return false;
        return true;
    }
    static Monomial var(int i, int nvars, int pow = 1) {
        Monomial m(nvars);
        m.e[(size_t)i] = pow;
        return m;
    }
    bool operator==(const Monomial& o) const { return e == o.e; }

    std::string str(std::span<const std::string> names = {}) const {
        std::string s;
        for (size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            if (!s.empty()) s += "*";
            s += names.empty() ? "x" + std::to_string(i + 1) : names[i];
            if (e[i] > 1) s += "^" + std::to_string(e[i]);
        }
        return s.empty() ? "1" : s;
    }
};

// Degree-lexicographic order: total degree first, then lex with earlier
// variables more significant.  All graded linear algebra uses this order.
struct DegLex {
    bool operator()(const Monomial& a, const Monomial& b) const {
        int da = a.degree(), db = b.degree();
        if (da != db) return da < db;
        return std::lexicographical_compare(b.e.begin(), b.e.end(), a.e.begin(), a.e.end());
    }
};

// All monomials of total degree exactly d in n variables, deg-lex sorted.
inline std::vector<Monomial> monomials_of_degree(int nvars, int d) {
    std::vector<Monomial> out;
    Monomial cur(nvars);
    // Recursive enumeration, then sort.
    std::vector<int> e((size_t)nvars, 0);
    auto rec = [&](auto&& self, int i, int rem) -> void {
        if (i == nvars - 1) {
            e[(size_t)i] = rem;
            out.push_back(Monomial(e));
            return;
        }
        for (int k = rem; k >= 0; --k) {
            e[(size_t)i] = k;
            self(self, i + 1, rem - k);
        }
        e[(size_t)i] = 0;
    };
    if (nvars == 0) {
        if (d == 0) out.push_back(Monomial(0));
        return out;
    }
    rec(rec, 0, d);
    std::sort(out.begin(), out.end(), [](const Monomial& a, const Monomial& b) {
        return DegLex{}(a, b);
    });
    return out;
}

// ---------------------------------------------------------------------------
// Jet: truncated power series in n variables at order K, sparse term map.
// Invariants: no stored zero coefficient, every exponent has degree <= K.
// ---------------------------------------------------------------------------
template <class C>
class Jet {
  public:
    using Tr = scalar_traits<C>;
    using Terms = std::map<Monomial, C, DegLex>;

    Jet() : nvars_(0), order_(0) {}
    Jet(int nvars, int order) : nvars_(nvars), order_(order) {
        if (nvars < 0 || order < 0) throw InputError("jet: bad shape");
    }

    static Jet zero(int nvars, int order) { return Jet(nvars, order); }
    static Jet constant(const C& c, int nvars, int order) {
        Jet j(nvars, order);
        j.add_term(Monomial(nvars), c);
        return j;
    }
    static Jet variable(int i, int nvars, int order) {
        Jet j(nvars, order);
        j.add_term(Monomial::var(i, nvars), Tr::one());
        return j;
    }

    int nvars() const { return nvars_; }
    int order() const { return order_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    C coeff(const Monomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? Tr::zero() : it->second;
    }
    C constant_term() const { return coeff(Monomial(nvars_)); }

    void add_term(const Monomial& m, const C& c) {
        if ((int)m.e.size() != nvars_) throw InputError("jet: exponent width mismatch");
        if (m.degree() > order_) return;
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            if (!Tr::is_zero(c)) terms_.emplace(m, c);
        } else {
            it->second += c;
            if (Tr::is_zero(it->second)) terms_.erase(it);
        }
    }
    void set_term(const Monomial& m, const C& c) {
        terms_.erase(m);
        add_term(m, c);
    }

    // Lowest total degree of a nonzero term; order_+1 if zero.
    int valuation() const {
        if (terms_.empty()) return order_ + 1;
        return terms_.begin()->first.degree();
    }

    Jet truncated(int k) const {
        Jet r(nvars_, std::min(k, order_));
        for (auto& [m, c] : terms_)
            if (m.degree() <= r.order_) r.terms_.emplace(m, c);
        return r;
    }
    // Same terms, higher declared order (new coefficients are zero).
    Jet extended(int k) const {
        if (k < order_) return truncated(k);
        Jet r = *this;
        r.order_ = k;
        return r;
    }

    // Homogeneous part of total degree d.
    Jet graded_part(int d) const {
        Jet r(nvars_, order_);
        for (auto& [m, c] : terms_)
            if (m.degree() == d) r.terms_.emplace(m, c);
        return r;
    }
    Jet below_degree(int d) const {
        Jet r(nvars_, order_);
        for (auto& [m, c] : terms_)
            if (m.degree() < d) r.terms_.emplace(m, c);
        return r;
    }

    Jet operator-() const {
        Jet r = *this;
        for (auto& [m, c] : r.terms_) c = -c;
        return r;
    }
    Jet operator+(const Jet& o) const {
        check_compatible(o);
        Jet r = truncated(std::min(order_, o.order_));
        for (auto& [m, c] : o.terms_) r.add_term(m, c);
        return r;
    }
    Jet operator-(const Jet& o) const { return *this + (-o); }
    Jet operator*(const Jet& o) const {
        check_compatible(o);
        Jet r(nvars_, std::min(order_, o.order_));
        for (auto& [ma, ca] : terms_) {
            if (ma.degree() > r.order_) continue;
            for (auto& [mb, cb] : o.terms_) {
                if (ma.degree() + mb.degree() > r.order_) continue;
                r.add_term(ma * mb, ca * cb);
            }
        }
        return r;
    }
    Jet& operator+=(const Jet& o) { *this = *this + o; return *this; }
    Jet& operator-=(const Jet& o) { *this = *this - o; return *this; }
    Jet scaled(const C& s) const {
        Jet r(nvars_, order_);
        for (auto& [m, c] : terms_) {
            C sc = c * s;
            if (!Tr::is_zero(sc)) r.terms_.emplace(m, sc);
        }
        return r;
    }

    bool operator==(const Jet& o) const {
        if (nvars_ != o.nvars_ || order_ != o.order_) return false;
        return (*this - o).is_zero();
    }
    bool operator!=(const Jet& o) const { return !(*this == o); }

    // Formal partial derivative; one order of accuracy is consumed.
    Jet derivative(int i) const {
        Jet r(nvars_, std::max(0, order_ - 1));
        for (auto& [m, c] : terms_) {
            int e = m[(size_t)i];
            if (e == 0) continue;
            Monomial dm = m;
            dm.e[(size_t)i] -= 1;
            if (dm.degree() > r.order_) continue;
            r.add_term(dm, c * Tr::from_int(e));
        }
        return r;
    }

    // Formal substitution x_i <- subst[i].  Substituted jets must share a
    // variable count and have zero constant term (truncation is then
    // well-defined).  Result lives in the substituted jets' variables.
    Jet compose(std::span<const Jet> subst) const {
        if ((int)subst.size() != nvars_) throw InputError("compose: wrong substitution count");
        int m = subst.empty() ? 0 : subst[0].nvars();
        int ord = order_;
        for (auto& s : subst) {
            if (s.nvars() != m) throw InputError("compose: substitution variable mismatch");
            if (!Tr::is_zero(s.constant_term()))
                throw InputError("compose: substituted jet has nonzero constant term");
            ord = std::min(ord, s.order());
        }
        // Cache powers of each substituted jet.
        std::vector<std::vector<Jet>> pw((size_t)nvars_);
        Jet r(m, ord);
        for (auto& [mono, c] : terms_) {
            if (mono.degree() > ord) continue;
            Jet term = Jet::constant(c, m, ord);
            for (int i = 0; i < nvars_; ++i) {
                int e = mono[(size_t)i];
                if (e == 0) continue;
                auto& cache = pw[(size_t)i];
                if (cache.empty()) cache.push_back(subst[(size_t)i].truncated(ord));
                while ((int)cache.size() < e) cache.push_back(cache.back() * cache[0]);
                term = term * cache[(size_t)e - 1];
            }
            r += term;
        }
        return r;
    }
    Jet compose(const std::vector<Jet>& subst) const {
        return compose(std::span<const Jet>(subst));
    }

    // Reciprocal of a unit jet (nonzero constant term), through the order.
    Jet inverse() const {
        C c0 = constant_term();
        if (Tr::is_zero(c0)) throw Error("jet inverse: not a unit");
        C c0i = c0.inverse();
        Jet w = (*this).scaled(c0i); // 1 + nilpotent
        Jet n = Jet::constant(Tr::one(), nvars_, order_) - w;
        // Geometric series: (1 - n)^{-1} = 1 + n + n^2 + ...
        Jet acc = Jet::constant(Tr::one(), nvars_, order_);
        Jet p = n;
        for (int k = 1; k <= order_ && !p.is_zero(); ++k) {
            acc += p;
            p = p * n;
        }
        return acc.scaled(c0i);
    }

    // k-th root of a unit jet with the given root of its constant term.
    Jet kth_root_with(const C& root0, unsigned k) const {
        C c0 = constant_term();
        if (Tr::is_zero(c0)) throw Error("jet root: not a unit");
        Jet u = scaled(c0.inverse()); // 1 + w
        // Newton for s^k = u, s0 = 1:  s <- s - (s^k - u) / (k s^{k-1})
        Jet s = Jet::constant(Tr::one(), nvars_, order_);
        C kinv = C(1, (long)k);
        for (int it = 0; it < order_ + 2; ++it) {
            Jet sk = s;
            for (unsigned e = 1; e < k; ++e) sk = sk * s;
            Jet err = sk - u;
            if (err.is_zero()) break;
            Jet skm1 = s;
            for (unsigned e = 2; e < k; ++e) skm1 = skm1 * s;
            s = s - err.scaled(kinv) * skm1.inverse();
        }
        return s.scaled(root0);
    }

    std::complex<double> eval(std::span<const std::complex<double>> x) const {
        std::complex<double> acc = 0.0;
        for (auto& [m, c] : terms_) {
            std::complex<double> t = Tr::to_complex(c);
            for (int i = 0; i < nvars_; ++i)
                for (int e = 0; e < m[(size_t)i]; ++e) t *= x[(size_t)i];
            acc += t;
        }
        return acc;
    }

    std::string str(std::span<const std::string> names = {}) const {
        if (terms_.empty()) return "0";
        std::string s;
        for (auto& [m, c] : terms_) {
            if (!s.empty()) s += " + ";
            s += "(" + Tr::str(c) + ")";
            if (m.degree() > 0) s += "*" + m.str(names);
        }
        return s;
    }

  private:
    void check_compatible(const Jet& o) const {
        if (nvars_ != o.nvars_)
            throw InputError("jet arithmetic: variable count mismatch (" +
                             std::to_string(nvars_) + " vs " + std::to_string(o.nvars_) + ")");
    }
    int nvars_;
    int order_;
    Terms terms_;
};

// Convert an exact jet to float coefficients (for numeric verification).
inline Jet<FloatC> to_float(const Jet<GaussQ>& j) {
    Jet<FloatC> r(j.nvars(), j.order());
    for (auto& [m, c] : j.terms()) r.add_term(m, FloatC(c.to_complex()));
    return r;
}
inline const Jet<FloatC>& to_float(const Jet<FloatC>& j) { return j; }

// Lift scalar coefficients into constant polynomials (t-parametric work).
template <class C>
Jet<Poly<C>> lift_poly(const Jet<C>& j) {
    Jet<Poly<C>> r(j.nvars(), j.order());
    for (auto& [m, c] : j.terms()) r.add_term(m, Poly<C>(c));
    return r;
}
// Extract the t^k slice of a polynomial-coefficient jet.
template <class C>
Jet<C> poly_slice(const Jet<Poly<C>>& j, int k) {
    Jet<C> r(j.nvars(), j.order());
    for (auto& [m, p] : j.terms()) r.add_term(m, p.coeff(k));
    return r;
}
// Maximum t-degree across coefficients.
template <class C>
int poly_degree(const Jet<Poly<C>>& j) {
    int d = -1;
    for (auto& [m, p] : j.terms()) d = std::max(d, p.degree());
    return d;
}
// Evaluate the polynomial coefficients at a scalar value of t.
template <class C>
Jet<C> poly_eval(const Jet<Poly<C>>& j, const C& t) {
    Jet<C> r(j.nvars(), j.order());
    for (auto& [m, p] : j.terms()) r.add_term(m, p.eval(t));
    return r;
}

} // namespace germ
