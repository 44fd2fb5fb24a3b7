#pragma once

#include <optional>
#include <string>
#include <vector>

#include "germ/scalar.hpp"

namespace germ {

// Dense univariate polynomial over a coefficient C.  Used for the path
// parameter t (and the flow parameter s), which is carried exactly while
// jets are truncated only in the space variables.
template <class C>
class Poly {
  public:
    using Tr = scalar_traits<C>;

    Poly() = default;
    Poly(long n) { if (n != 0) c_ = {Tr::from_int(n)}; trim(); }
    Poly(long num, long den) : Poly(C(num, den)) {}
    Poly(const C& c) { if (!Tr::is_zero(c)) c_ = {c}; }
    explicit Poly(std::vector<C> coeffs) : c_(std::move(coeffs)) { trim(); }

    static Poly variable() { return Poly(std::vector<C>{Tr::zero(), Tr::one()}); }

    bool is_zero() const { return c_.empty(); }
    int degree() const { return (int)c_.size() - 1; } // -1 for zero
    const std::vector<C>& coeffs() const { return c_; }
    C coeff(int k) const { return k >= 0 && k < (int)c_.size() ? c_[(size_t)k] : Tr::zero(); }
    C constant() const { return coeff(0); }
    C leading() const { return c_.empty() ? Tr::zero() : c_.back(); }

    Poly operator-() const {
        Poly r = *this;
        for (auto& x : r.c_) x = -x;
        return r;
    }
    Poly operator+(const Poly& o) const {
        std::vector<C> r(std::max(c_.size(), o.c_.size()), Tr::zero());
        for (size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
        for (size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
        return Poly(std::move(r));
    }
    Poly operator-(const Poly& o) const { return *this + (-o); }
    Poly operator*(const Poly& o) const {
        if (is_zero() || o.is_zero()) return Poly();
        std::vector<C> r(c_.size() + o.c_.size() - 1, Tr::zero());
        for (size_t i = 0; i < c_.size(); ++i)
            for (size_t j = 0; j < o.c_.size(); ++j)
                r[i + j] += c_[i] * o.c_[j];
        return Poly(std::move(r));
    }
    Poly& operator+=(const Poly& o) { *this = *this + o; return *this; }
    Poly& operator-=(const Poly& o) { *this = *this - o; return *this; }
    Poly scaled(const C& s) const {
        Poly r;
        r.c_.reserve(c_.size());
        for (auto& x : c_) r.c_.push_back(x * s);
        r.trim();
        return r;
    }

    bool operator==(const Poly& o) const {
        return (*this - o).is_zero();
    }
    bool operator!=(const Poly& o) const { return !(*this == o); }

    C eval(const C& x) const {
        C acc = Tr::zero();
        for (size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
        return acc;
    }

    Poly derivative() const {
        if (c_.size() <= 1) return Poly();
        std::vector<C> r(c_.size() - 1, Tr::zero());
        for (size_t i = 1; i < c_.size(); ++i) r[i - 1] = c_[i] * Tr::from_int((long)i);
        return Poly(std::move(r));
    }

    // Antiderivative with zero constant term (exact: division by integers).
    Poly integral() const {
        if (is_zero()) return Poly();
        std::vector<C> r(c_.size() + 1, Tr::zero());
        for (size_t i = 0; i < c_.size(); ++i)
            r[i + 1] = c_[i] * C(1, (long)(i + 1));
        return Poly(std::move(r));
    }

    // Euclidean division; divisor must be nonzero.
    std::pair<Poly, Poly> divmod(const Poly& d) const {
        if (d.is_zero()) throw Error("polynomial division by zero");
        Poly r = *this, q;
        q.c_.assign(std::max<size_t>(1, c_.size()), Tr::zero());
        C lead_inv = d.leading().inverse();
        while (!r.is_zero() && r.degree() >= d.degree()) {
            int k = r.degree() - d.degree();
            C f = r.leading() * lead_inv;
            q.c_[(size_t)k] += f;
            // r -= f x^k d
            std::vector<C> sub((size_t)k, Tr::zero());
            sub.insert(sub.end(), d.c_.begin(), d.c_.end());
            Poly s(std::move(sub));
            r = r - s.scaled(f);
            if (r.degree() >= k + d.degree()) { // cancellation must reduce degree
                r.c_.resize((size_t)(k + d.degree()), Tr::zero());
                r.trim();
            }
        }
        q.trim();
        return {q, r};
    }

    Poly monic() const {
        if (is_zero()) return *this;
        return scaled(leading().inverse());
    }

    static Poly gcd(Poly a, Poly b) {
        while (!b.is_zero()) {
            auto [q, r] = a.divmod(b);
            (void)q;
            a = b;
            b = r;
        }
        return a.monic();
    }

    std::string str(const std::string& var = "t") const {
        if (is_zero()) return "0";
        std::string s;
        for (size_t i = 0; i < c_.size(); ++i) {
            if (Tr::is_zero(c_[i])) continue;
            if (!s.empty()) s += " + ";
            s += "(" + Tr::str(c_[i]) + ")";
            if (i == 1) s += "*" + var;
            else if (i > 1) s += "*" + var + "^" + std::to_string(i);
        }
        return s;
    }

  private:
    void trim() {
        while (!c_.empty() && Tr::is_zero(c_.back())) c_.pop_back();
    }
    std::vector<C> c_; // c_[k] multiplies t^k
};

// Poly<C> itself satisfies the ring part of scalar_traits so jets can carry
// polynomial coefficients (space truncation stays on the jet side).
template <class C>
struct scalar_traits<Poly<C>> {
    static constexpr bool exact = scalar_traits<C>::exact;
    static constexpr bool is_field = false;
    static Poly<C> zero() { return Poly<C>(); }
    static Poly<C> one() { return Poly<C>(1); }
    static Poly<C> from_int(long n) { return Poly<C>(n); }
    static bool is_zero(const Poly<C>& p) { return p.is_zero(); }
    static double pivot_size(const Poly<C>& p) { return p.is_zero() ? 0.0 : 1.0; }
    static std::string str(const Poly<C>& p) { return p.str(); }
};

} // namespace germ
