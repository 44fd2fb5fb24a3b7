#pragma once

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>

#include "germ/errors.hpp"

namespace germ {

// Global tolerance used by every float-mode comparison.  One knob, stated in
// every report.
inline double& float_tolerance() {
    static double tol = 1e-10;
    return tol;
}

// ---------------------------------------------------------------------------
// Rat: arbitrary-precision rational, thin wrapper over GMP's mpq_class.
// ---------------------------------------------------------------------------
class Rat {
  public:
    Rat() : v_(0) {}
    Rat(long n) : v_(n) {}
    Rat(long num, long den) : v_(num, den) { canon(); }
    explicit Rat(const mpq_class& q) : v_(q) { canon(); }
    explicit Rat(const std::string& s) : v_(s) { canon(); }

    static Rat from_mpz(const mpz_class& n, const mpz_class& d) {
        mpq_class q(n, d);
        q.canonicalize();
        return Rat(q);
    }

    const mpq_class& raw() const { return v_; }

    Rat operator-() const { return Rat(mpq_class(-v_)); }
    Rat operator+(const Rat& o) const { return Rat(mpq_class(v_ + o.v_)); }
    Rat operator-(const Rat& o) const { return Rat(mpq_class(v_ - o.v_)); }
    Rat operator*(const Rat& o) const { return Rat(mpq_class(v_ * o.v_)); }
    Rat operator/(const Rat& o) const {
        if (o.is_zero()) throw Error("rational division by zero");
        return Rat(mpq_class(v_ / o.v_));
    }
    Rat& operator+=(const Rat& o) { v_ += o.v_; return *this; }
    Rat& operator-=(const Rat& o) { v_ -= o.v_; return *this; }
    Rat& operator*=(const Rat& o) { v_ *= o.v_; return *this; }

    bool operator==(const Rat& o) const { return v_ == o.v_; }
    bool operator!=(const Rat& o) const { return v_ != o.v_; }
    bool operator<(const Rat& o) const { return v_ < o.v_; }
    bool operator<=(const Rat& o) const { return v_ <= o.v_; }
    bool operator>(const Rat& o) const { return v_ > o.v_; }
    bool operator>=(const Rat& o) const { return v_ >= o.v_; }

    bool is_zero() const { return sgn(v_) == 0; }
    int sign() const { return sgn(v_); }
    Rat abs() const { return Rat(mpq_class(::abs(v_))); }

    double to_double() const { return v_.get_d(); }

    // Exact square root, if it exists in Q.
    std::optional<Rat> sqrt() const {
        if (sign() < 0) return std::nullopt;
        mpz_class n = v_.get_num(), d = v_.get_den();
        if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t()))
            return std::nullopt;
        mpz_class sn, sd;
        mpz_sqrt(sn.get_mpz_t(), n.get_mpz_t());
        mpz_sqrt(sd.get_mpz_t(), d.get_mpz_t());
        return from_mpz(sn, sd);
    }

    // Exact k-th root, if it exists in Q.
    std::optional<Rat> kth_root(unsigned k) const {
        if (k == 0) return std::nullopt;
        if (sign() < 0 && k % 2 == 0) return std::nullopt;
        mpz_class n = v_.get_num(), d = v_.get_den();
        mpz_class an = ::abs(n);
        mpz_class rn, rd;
        if (!mpz_root(rn.get_mpz_t(), an.get_mpz_t(), k)) return std::nullopt;
        mpz_class back;
        mpz_pow_ui(back.get_mpz_t(), rn.get_mpz_t(), k);
        if (back != an) return std::nullopt;
        if (!mpz_root(rd.get_mpz_t(), d.get_mpz_t(), k)) return std::nullopt;
        mpz_pow_ui(back.get_mpz_t(), rd.get_mpz_t(), k);
        if (back != d) return std::nullopt;
        if (sgn(n) < 0) rn = -rn;
        return from_mpz(rn, rd);
    }

    // Best rational approximation with denominator <= max_den (continued
    // fractions).  Used to lift numeric root candidates back into the field;
    // results are always verified exactly by the caller.
    static std::optional<Rat> reconstruct(double x, unsigned long max_den = 1000000UL) {
        if (!std::isfinite(x)) return std::nullopt;
        double a = x;
        long long p1 = 1, q1 = 0; // previous convergent (h_{-1}, k_{-1})
        long long p0 = (long long)std::floor(a);
        long long q0 = 1;
        double frac = a - std::floor(a);
        for (int it = 0; it < 64; ++it) {
            if (std::abs(p0 / (double)q0 - x) < 1e-13 * std::max(1.0, std::abs(x))) break;
            if (frac < 1e-15) break;
            a = 1.0 / frac;
            long long ai = (long long)std::floor(a);
            frac = a - std::floor(a);
            long long p2 = ai * p0 + p1, q2 = ai * q0 + q1;
            if (q2 > (long long)max_den || q2 <= 0) break;
            p1 = p0; q1 = q0; p0 = p2; q0 = q2;
        }
        if (q0 <= 0) return std::nullopt;
        if (std::abs(p0 / (double)q0 - x) > 1e-9 * std::max(1.0, std::abs(x))) return std::nullopt;
        return Rat((long)p0, (long)q0);
    }

    std::string str() const {
        std::ostringstream os;
        os << v_.get_num() << "/" << v_.get_den();
        return os.str();
    }

  private:
    void canon() { v_.canonicalize(); }
    mpq_class v_;
};

// ---------------------------------------------------------------------------
// GaussQ: Gaussian rational a + b i, the exact coefficient field.
// ---------------------------------------------------------------------------
struct GaussQ {
    Rat re, im;

    GaussQ() = default;
    GaussQ(long n) : re(n), im(0) {}
    GaussQ(Rat r) : re(std::move(r)), im(0) {}
    GaussQ(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}
    GaussQ(long num, long den) : re(num, den), im(0) {}

    static GaussQ i_unit() { return GaussQ(Rat(0), Rat(1)); }

    bool is_zero() const { return re.is_zero() && im.is_zero(); }
    bool is_real() const { return im.is_zero(); }

    GaussQ operator-() const { return {-re, -im}; }
    GaussQ operator+(const GaussQ& o) const { return {re + o.re, im + o.im}; }
    GaussQ operator-(const GaussQ& o) const { return {re - o.re, im - o.im}; }
    GaussQ operator*(const GaussQ& o) const {
        return {re * o.re - im * o.im, re * o.im + im * o.re};
    }
    GaussQ conj() const { return {re, -im}; }
    Rat norm2() const { return re * re + im * im; } // |z|^2, exact
    GaussQ inverse() const {
        Rat n = norm2();
        if (n.is_zero()) throw Error("division by zero in coefficient field");
        return {re / n, -(im / n)};
    }
    GaussQ operator/(const GaussQ& o) const { return *this * o.inverse(); }
    GaussQ& operator+=(const GaussQ& o) { re += o.re; im += o.im; return *this; }
    GaussQ& operator-=(const GaussQ& o) { re -= o.re; im -= o.im; return *this; }

    bool operator==(const GaussQ& o) const { return re == o.re && im == o.im; }
    bool operator!=(const GaussQ& o) const { return !(*this == o); }

    // Total order used for canonical forms: lexicographic on (re, im).
    bool lex_less(const GaussQ& o) const {
        if (re != o.re) return re < o.re;
        return im < o.im;
    }
    // Lexicographically positive, i.e. > 0 in the (re, im) order.
    bool lex_positive() const {
        if (!re.is_zero()) return re.sign() > 0;
        return im.sign() > 0;
    }

    std::complex<double> to_complex() const { return {re.to_double(), im.to_double()}; }

    // Exact square root in Q(i), if one exists.  The principal root is the
    // lexicographically positive one.
    std::optional<GaussQ> sqrt() const {
        if (is_zero()) return GaussQ();
        std::optional<GaussQ> r;
        if (im.is_zero()) {
            if (re.sign() > 0) {
                if (auto s = re.sqrt()) r = GaussQ(*s);
            } else {
                if (auto s = (-re).sqrt()) r = GaussQ(Rat(0), *s);
            }
        } else {
            // z = a+bi; |z| must be rational, then Re,Im of the root follow.
            auto m = norm2().sqrt();
            if (!m) return std::nullopt;
            Rat c2 = (re + *m) / Rat(2);
            auto c = c2.sqrt();
            if (!c || c->is_zero()) return std::nullopt;
            Rat d = im / (Rat(2) * *c);
            r = GaussQ(*c, d);
        }
        if (!r) return std::nullopt;
        if (!(*r * *r == *this)) return std::nullopt;
        if (!r->lex_positive()) r = -*r;
        return r;
    }

    std::string str() const {
        if (im.is_zero()) return re.str();
        std::string s = re.str();
        s += im.sign() >= 0 ? " + " : " - ";
        s += im.abs().str() + " i";
        return s;
    }
};

// ---------------------------------------------------------------------------
// FloatC: complex double whose comparisons all go through the global
// relative tolerance.
// ---------------------------------------------------------------------------
struct FloatC {
    std::complex<double> v{0.0, 0.0};

    FloatC() = default;
    FloatC(double re) : v(re, 0.0) {}
    FloatC(std::complex<double> z) : v(z) {}
    FloatC(long num, long den) : v((double)num / (double)den, 0.0) {}

    bool is_zero() const { return std::abs(v) <= float_tolerance(); }

    FloatC operator-() const { return {-v}; }
    FloatC operator+(const FloatC& o) const { return {v + o.v}; }
    FloatC operator-(const FloatC& o) const { return {v - o.v}; }
    FloatC operator*(const FloatC& o) const { return {v * o.v}; }
    FloatC operator/(const FloatC& o) const {
        if (std::abs(o.v) == 0.0) throw Error("float division by zero");
        return {v / o.v};
    }
    FloatC conj() const { return {std::conj(v)}; }
    FloatC inverse() const { return FloatC(1.0) / *this; }
    FloatC& operator+=(const FloatC& o) { v += o.v; return *this; }
    FloatC& operator-=(const FloatC& o) { v -= o.v; return *this; }

    bool operator==(const FloatC& o) const {
        double scale = std::max({1.0, std::abs(v), std::abs(o.v)});
        return std::abs(v - o.v) <= float_tolerance() * scale;
    }
    bool operator!=(const FloatC& o) const { return !(*this == o); }

    bool lex_less(const FloatC& o) const {
        double tol = float_tolerance() * std::max({1.0, std::abs(v), std::abs(o.v)});
        if (std::abs(v.real() - o.v.real()) > tol) return v.real() < o.v.real();
        return v.imag() < o.v.imag() - tol;
    }
    bool lex_positive() const {
        if (std::abs(v.real()) > float_tolerance()) return v.real() > 0;
        return v.imag() > float_tolerance();
    }

    std::complex<double> to_complex() const { return v; }

    std::optional<FloatC> sqrt() const {
        FloatC r{std::sqrt(v)};
        if (!r.lex_positive() && !r.is_zero()) r = -r;
        return r;
    }

    std::string str() const {
        std::ostringstream os;
        os.precision(17);
        os << v.real();
        if (v.imag() != 0.0) os << (v.imag() >= 0 ? " + " : " - ") << std::abs(v.imag()) << " i";
        return os.str();
    }
};

// ---------------------------------------------------------------------------
// scalar_traits: the operations generic algorithms need from a coefficient.
// ---------------------------------------------------------------------------
template <class C>
struct scalar_traits;

template <>
struct scalar_traits<GaussQ> {
    static constexpr bool exact = true;
    static constexpr bool is_field = true;
    static GaussQ zero() { return GaussQ(); }
    static GaussQ one() { return GaussQ(1); }
    static GaussQ from_int(long n) { return GaussQ(n); }
    static GaussQ conj(const GaussQ& c) { return c.conj(); }
    static bool is_zero(const GaussQ& c) { return c.is_zero(); }
    static bool lex_less(const GaussQ& a, const GaussQ& b) { return a.lex_less(b); }
    static double pivot_size(const GaussQ& c) { return c.is_zero() ? 0.0 : 1.0; }
    static std::optional<GaussQ> sqrt(const GaussQ& c) { return c.sqrt(); }
    static std::complex<double> to_complex(const GaussQ& c) { return c.to_complex(); }
    static std::string str(const GaussQ& c) { return c.str(); }
};

template <>
struct scalar_traits<FloatC> {
    static constexpr bool exact = false;
    static constexpr bool is_field = true;
    static FloatC zero() { return FloatC(); }
    static FloatC one() { return FloatC(1.0); }
    static FloatC from_int(long n) { return FloatC((double)n); }
    static FloatC conj(const FloatC& c) { return c.conj(); }
    static bool is_zero(const FloatC& c) { return c.is_zero(); }
    static bool lex_less(const FloatC& a, const FloatC& b) { return a.lex_less(b); }
    static double pivot_size(const FloatC& c) { return std::abs(c.v); }
    static std::optional<FloatC> sqrt(const FloatC& c) { return c.sqrt(); }
    static std::complex<double> to_complex(const FloatC& c) { return c.to_complex(); }
    static std::string str(const FloatC& c) { return c.str(); }
};

// k-th root in the field.  Exact mode lifts a numeric candidate back into
// Q(i) and verifies; a miss means "not representable in the field" (or a
// denominator past the reconstruction bound, which we treat the same way).
inline std::optional<GaussQ> field_kth_root(const GaussQ& c, unsigned k) {
    if (k == 1) return c;
    if (c.is_zero()) return GaussQ();
    if (k == 2) return c.sqrt();
    if (c.is_real()) {
        if (auto r = c.re.kth_root(k)) return GaussQ(*r);
        if (k % 2 == 1) return std::nullopt; // odd real root stays real
    }
    std::complex<double> z = c.to_complex();
    std::complex<double> w = std::pow(z, 1.0 / (double)k);
    for (unsigned j = 0; j < k; ++j) {
        std::complex<double> rot = std::polar(1.0, 2.0 * M_PI * j / k);
        std::complex<double> cand = w * rot;
        auto re = Rat::reconstruct(cand.real());
        auto im = Rat::reconstruct(cand.imag());
        if (!re || !im) continue;
        GaussQ g(*re, *im);
        GaussQ p = g;
        for (unsigned e = 1; e < k; ++e) p = p * g;
        if (p == c) return g;
    }
    return std::nullopt;
}

inline std::optional<FloatC> field_kth_root(const FloatC& c, unsigned k) {
    return FloatC{std::pow(c.v, 1.0 / (double)k)};
}

} // namespace germ
