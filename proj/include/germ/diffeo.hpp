#pragma once

#include <vector>

#include "germ/jet.hpp"
#include "germ/linalg.hpp"

namespace germ {

// Diffeomorphism jet: n components in n variables, zero constant terms,
// invertible linear part.
template <class C>
class DiffeoJet {
  public:
    using Tr = scalar_traits<C>;

    DiffeoJet() = default;
    explicit DiffeoJet(std::vector<Jet<C>> comps) : c_(std::move(comps)) {
        int n = (int)c_.size();
        for (auto& j : c_) {
            if (j.nvars() != n) throw InputError("diffeo: component variable mismatch");
            if (!Tr::is_zero(j.constant_term()))
                throw InputError("diffeo: component has nonzero constant term");
        }
        if (!inverse(linear_matrix()))
            throw Error("diffeo: singular linear part");
    }

    static DiffeoJet identity(int n, int order) {
        std::vector<Jet<C>> comps;
        for (int i = 0; i < n; ++i) comps.push_back(Jet<C>::variable(i, n, order));
        return DiffeoJet(std::move(comps));
    }
    static DiffeoJet from_linear(const Matrix<C>& m, int order) {
        int n = m.rows();
        std::vector<Jet<C>> comps;
        for (int i = 0; i < n; ++i) {
            Jet<C> j(n, order);
            for (int k = 0; k < n; ++k) j.add_term(Monomial::var(k, n), m(i, k));
            comps.push_back(std::move(j));
        }
        return DiffeoJet(std::move(comps));
    }

    int nvars() const { return (int)c_.size(); }
    int order() const { return c_.empty() ? 0 : c_[0].order(); }
    const std::vector<Jet<C>>& components() const { return c_; }
    const Jet<C>& component(int i) const { return c_[(size_t)i]; }

    Matrix<C> linear_matrix() const {
        int n = nvars();
        Matrix<C> m(n, n);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                m(i, k) = c_[(size_t)i].coeff(Monomial::var(k, n));
        return m;
    }

    // apply(F) = F o phi.
    Jet<C> apply(const Jet<C>& f) const { return f.compose(c_); }

    // this o other (apply other first).
    DiffeoJet then_after(const DiffeoJet& other) const {
        std::vector<Jet<C>> comps;
        for (auto& j : c_) comps.push_back(j.compose(other.c_));
        return DiffeoJet(std::move(comps));
    }

    DiffeoJet truncated(int k) const {
        std::vector<Jet<C>> comps;
        for (auto& j : c_) comps.push_back(j.truncated(k));
        return DiffeoJet(std::move(comps));
    }
    DiffeoJet extended(int k) const {
        std::vector<Jet<C>> comps;
        for (auto& j : c_) comps.push_back(j.extended(k));
        return DiffeoJet(std::move(comps));
    }

    // Compositional inverse through the order.
    DiffeoJet inverse_diffeo() const {
        int n = nvars(), K = order();
        auto linv = inverse(linear_matrix());
        if (!linv) throw Error("invert_diffeo: singular linear part");
        DiffeoJet psi = from_linear(*linv, K);
        // psi <- L^{-1} o (id - N o psi), N = phi - L; gains a degree per pass.
        std::vector<Jet<C>> nonlin;
        for (int i = 0; i < n; ++i) {
            Jet<C> ni = c_[(size_t)i];
            for (int k = 0; k < n; ++k)
                ni.set_term(Monomial::var(k, n), Tr::zero());
            nonlin.push_back(std::move(ni));
        }
        for (int pass = 0; pass < K; ++pass) {
            std::vector<Jet<C>> comps;
            for (int i = 0; i < n; ++i) {
                Jet<C> t = Jet<C>::variable(i, n, K) - nonlin[(size_t)i].compose(psi.c_);
                comps.push_back(std::move(t));
            }
            std::vector<Jet<C>> next;
            for (int i = 0; i < n; ++i) {
                Jet<C> s(n, K);
                for (int k = 0; k < n; ++k)
                    if (!Tr::is_zero((*linv)(i, k))) s += comps[(size_t)k].scaled((*linv)(i, k));
                next.push_back(std::move(s));
            }
            bool stable = true;
            for (int i = 0; i < n; ++i)
                if (next[(size_t)i] != psi.c_[(size_t)i]) { stable = false; break; }
            psi.c_ = std::move(next);
            if (stable) break;
        }
        // Invariant check: round trip is the identity through K.
        DiffeoJet id = identity(n, K);
        if (!(then_after(psi) == id) || !(psi.then_after(*this) == id))
            throw Error("invert_diffeo: round-trip check failed");
        return psi;
    }

    bool operator==(const DiffeoJet& o) const { return c_ == o.c_; }

  private:
    DiffeoJet(std::vector<Jet<C>> comps, bool) : c_(std::move(comps)) {} // unchecked
    std::vector<Jet<C>> c_;
};

// Parametrized curve germ t -> (c_1(t), ..., c_n(t)), zero constant terms,
// not identically zero through the order.
template <class C>
class CurveJet {
  public:
    using Tr = scalar_traits<C>;

    CurveJet() = default;
    explicit CurveJet(std::vector<Jet<C>> comps) : c_(std::move(comps)) {
        bool nonzero = false;
        for (auto& j : c_) {
            if (j.nvars() != 1) throw InputError("curve: components must be 1-variable jets");
            if (!Tr::is_zero(j.constant_term()))
                throw InputError("curve: nonzero constant term");
            if (!j.is_zero()) nonzero = true;
        }
        if (!nonzero) throw InputError("curve: identically zero through the order");
    }

    // The j-th coordinate axis as a curve.
    static CurveJet axis(int j, int n, int order) {
        std::vector<Jet<C>> comps((size_t)n, Jet<C>::zero(1, order));
        comps[(size_t)j] = var1<C>(order);
        return CurveJet(std::move(comps));
    }

    int nvars() const { return (int)c_.size(); }
    int order() const { return c_.empty() ? 0 : c_[0].order(); }
    const std::vector<Jet<C>>& components() const { return c_; }
    const Jet<C>& component(int i) const { return c_[(size_t)i]; }

    // Smallest valuation across components.
    int valuation() const {
        int v = order() + 1;
        for (auto& j : c_) v = std::min(v, j.valuation());
        return v;
    }

    CurveJet truncated(int k) const {
        std::vector<Jet<C>> comps;
        for (auto& j : c_) comps.push_back(j.truncated(k));
        return CurveJet(std::move(comps));
    }

    // Reparametrize by a 1-variable jet r (r(0)=0).
    CurveJet reparametrized(const Jet<C>& r) const {
        std::vector<Jet<C>> comps;
        std::vector<Jet<C>> sub{r};
        for (auto& j : c_) comps.push_back(j.compose(sub));
        return CurveJet(std::move(comps));
    }

    bool operator==(const CurveJet& o) const { return c_ == o.c_; }

  private:
    std::vector<Jet<C>> c_;
};

// Restriction F|_C = F o C as a 1-variable jet.
template <class C>
Jet<C> restrict_to_curve(const Jet<C>& f, const CurveJet<C>& c) {
    if (f.nvars() != c.nvars()) throw InputError("restrict: variable count mismatch");
    return f.compose(c.components());
}

} // namespace germ
