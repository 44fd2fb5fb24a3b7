#pragma once

#include <map>
#include <optional>
#include <vector>

#include "germ/tangency.hpp"

namespace germ {

namespace detail {

// Cached least-norm solver for one graded slice: columns are monomial
// multiples of the generators' leading forms, rows the degree-d monomials.
template <class C>
class GradedSolver {
  public:
    using Tr = scalar_traits<C>;

    GradedSolver(int nvars, int degree, const std::vector<Jet<C>>& leading,
                 const std::vector<int>& valuations) {
        rows_ = monomials_of_degree(nvars, degree);
        for (size_t r = 0; r < rows_.size(); ++r) row_index_[rows_[r]] = (int)r;
        for (size_t g = 0; g < leading.size(); ++g) {
            int mu_deg = degree - valuations[g];
            if (mu_deg < 0) continue;
            for (auto& mu : monomials_of_degree(nvars, mu_deg))
                cols_.push_back({(int)g, mu});
        }
        a_ = Matrix<C>((int)rows_.size(), (int)cols_.size());
        for (size_t c = 0; c < cols_.size(); ++c) {
            auto& [g, mu] = cols_[c];
            for (auto& [m, coef] : leading[(size_t)g].terms()) {
                auto it = row_index_.find(mu * m);
                if (it == row_index_.end()) continue;
                a_(it->second, (int)c) = coef;
            }
        }
        // factor once: T A = R with T recorded alongside
        Matrix<C> aug(a_.rows(), a_.cols() + a_.rows());
        for (int i = 0; i < a_.rows(); ++i) {
            for (int j = 0; j < a_.cols(); ++j) aug(i, j) = a_(i, j);
            aug(i, a_.cols() + i) = Tr::one();
        }
        // restrict pivoting to the A-columns
        rref_ = std::move(aug);
        pivots_.clear();
        int row = 0;
        for (int col = 0; col < a_.cols() && row < a_.rows(); ++col) {
            int best = -1;
            double bestsz = 0.0;
            for (int i = row; i < rref_.rows(); ++i) {
                double sz = Tr::pivot_size(rref_(i, col));
                if (sz > bestsz) { bestsz = sz; best = i; }
            }
            if (best < 0) continue;
            rref_.swap_rows(row, best);
            C inv = rref_(row, col).inverse();
            for (int k = 0; k < rref_.cols(); ++k) rref_(row, k) = rref_(row, k) * inv;
            for (int i = 0; i < rref_.rows(); ++i) {
                if (i == row || Tr::is_zero(rref_(i, col))) continue;
                C fct = rref_(i, col);
                for (int k = 0; k < rref_.cols(); ++k) rref_(i, k) -= fct * rref_(row, k);
            }
            pivots_.push_back(col);
            ++row;
        }
        rank_ = (int)pivots_.size();
        kernel_ = kernel_basis(a_);
        if (!kernel_.empty()) {
            int kd = (int)kernel_.size();
            Matrix<C> gram(kd, kd);
            for (int i = 0; i < kd; ++i)
                for (int j = 0; j < kd; ++j) {
                    C s = Tr::zero();
                    for (size_t t = 0; t < kernel_[(size_t)i].size(); ++t)
                        s += Tr::conj(kernel_[(size_t)i][t]) * kernel_[(size_t)j][t];
                    gram(i, j) = s;
                }
            auto gi = inverse(gram);
            if (gi) gram_inv_ = *gi;
        }
    }

    const std::vector<Monomial>& rows() const { return rows_; }
    const std::vector<std::pair<int, Monomial>>& cols() const { return cols_; }

    // Minimal-norm solution of A x = b, or nullopt when b is outside the span.
    std::optional<std::vector<C>> solve(const std::vector<C>& b) const {
        // y = T b  (T sits in the right block of rref_)
        std::vector<C> y((size_t)a_.rows(), Tr::zero());
        for (int i = 0; i < a_.rows(); ++i) {
            C s = Tr::zero();
            for (int j = 0; j < a_.rows(); ++j)
                if (!Tr::is_zero(rref_(i, a_.cols() + j))) s += rref_(i, a_.cols() + j) * b[(size_t)j];
            y[(size_t)i] = s;
        }
        for (int i = rank_; i < a_.rows(); ++i)
            if (!Tr::is_zero(y[(size_t)i])) return std::nullopt;
        std::vector<C> x((size_t)a_.cols(), Tr::zero());
        for (int r = 0; r < rank_; ++r) x[(size_t)pivots_[(size_t)r]] = y[(size_t)r];
        if (!kernel_.empty() && gram_inv_.rows() > 0) {
            int kd = (int)kernel_.size();
            std::vector<C> khx((size_t)kd, Tr::zero());
            for (int i = 0; i < kd; ++i) {
                C s = Tr::zero();
                for (size_t t = 0; t < x.size(); ++t)
                    s += Tr::conj(kernel_[(size_t)i][t]) * x[t];
                khx[(size_t)i] = s;
            }
            std::vector<C> z((size_t)kd, Tr::zero());
            for (int i = 0; i < kd; ++i) {
                C s = Tr::zero();
                for (int j = 0; j < kd; ++j) s += gram_inv_(i, j) * khx[(size_t)j];
                z[(size_t)i] = s;
            }
            for (int i = 0; i < kd; ++i)
                for (size_t t = 0; t < x.size(); ++t)
                    x[t] -= kernel_[(size_t)i][t] * z[(size_t)i];
        }
        return x;
    }

  private:
    std::vector<Monomial> rows_;
    std::map<Monomial, int, DegLex> row_index_;
    std::vector<std::pair<int, Monomial>> cols_; // (generator, multiplier monomial)
    Matrix<C> a_, rref_, gram_inv_;
    std::vector<int> pivots_;
    std::vector<std::vector<C>> kernel_;
    int rank_ = 0;
};

} // namespace detail

// Exact decomposition a = sum r_g gen_g through the working order; the
// witness re-verifies its identity on construction.
template <class C>
struct DecompositionWitness {
    std::vector<Jet<C>> coeffs;
    Jet<C> target;
    int order = 0;

    void verify(const std::vector<Jet<C>>& gens) const {
        Jet<C> acc = Jet<C>::zero(target.nvars(), order);
        for (size_t g = 0; g < gens.size(); ++g)
            acc += coeffs[g].truncated(order) * gens[g].truncated(order);
        if (!(acc == target.truncated(order)))
            throw Error("decomposition witness failed verification");
    }
};

// Graded ideal-membership engine with per-degree solver caching.
template <class C>
class IdealMembership {
  public:
    explicit IdealMembership(IdealPresentation<C> pres) : pres_(std::move(pres)) {
        for (auto& g : pres_.gens) {
            int v = g.valuation();
            vals_.push_back(v);
            leading_.push_back(g.graded_part(v));
        }
    }

    const IdealPresentation<C>& presentation() const { return pres_; }

    std::optional<DecompositionWitness<C>> try_decompose(const Jet<C>& a,
                                                         std::string* why = nullptr) const {
        using Tr = scalar_traits<C>;
        int D = std::min(a.order(), pres_.order);
        DecompositionWitness<C> w;
        w.order = D;
        w.target = a.truncated(D);
        w.coeffs.assign(pres_.gens.size(), Jet<C>::zero(pres_.nvars, D));
        Jet<C> rho = w.target;
        for (int guard = 0; guard <= D + 1; ++guard) {
            if (rho.is_zero()) break;
            int d = rho.valuation();
            if (d > D) break;
            auto& solver = solver_for(d);
            std::vector<C> b(solver.rows().size(), Tr::zero());
            Jet<C> slice = rho.graded_part(d);
            for (size_t r = 0; r < solver.rows().size(); ++r) b[r] = slice.coeff(solver.rows()[r]);
            auto x = solver.solve(b);
            if (!x) {
                if (why)
                    *why = "obstruction at degree " + std::to_string(d) +
                           ", residual " + slice.str();
                return std::nullopt;
            }
            std::vector<Jet<C>> piece(pres_.gens.size(), Jet<C>::zero(pres_.nvars, D));
            for (size_t c = 0; c < solver.cols().size(); ++c) {
                if (Tr::is_zero((*x)[c])) continue;
                auto& [g, mu] = solver.cols()[c];
                piece[(size_t)g].add_term(mu, (*x)[c]);
            }
            for (size_t g = 0; g < pres_.gens.size(); ++g) {
                if (piece[g].is_zero()) continue;
                w.coeffs[g] += piece[g];
                rho -= piece[g] * pres_.gens[g].truncated(D);
            }
        }
        if (!rho.is_zero()) {
            if (why) *why = "greedy elimination stalled at degree " + std::to_string(rho.valuation());
            return std::nullopt;
        }
        w.verify(pres_.gens);
        return w;
    }

    DecompositionWitness<C> decompose(const Jet<C>& a) const {
        std::string why;
        auto w = try_decompose(a, &why);
        if (!w) {
            int deg = -1;
            auto p = why.find("degree ");
            if (p != std::string::npos) deg = std::atoi(why.c_str() + p + 7);
            throw NotInIdeal(deg, why);
        }
        return *w;
    }

  private:
    detail::GradedSolver<C>& solver_for(int d) const {
        auto it = cache_.find(d);
        if (it == cache_.end())
            it = cache_.emplace(d, detail::GradedSolver<C>(pres_.nvars, d, leading_, vals_)).first;
        return it->second;
    }
    IdealPresentation<C> pres_;
    std::vector<Jet<C>> leading_;
    std::vector<int> vals_;
    mutable std::map<int, detail::GradedSolver<C>> cache_;
};

// Convenience wrapper matching the one-shot call shape.
template <class C>
DecompositionWitness<C> decompose_in_ideal(const Jet<C>& a, const IdealPresentation<C>& pres) {
    return IdealMembership<C>(pres).decompose(a);
}

// Parametric decomposition over generators polynomial in t whose leading
// forms are t-free: each t-slice reuses the same cached scalar solver.
template <class C>
class ParametricMembership {
  public:
    ParametricMembership(std::vector<Jet<Poly<C>>> gens, int nvars, int order)
        : gens_(std::move(gens)), nvars_(nvars), order_(order) {
        for (auto& g : gens_) {
            int v = g.valuation();
            Jet<Poly<C>> lead = g.graded_part(v);
            if (poly_degree(lead) > 0)
                throw HypothesisFailed(HypothesisFailed::Which::IdealMismatch,
                                       "tangency ideal varies along the path at leading order");
            vals_.push_back(v);
            leading_.push_back(poly_slice(lead, 0));
        }
    }

    // r_g with a = sum r_g gen_g through the order; nullopt + reason on failure.
    std::optional<std::vector<Jet<Poly<C>>>> try_decompose(const Jet<Poly<C>>& a,
                                                           std::string* why = nullptr) const {
        using Tr = scalar_traits<C>;
        int D = order_;
        std::vector<Jet<Poly<C>>> r(gens_.size(), Jet<Poly<C>>::zero(nvars_, D));
        Jet<Poly<C>> rho = a.truncated(D);
        for (int guard = 0; guard <= 2 * (D + 2); ++guard) {
            if (rho.is_zero()) break;
            int d = rho.valuation();
            if (d > D) break;
            auto& solver = solver_for(d);
            Jet<Poly<C>> slice = rho.graded_part(d);
            int tdeg = poly_degree(slice);
            std::vector<Jet<Poly<C>>> piece(gens_.size(), Jet<Poly<C>>::zero(nvars_, D));
            for (int k = 0; k <= tdeg; ++k) {
                Jet<C> sk = poly_slice(slice, k);
                if (sk.is_zero()) continue;
                std::vector<C> b(solver.rows().size(), Tr::zero());
                for (size_t rr = 0; rr < solver.rows().size(); ++rr)
                    b[rr] = sk.coeff(solver.rows()[rr]);
                auto x = solver.solve(b);
                if (!x) {
                    if (why)
                        *why = "parametric obstruction at degree " + std::to_string(d) +
                               " (t^" + std::to_string(k) + ")";
                    return std::nullopt;
                }
                std::vector<C> tk((size_t)k + 1, Tr::zero());
                tk[(size_t)k] = Tr::one();
                Poly<C> tpow(tk);
                for (size_t c = 0; c < solver.cols().size(); ++c) {
                    if (Tr::is_zero((*x)[c])) continue;
                    auto& [g, mu] = solver.cols()[c];
                    piece[(size_t)g].add_term(mu, tpow.scaled((*x)[c]));
                }
            }
            for (size_t g = 0; g < gens_.size(); ++g) {
                if (piece[g].is_zero()) continue;
                r[g] += piece[g];
                rho -= piece[g] * gens_[g].truncated(D);
            }
        }
        if (!rho.is_zero()) {
            if (why) *why = "parametric elimination stalled at degree " + std::to_string(rho.valuation());
            return std::nullopt;
        }
        // verify
        Jet<Poly<C>> acc = Jet<Poly<C>>::zero(nvars_, D);
        for (size_t g = 0; g < gens_.size(); ++g) acc += r[g] * gens_[g].truncated(D);
        if (!(acc == a.truncated(D)))
            throw Error("parametric decomposition failed verification");
        return r;
    }

    const std::vector<Jet<Poly<C>>>& generators() const { return gens_; }

  private:
    detail::GradedSolver<C>& solver_for(int d) const {
        auto it = cache_.find(d);
        if (it == cache_.end())
            it = cache_.emplace(d, detail::GradedSolver<C>(nvars_, d, leading_, vals_)).first;
        return it->second;
    }
    std::vector<Jet<Poly<C>>> gens_;
    std::vector<Jet<C>> leading_;
    std::vector<int> vals_;
    int nvars_, order_;
    mutable std::map<int, detail::GradedSolver<C>> cache_;
};

// Homotopy vector field X = sum X_i d_i + d_t with X.f = 0 and
// X.(g_0 + t (g_1 - g_0)) = 0 through the working order.
template <class C>
struct HomotopyField {
    std::vector<Jet<Poly<C>>> components; // x-components; the t-component is 1
    int order = 0;

    int min_x_valuation() const {
        int v = order + 1;
        for (auto& c : components) v = std::min(v, c.valuation());
        return v;
    }
};

// Assemble the field from a decomposition of g1 - g0 over the t-dependent
// tangency generators h_ij(t): X^j_i = r_ij d_j f (i < j),
// X^j_j = -sum_{i<j} r_ij d_i f.
template <class C>
HomotopyField<C> homotopy_field(const Jet<C>& f, const Jet<C>& g0, const Jet<C>& g1,
                                const std::vector<Jet<Poly<C>>>& witness,
                                const std::vector<std::pair<int, int>>& pair_index,
                                int order) {
    using Tr = scalar_traits<C>;
    int n = f.nvars();
    bool f_singular = true;
    for (int i = 0; i < n; ++i)
        if (!Tr::is_zero(f.derivative(i).constant_term())) f_singular = false;
    if (!f_singular) {
        for (auto& r : witness) {
            Poly<C> r0 = r.constant_term();
            if (!r0.is_zero())
                throw HypothesisFailed(
                    HypothesisFailed::Which::RegularWithoutVanishing,
                    "f is regular and a decomposition coefficient does not vanish at the "
                    "origin; the flow would not fix 0");
        }
    }
    // derivatives taken from the full-order inputs so the invariants are
    // checkable through `order` itself
    std::vector<Jet<Poly<C>>> df;
    for (int i = 0; i < n; ++i) df.push_back(lift_poly(f.derivative(i)).truncated(order));
    HomotopyField<C> X;
    X.order = order;
    X.components.assign((size_t)n, Jet<Poly<C>>::zero(n, order));
    for (size_t k = 0; k < pair_index.size(); ++k) {
        auto [i, j] = pair_index[k];
        const Jet<Poly<C>>& r = witness[k];
        X.components[(size_t)i] += r.truncated(order) * df[(size_t)j];
        X.components[(size_t)j] -= r.truncated(order) * df[(size_t)i];
    }
    // invariant: X.f = 0 exactly
    Jet<Poly<C>> xf = Jet<Poly<C>>::zero(n, order);
    for (int i = 0; i < n; ++i) xf += X.components[(size_t)i] * df[(size_t)i];
    if (!xf.is_zero()) throw Error("homotopy field: X.f != 0");
    // invariant: X.g_t + (g1 - g0) = 0 through the order
    Jet<C> delta = g1 - g0;
    Jet<Poly<C>> gt = lift_poly(g0) + lift_poly(delta).scaled(Poly<C>::variable());
    Jet<Poly<C>> xg = lift_poly(delta).truncated(order);
    for (int i = 0; i < n; ++i) xg += X.components[(size_t)i] * gt.derivative(i).truncated(order);
    if (!xg.is_zero()) throw Error("homotopy field: X.g + d_t g != 0 through the order");
    return X;
}

// Integrate the non-autonomous field from t = 0 to t = 1 by Picard iteration
// in the jet ring; the flow parameter is carried as an exact polynomial.
template <class C>
DiffeoJet<C> flow_to_time_one(const HomotopyField<C>& X) {
    using Tr = scalar_traits<C>;
    int n = (int)X.components.size();
    int K = X.order;
    if (X.min_x_valuation() < 1)
        throw Error("flow: field does not vanish at the origin");
    if constexpr (Tr::exact) {
        if (X.min_x_valuation() < 2)
            throw FieldError("flow: field has a linear part; its time-one map is not a "
                             "polynomial jet over the field (use float mode)");
    }
    // split components by t-powers
    int tdeg = 0;
    for (auto& c : X.components) tdeg = std::max(tdeg, poly_degree(c));
    std::vector<std::vector<Jet<C>>> slices((size_t)n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k <= tdeg; ++k) slices[(size_t)i].push_back(poly_slice(X.components[(size_t)i], k));

    std::vector<Jet<Poly<C>>> phi;
    for (int i = 0; i < n; ++i) phi.push_back(lift_poly(Jet<C>::variable(i, n, K)));
    int max_iter = Tr::exact ? K + 3 : 300;
    bool stable = false;
    for (int it = 0; it < max_iter && !stable; ++it) {
        std::vector<Jet<Poly<C>>> next;
        for (int i = 0; i < n; ++i) {
            // integrand: sum_k s^k (X_{i,k} o phi(s))
            Jet<Poly<C>> integrand = Jet<Poly<C>>::zero(n, K);
            for (int k = 0; k <= tdeg; ++k) {
                if (slices[(size_t)i][(size_t)k].is_zero()) continue;
                Jet<Poly<C>> comp = lift_poly(slices[(size_t)i][(size_t)k]).compose(phi);
                std::vector<C> tk((size_t)k + 1, Tr::zero());
                tk[(size_t)k] = Tr::one();
                integrand += comp.scaled(Poly<C>(tk));
            }
            // integrate in s, add the initial condition x_i
            Jet<Poly<C>> acc(n, K);
            for (auto& [m, p] : integrand.terms()) acc.add_term(m, p.integral());
            acc += lift_poly(Jet<C>::variable(i, n, K));
            next.push_back(std::move(acc));
        }
        stable = true;
        for (int i = 0; i < n; ++i)
            if (!(next[(size_t)i] == phi[(size_t)i])) { stable = false; break; }
        phi = std::move(next);
    }
    if (!stable && Tr::exact) throw Error("flow: Picard iteration did not reach a fixed point");
    std::vector<Jet<C>> comps;
    for (int i = 0; i < n; ++i) comps.push_back(poly_eval(phi[(size_t)i], Tr::one()));
    return DiffeoJet<C>(std::move(comps));
}

// Path conjugation: phi with f o phi = f and g0 o phi = g1 through K,
// provided I(f, g0) = I(f, g1) through K and g1 - g0 lies in the ideal.
template <class C>
DiffeoJet<C> conjugate_by_path(const Jet<C>& f, const Jet<C>& g0, const Jet<C>& g1) {
    int n = f.nvars();
    if (g0.nvars() != n || g1.nvars() != n)
        throw InputError("conjugate_by_path: variable mismatch");
    int K = std::min({f.order(), g0.order(), g1.order()});
    int Kw = K + 1;
    Jet<C> F = f.extended(Kw), G0 = g0.extended(Kw), G1 = g1.extended(Kw);

    Jet<C> delta = G1 - G0;
    if (delta.is_zero()) return DiffeoJet<C>::identity(n, K);

    auto pres0 = tangency_generators(F, G0);
    auto pres1 = tangency_generators(F, G1);
    IdealMembership<C> m0(pres0), m1(pres1);
    std::string why;
    for (auto& h : pres1.gens)
        if (!m0.try_decompose(h, &why))
            throw HypothesisFailed(HypothesisFailed::Which::IdealMismatch,
                                   "I(f,g1) not contained in I(f,g0): " + why);
    for (auto& h : pres0.gens)
        if (!m1.try_decompose(h, &why))
            throw HypothesisFailed(HypothesisFailed::Which::IdealMismatch,
                                   "I(f,g0) not contained in I(f,g1): " + why);
    if (!m0.try_decompose(delta.truncated(pres0.order), &why))
        throw HypothesisFailed(HypothesisFailed::Which::NotInIdeal,
                               "g1 - g0 not in I(f,g0): " + why);

    // t-parametric generators of I(f, g_t) and the parametric witness
    Jet<Poly<C>> Gt = lift_poly(G0) + lift_poly(delta).scaled(Poly<C>::variable());
    auto prest = tangency_generators(lift_poly(F), Gt);
    ParametricMembership<C> mt(prest.gens, n, prest.order);
    auto wt = mt.try_decompose(lift_poly(delta).truncated(prest.order), &why);
    if (!wt)
        throw HypothesisFailed(HypothesisFailed::Which::IdealMismatch,
                               "ideal not constant along the linear path: " + why);

    auto X = homotopy_field(F, G0, G1, *wt, prest.pair_index, prest.order);
    DiffeoJet<C> flow = flow_to_time_one(X);
    // the flow transports t=1 data back to t=0: g1 o flow = g0; invert.
    DiffeoJet<C> phi = flow.inverse_diffeo().truncated(K);
    if (!(phi.apply(f.truncated(K)) == f.truncated(K)))
        throw Error("conjugate_by_path: f o phi != f");
    if (!(phi.apply(g0.truncated(K)) == g1.truncated(K)))
        throw Error("conjugate_by_path: g0 o phi != g1");
    return phi;
}

} // namespace germ
