#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mordell/base.hpp"
#include "mordell/finitefield.hpp"
#include "mordell/localfield.hpp"
#include "mordell/numberfield.hpp"
#include "mordell/poly.hpp"

namespace mordell {

// ---------------------------------------------------------------------------
// Genus-2 curves y^2 = f(x), deg f = 5, over an abstract coefficient field.
// ---------------------------------------------------------------------------

template <class F>
struct CurveModel {
    PolyOf<F> f;
    typename F::Elem disc;
    typename F::Elem lc;
};

template <class F>
CurveModel<F> validate_curve(const F& K, const PolyOf<F>& f) {
    if (poly_deg<F>(f) != 5)
        throw wrong_degree_error("curve model must have degree 5");
    CurveModel<F> C;
    C.f = f;
    C.lc = f.back();
    C.disc = poly_discriminant(K, f);
    if (K.is_zero(C.disc)) throw singular_model_error("curve model has zero discriminant");
    return C;
}

template <class F>
struct CurvePoint {
    bool infinity = true;
    typename F::Elem x{}, y{};

    static CurvePoint at_infinity() { return CurvePoint{}; }
    static CurvePoint affine(typename F::Elem px, typename F::Elem py) {
        CurvePoint P;
        P.infinity = false;
        P.x = std::move(px);
        P.y = std::move(py);
        return P;
    }
};

template <class F>
bool on_curve(const F& K, const CurveModel<F>& C, const CurvePoint<F>& P) {
    if (P.infinity) return true;
    return K.eq(K.mul(P.y, P.y), poly_eval(K, C.f, P.x));
}

template <class F>
CurvePoint<F> involution(const F& K, const CurvePoint<F>& P) {
    if (P.infinity) return P;
    return CurvePoint<F>::affine(P.x, K.neg(P.y));
}

// ---------------------------------------------------------------------------
// Mumford representation: u monic, deg u <= 2, v reduced mod u, u | v^2 - f.
// The identity is (1, 0).
// ---------------------------------------------------------------------------

template <class F>
struct Mumford {
    PolyOf<F> u, v;
};

template <class F>
Mumford<F> mumford_identity(const F& K) {
    return {poly_const(K, K.one()), {}};
}

template <class F>
bool mumford_is_identity(const F& K, const Mumford<F>& D) {
    return poly_deg<F>(D.u) == 0 && D.v.empty() && !D.u.empty() && K.eq(D.u[0], K.one());
}

template <class F>
bool mumford_eq(const F& K, const Mumford<F>& a, const Mumford<F>& b) {
    if (a.u.size() != b.u.size() || a.v.size() != b.v.size()) return false;
    for (size_t i = 0; i < a.u.size(); ++i)
        if (!K.eq(a.u[i], b.u[i])) return false;
    for (size_t i = 0; i < a.v.size(); ++i)
        if (!K.eq(a.v[i], b.v[i])) return false;
    return true;
}

template <class F>
std::string mumford_key(const F& K, const Mumford<F>& D) {
    return poly_encode(K, D.u) + ";" + poly_encode(K, D.v);
}

// Validated construction from a Mumford pair.
template <class F>
Mumford<F> mumford_make(const F& K, const CurveModel<F>& C, PolyOf<F> u, PolyOf<F> v) {
    if (u.empty()) throw not_on_jacobian_error("u must be nonzero");
    u = poly_monic(K, u);
    v = poly_mod(K, std::move(v), u);
    auto rem = poly_mod(K, poly_sub(K, poly_mul(K, v, v), C.f), u);
    if (!rem.empty()) throw not_on_jacobian_error("u does not divide v^2 - f");
    return {std::move(u), std::move(v)};
}

// [P - infinity]
template <class F>
Mumford<F> mumford_from_point(const F& K, const CurveModel<F>& C, const CurvePoint<F>& P) {
    if (P.infinity) return mumford_identity(K);
    if (!on_curve(K, C, P)) throw not_on_jacobian_error("point not on curve");
    PolyOf<F> u{K.neg(P.x), K.one()};
    PolyOf<F> v = poly_const(K, P.y);
    return {std::move(u), std::move(v)};
}

template <class F>
Mumford<F> mumford_neg(const F& K, const Mumford<F>& D) {
    return {D.u, poly_neg(K, D.v)};
}

// Cantor composition + reduction.  Handles all degenerate configurations
// (shared support, Weierstrass points, deg-1 inputs) through the gcd chain.
template <class F>
Mumford<F> cantor_add(const F& K, const CurveModel<F>& C, const Mumford<F>& D1,
                      const Mumford<F>& D2) {
    const auto& u1 = D1.u;
    const auto& v1 = D1.v;
    const auto& u2 = D2.u;
    const auto& v2 = D2.v;

    auto g1 = poly_xgcd(K, u1, u2);                       // g1.g = e1 u1 + e2 u2
    auto g2 = poly_xgcd(K, g1.g, poly_add(K, v1, v2));    // d = c1 g1.g + c2 (v1+v2)
    const auto& d = g2.g;
    auto s1 = poly_mul(K, g2.s, g1.s);
    auto s2 = poly_mul(K, g2.s, g1.t);
    const auto& s3 = g2.t;

    auto u = poly_divmod(K, poly_mul(K, u1, u2), poly_mul(K, d, d)).first;
    auto num = poly_add(K, poly_add(K, poly_mul(K, poly_mul(K, s1, u1), v2),
                                    poly_mul(K, poly_mul(K, s2, u2), v1)),
                        poly_mul(K, s3, poly_add(K, poly_mul(K, v1, v2), C.f)));
    auto v = poly_mod(K, poly_divmod(K, num, d).first, u);

    while (poly_deg<F>(u) > 2) {
        auto u_next = poly_divmod(K, poly_sub(K, C.f, poly_mul(K, v, v)), u).first;
        u_next = poly_monic(K, u_next);
        v = poly_mod(K, poly_neg(K, v), u_next);
        u = std::move(u_next);
    }
    u = poly_monic(K, u);
    v = poly_mod(K, v, u);
    return {std::move(u), std::move(v)};
}

template <class F>
Mumford<F> cantor_sub(const F& K, const CurveModel<F>& C, const Mumford<F>& D1,
                      const Mumford<F>& D2) {
    return cantor_add(K, C, D1, mumford_neg(K, D2));
}

template <class F>
Mumford<F> scalar_mul(const F& K, const CurveModel<F>& C, Int n, const Mumford<F>& D) {
    Mumford<F> base = D;
    if (n < 0) {
        base = mumford_neg(K, base);
        n = -n;
    }
    Mumford<F> acc = mumford_identity(K);
    while (n > 0) {
        if (mpz_odd_p(n.get_mpz_t())) acc = cantor_add(K, C, acc, base);
        n >>= 1;
        if (n > 0) base = cantor_add(K, C, base, base);
    }
    return acc;
}

// Abel-Jacobi map with base point P0: [P - P0].
template <class F>
Mumford<F> abel_jacobi(const F& K, const CurveModel<F>& C, const CurvePoint<F>& P,
                       const CurvePoint<F>& P0) {
    auto DP = mumford_from_point(K, C, P);
    auto D0 = mumford_from_point(K, C, P0);
    return cantor_sub(K, C, DP, D0);
}

// [P1 + P2 - 2*infinity]
template <class F>
Mumford<F> mumford_from_point_pair(const F& K, const CurveModel<F>& C, const CurvePoint<F>& P1,
                                   const CurvePoint<F>& P2) {
    return cantor_add(K, C, mumford_from_point(K, C, P1), mumford_from_point(K, C, P2));
}

// ---------------------------------------------------------------------------
// Reduction J(K) -> J(k_v) at a place of good reduction.
// ---------------------------------------------------------------------------

inline bool is_good_reduction(const NumberField& K, const CurveModel<NumberField>& C,
                              const Place& v) {
    if (v.p == 2) return false;
    if (valuation_at(K, C.lc, v) != 0) return false;
    if (valuation_at(K, C.disc, v) != 0) return false;
    // model must be v-integral
    for (const auto& c : C.f)
        if (!K.is_zero(c) && valuation_at(K, c, v) < 0) return false;
    return true;
}

// Reduction of a v-integral element.  Coordinates may carry p-powers in
// their denominators (contributed by the other places over p), so the map
// goes through the completion rather than reducing coordinatewise.
inline FqField::Elem reduce_nf(const NumberField& K, const NfElem& x, const Place& v,
                               const FqField& kv) {
    Int den = K.denominator(x);
    long k = (den == 1) ? 0 : remove_factor(den, v.p).first;
    LocalRing R(K, v, static_cast<int>(k) + 2);
    LocalField Kv(R);
    return Kv.reduce(embed(K, x, R), kv);
}

inline PolyOf<FqField> reduce_poly_nf(const NumberField& K, const PolyOf<NumberField>& a,
                                      const Place& v, const FqField& kv) {
    PolyOf<FqField> r;
    for (const auto& c : a) r.push_back(reduce_nf(K, c, v, kv));
    poly_trim(kv, r);
    return r;
}

inline CurveModel<FqField> reduce_curve(const NumberField& K, const CurveModel<NumberField>& C,
                                        const Place& v, const FqField& kv) {
    if (!is_good_reduction(K, C, v)) throw bad_reduction_error("bad reduction at " + v.label());
    return validate_curve(kv, reduce_poly_nf(K, C.f, v, kv));
}

namespace detail {

inline long nf_val(const NumberField& K, const NfElem& x, const Place& v) {
    return valuation_at(K, x, v);
}

}  // namespace detail

// Reduce a divisor class.  Coefficientwise on the v-integral locus; support
// with negative x-valuation drops to infinity, and colliding reductions are
// resolved through resultant/trace data, so no root extraction is needed.
inline Mumford<FqField> reduce_divisor(const NumberField& K, const CurveModel<NumberField>& C,
                                       const Mumford<NumberField>& D, const Place& v,
                                       const FqField& kv, const CurveModel<FqField>& Cv) {
    using detail::nf_val;
    int du = poly_deg<NumberField>(D.u);
    if (du <= 0) return mumford_identity(kv);

    if (du == 1) {
        const NfElem& a = K.neg(D.u[0]);
        if (nf_val(K, a, v) < 0) return mumford_identity(kv);
        NfElem y = D.v.empty() ? K.zero() : D.v[0];
        auto pt = CurvePoint<FqField>::affine(reduce_nf(K, a, v, kv), reduce_nf(K, y, v, kv));
        return mumford_from_point(kv, Cv, pt);
    }

    // deg u = 2
    const NfElem& u0 = D.u[0];
    const NfElem& u1 = D.u[1];
    long n0 = nf_val(K, u0, v);
    long n1 = nf_val(K, u1, v);

    if (n0 >= 0 && n1 >= 0) {
        bool v_integral = true;
        for (const auto& c : D.v)
            if (nf_val(K, c, v) < 0) v_integral = false;
        if (v_integral) {
            auto ru = reduce_poly_nf(K, D.u, v, kv);
            auto rv = reduce_poly_nf(K, D.v, v, kv);
            return mumford_make(kv, Cv, ru, rv);
        }
        // support collides modulo v; decide the configuration exactly
        NfElem v1 = D.v.size() > 1 ? D.v[1] : K.zero();
        NfElem v0 = D.v.size() > 0 ? D.v[0] : K.zero();
        NfElem res = K.add(K.mul(v0, v0),
                           K.add(K.neg(K.mul(u1, K.mul(v0, v1))), K.mul(u0, K.mul(v1, v1))));
        NfElem tr = K.sub(K.mul(K.from_int(2), v0), K.mul(u1, v1));  // y1 + y2
        auto xbar = kv.neg(kv.mul(reduce_nf(K, u1, v, kv), kv.inv(kv.from_int(2))));
        auto fx = poly_eval(kv, Cv.f, xbar);
        if (nf_val(K, res, v) >= 1) {
            // y1 y2 = 0 mod v forces a doubled Weierstrass point: the class dies
            if (!kv.is_zero(fx))
                throw error("reduce_divisor: inconsistent Weierstrass collision");
            return mumford_identity(kv);
        }
        auto sbar = reduce_nf(K, res, v, kv);
        if (kv.eq(sbar, kv.neg(fx))) return mumford_identity(kv);  // P + iota(P)
        if (!kv.eq(sbar, fx)) throw error("reduce_divisor: collision classification failed");
        // doubled affine point (xbar, ybar), tangent line as v-polynomial
        auto ybar = kv.mul(reduce_nf(K, tr, v, kv), kv.inv(kv.from_int(2)));
        auto fprime = poly_eval(kv, poly_derivative(kv, Cv.f), xbar);
        auto lambda = kv.div(fprime, kv.add(ybar, ybar));
        PolyOf<FqField> ru{kv.mul(xbar, xbar), kv.neg(kv.add(xbar, xbar)), kv.one()};
        PolyOf<FqField> rv{kv.sub(ybar, kv.mul(lambda, xbar)), lambda};
        poly_trim(kv, rv);
        return mumford_make(kv, Cv, ru, rv);
    }

    bool both_infinite =
        (2 * n1 >= n0) ? (n0 < 0) : (n0 - n1 < 0);
    if (both_infinite) return mumford_identity(kv);

    // exactly one root is integral: iterate c <- -u0/(u1 + c) to converge to
    // it inside K, far enough to read off the reduced point
    long vv1 = D.v.size() > 1 ? nf_val(K, D.v[1], v) : VAL_INF;
    long gain = n0 - 2 * n1;  // >= 1 here
    long need = 1 + std::max(0L, -std::min(vv1, 0L)) + std::max(0L, -(n0 - n1));
    long steps = 2 + (need + gain - 1) / gain;
    if (steps > 80) throw precision_exhausted_error("reduce_divisor: slow convergence");
    NfElem c = K.zero();
    for (long i = 0; i < steps; ++i) c = K.neg(K.div(u0, K.add(u1, c)));
    Rationals Q;
    (void)Q;
    NfElem yc = K.zero();
    {
        // evaluate v at c
        NfElem acc = K.zero();
        for (auto it = D.v.rbegin(); it != D.v.rend(); ++it) acc = K.add(K.mul(acc, c), *it);
        yc = acc;
    }
    if (nf_val(K, poly_eval(K, C.f, c), v) < 0 || nf_val(K, yc, v) < 0)
        throw error("reduce_divisor: integral-root iteration failed");
    auto pt = CurvePoint<FqField>::affine(reduce_nf(K, c, v, kv), reduce_nf(K, yc, v, kv));
    if (!on_curve(kv, Cv, pt)) throw error("reduce_divisor: reduced point not on curve");
    return mumford_from_point(kv, Cv, pt);
}

// Reduction of a point (for Abel-Jacobi images); null when P hits infinity.
inline CurvePoint<FqField> reduce_point(const NumberField& K, const CurvePoint<NumberField>& P,
                                        const Place& v, const FqField& kv) {
    if (P.infinity) return CurvePoint<FqField>::at_infinity();
    if (valuation_at(K, P.x, v) < 0) return CurvePoint<FqField>::at_infinity();
    return CurvePoint<FqField>::affine(reduce_nf(K, P.x, v, kv), reduce_nf(K, P.y, v, kv));
}

}  // namespace mordell
