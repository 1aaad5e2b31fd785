#pragma once

#include <string>
#include <vector>

#include "mordell/base.hpp"

namespace mordell {

// Dense univariate polynomials, coefficients ascending.  All arithmetic is
// parametrized by a coefficient-field object F providing:
//   using Elem;  zero() one() from_int(long)
//   add sub neg mul inv div  is_zero eq  encode
// The zero polynomial is the empty vector; every stored polynomial is
// trimmed (nonzero leading coefficient).

template <class F>
using PolyOf = std::vector<typename F::Elem>;

template <class F>
void poly_trim(const F& K, PolyOf<F>& a) {
    while (!a.empty() && K.is_zero(a.back())) a.pop_back();
}

template <class F>
int poly_deg(const PolyOf<F>& a) {
    return static_cast<int>(a.size()) - 1;  // deg 0-poly = -1
}

template <class F>
PolyOf<F> poly_const(const F& K, typename F::Elem c) {
    PolyOf<F> r;
    if (!K.is_zero(c)) r.push_back(std::move(c));
    return r;
}

template <class F>
PolyOf<F> poly_x(const F& K) {
    return {K.zero(), K.one()};
}

template <class F>
PolyOf<F> poly_add(const F& K, const PolyOf<F>& a, const PolyOf<F>& b) {
    PolyOf<F> r(std::max(a.size(), b.size()), K.zero());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] = K.add(r[i], b[i]);
    poly_trim(K, r);
    return r;
}

template <class F>
PolyOf<F> poly_sub(const F& K, const PolyOf<F>& a, const PolyOf<F>& b) {
    PolyOf<F> r(std::max(a.size(), b.size()), K.zero());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] = K.sub(r[i], b[i]);
    poly_trim(K, r);
    return r;
}

template <class F>
PolyOf<F> poly_neg(const F& K, const PolyOf<F>& a) {
    PolyOf<F> r = a;
    for (auto& c : r) c = K.neg(c);
    return r;
}

template <class F>
PolyOf<F> poly_mul(const F& K, const PolyOf<F>& a, const PolyOf<F>& b) {
    if (a.empty() || b.empty()) return {};
    PolyOf<F> r(a.size() + b.size() - 1, K.zero());
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j)
            r[i + j] = K.add(r[i + j], K.mul(a[i], b[j]));
    poly_trim(K, r);
    return r;
}

template <class F>
PolyOf<F> poly_scale(const F& K, const typename F::Elem& c, const PolyOf<F>& a) {
    if (K.is_zero(c)) return {};
    PolyOf<F> r = a;
    for (auto& x : r) x = K.mul(c, x);
    poly_trim(K, r);
    return r;
}

template <class F>
std::pair<PolyOf<F>, PolyOf<F>> poly_divmod(const F& K, PolyOf<F> a, const PolyOf<F>& b) {
    if (b.empty()) throw division_by_zero_error("polynomial division by zero");
    PolyOf<F> q(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, K.zero());
    auto lcinv = K.inv(b.back());
    while (a.size() >= b.size() && !a.empty()) {
        auto c = K.mul(a.back(), lcinv);
        size_t k = a.size() - b.size();
        q[k] = c;
        for (size_t i = 0; i < b.size(); ++i) a[k + i] = K.sub(a[k + i], K.mul(c, b[i]));
        poly_trim(K, a);
    }
    poly_trim(K, q);
    return {std::move(q), std::move(a)};
}

template <class F>
PolyOf<F> poly_mod(const F& K, PolyOf<F> a, const PolyOf<F>& b) {
    return poly_divmod(K, std::move(a), b).second;
}

template <class F>
PolyOf<F> poly_monic(const F& K, const PolyOf<F>& a) {
    if (a.empty()) return a;
    return poly_scale(K, K.inv(a.back()), a);
}

// g = s*a + t*b, g monic (or zero when a = b = 0).
template <class F>
struct XgcdResult {
    PolyOf<F> g, s, t;
};

template <class F>
XgcdResult<F> poly_xgcd(const F& K, const PolyOf<F>& a, const PolyOf<F>& b) {
    PolyOf<F> r0 = a, r1 = b;
    PolyOf<F> s0 = poly_const(K, K.one()), s1{};
    PolyOf<F> t0{}, t1 = poly_const(K, K.one());
    while (!r1.empty()) {
        auto [q, r] = poly_divmod(K, r0, r1);
        r0 = r1; r1 = r;
        auto s2 = poly_sub(K, s0, poly_mul(K, q, s1));
        s0 = s1; s1 = s2;
        auto t2 = poly_sub(K, t0, poly_mul(K, q, t1));
        t0 = t1; t1 = t2;
    }
    if (!r0.empty()) {
        auto c = K.inv(r0.back());
        r0 = poly_scale(K, c, r0);
        s0 = poly_scale(K, c, s0);
        t0 = poly_scale(K, c, t0);
    }
    return {std::move(r0), std::move(s0), std::move(t0)};
}

template <class F>
PolyOf<F> poly_gcd(const F& K, const PolyOf<F>& a, const PolyOf<F>& b) {
    PolyOf<F> r0 = a, r1 = b;
    while (!r1.empty()) {
        auto r = poly_mod(K, r0, r1);
        r0 = r1; r1 = r;
    }
    return poly_monic(K, r0);
}

template <class F>
typename F::Elem poly_eval(const F& K, const PolyOf<F>& a, const typename F::Elem& x) {
    auto r = K.zero();
    for (auto it = a.rbegin(); it != a.rend(); ++it) r = K.add(K.mul(r, x), *it);
    return r;
}

template <class F>
PolyOf<F> poly_derivative(const F& K, const PolyOf<F>& a) {
    PolyOf<F> r;
    for (size_t i = 1; i < a.size(); ++i) r.push_back(K.mul(K.from_int(static_cast<long>(i)), a[i]));
    poly_trim(K, r);
    return r;
}

template <class F>
PolyOf<F> poly_pow_mod(const F& K, PolyOf<F> base, Int e, const PolyOf<F>& m) {
    PolyOf<F> r = poly_const(K, K.one());
    base = poly_mod(K, std::move(base), m);
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) r = poly_mod(K, poly_mul(K, r, base), m);
        e >>= 1;
        if (e > 0) base = poly_mod(K, poly_mul(K, base, base), m);
    }
    return r;
}

// Resultant via the Euclidean remainder sequence (coefficients in a field).
template <class F>
typename F::Elem poly_resultant(const F& K, PolyOf<F> a, PolyOf<F> b) {
    if (a.empty() || b.empty()) return K.zero();
    auto res = K.one();
    bool negate = false;
    while (true) {
        if (b.size() == 1) {
            // res *= b[0]^deg(a)
            auto acc = K.one();
            for (int i = 0; i < poly_deg<F>(a); ++i) acc = K.mul(acc, b[0]);
            res = K.mul(res, acc);
            break;
        }
        auto r = poly_mod(K, a, b);
        if (r.empty()) return K.zero();
        int da = poly_deg<F>(a), db = poly_deg<F>(b), dr = poly_deg<F>(r);
        if ((static_cast<long>(da) * db) % 2 == 1) negate = !negate;
        // res *= lc(b)^(da - dr)
        auto acc = K.one();
        for (int i = 0; i < da - dr; ++i) acc = K.mul(acc, b.back());
        res = K.mul(res, acc);
        a = std::move(b);
        b = std::move(r);
    }
    return negate ? K.neg(res) : res;
}

template <class F>
typename F::Elem poly_discriminant(const F& K, const PolyOf<F>& a) {
    int n = poly_deg<F>(a);
    if (n < 1) throw wrong_degree_error("discriminant needs degree >= 1");
    auto res = poly_resultant(K, a, poly_derivative(K, a));
    auto d = K.div(res, a.back());
    // sign (-1)^{n(n-1)/2}
    if ((static_cast<long>(n) * (n - 1) / 2) % 2 == 1) d = K.neg(d);
    return d;
}

template <class F>
std::string poly_encode(const F& K, const PolyOf<F>& a) {
    std::string s = "[";
    for (size_t i = 0; i < a.size(); ++i) {
        if (i) s += ',';
        s += K.encode(a[i]);
    }
    s += ']';
    return s;
}

}  // namespace mordell
