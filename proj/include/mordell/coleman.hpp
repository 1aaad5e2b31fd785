#pragma once

#include <array>
#include <optional>
#include <vector>

#include "mordell/base.hpp"
#include "mordell/finitegroup.hpp"
#include "mordell/localfield.hpp"
#include "mordell/mumford.hpp"

namespace mordell {

// ---------------------------------------------------------------------------
// Truncated power series over K_v
// ---------------------------------------------------------------------------

using Series = std::vector<LocalElem>;  // coefficients ascending, fixed length

inline Series series_const(const LocalField& Kv, size_t len, const LocalElem& c) {
    Series s(len, Kv.zero());
    s[0] = c;
    return s;
}

inline Series series_add(const LocalField& Kv, const Series& a, const Series& b) {
    Series r(a.size(), Kv.zero());
    for (size_t i = 0; i < a.size(); ++i) r[i] = Kv.add(a[i], b[i]);
    return r;
}

inline Series series_sub(const LocalField& Kv, const Series& a, const Series& b) {
    Series r(a.size(), Kv.zero());
    for (size_t i = 0; i < a.size(); ++i) r[i] = Kv.sub(a[i], b[i]);
    return r;
}

inline Series series_mul(const LocalField& Kv, const Series& a, const Series& b) {
    Series r(a.size(), Kv.zero());
    for (size_t i = 0; i < a.size(); ++i) {
        if (Kv.val(a[i]) >= a[i].prec) continue;
        for (size_t j = 0; j + i < a.size(); ++j) r[i + j] = Kv.add(r[i + j], Kv.mul(a[i], b[j]));
    }
    return r;
}

inline Series series_scale(const LocalField& Kv, const LocalElem& c, const Series& a) {
    Series r(a.size(), Kv.zero());
    for (size_t i = 0; i < a.size(); ++i) r[i] = Kv.mul(c, a[i]);
    return r;
}

// inverse of a series with unit constant term (Newton iteration)
inline Series series_inv(const LocalField& Kv, const Series& a) {
    Series r = series_const(Kv, a.size(), Kv.inv(a[0]));
    size_t have = 1;
    while (have < a.size()) {
        // r <- r(2 - a r)
        auto ar = series_mul(Kv, a, r);
        auto two = series_const(Kv, a.size(), Kv.from_int(2));
        r = series_mul(Kv, r, series_sub(Kv, two, ar));
        have *= 2;
    }
    return r;
}

inline Series series_derivative(const LocalField& Kv, const Series& a) {
    Series r(a.size(), Kv.zero());
    for (size_t i = 1; i < a.size(); ++i)
        r[i - 1] = Kv.mul(Kv.from_int(static_cast<long>(i)), a[i]);
    return r;
}

// a(t) / t^k, assuming the low-order coefficients vanish
inline Series series_shift_down(const LocalField& Kv, const Series& a, size_t k) {
    Series r(a.size(), Kv.zero());
    for (size_t i = k; i < a.size(); ++i) r[i - k] = a[i];
    for (size_t i = 0; i < k; ++i)
        if (Kv.val(a[i]) < a[i].prec)
            throw error("series_shift_down: nonzero low-order coefficient");
    return r;
}

inline LocalElem series_eval(const LocalField& Kv, const Series& a, const LocalElem& t) {
    LocalElem acc = Kv.zero();
    for (size_t i = a.size(); i-- > 0;) acc = Kv.add(Kv.mul(acc, t), a[i]);
    return acc;
}

// recenter within the disc: b(s) = a(c + s), valid for val(c) >= 1
inline Series series_taylor_shift(const LocalField& Kv, const Series& a, const LocalElem& c) {
    if (Kv.val(c) < 1) throw error("taylor shift center must have positive valuation");
    // Horner: b = a_n; b = b*(c+s) + a_{n-1}; ... with (c+s) as a series
    Series cs(a.size(), Kv.zero());
    cs[0] = c;
    if (a.size() > 1) cs[1] = Kv.one();
    Series b(a.size(), Kv.zero());
    for (size_t i = a.size(); i-- > 0;) {
        b = series_mul(Kv, b, cs);
        b[0] = Kv.add(b[0], a[i]);
    }
    return b;
}

// ---------------------------------------------------------------------------
// Well-behaved uniformizers
// ---------------------------------------------------------------------------

enum class DiscKind { FiniteOrdinary, FiniteWeierstrass, InfinityDisc };

struct Uniformizer {
    DiscKind kind;
    // center data in the completion; for InfinityDisc the offset is the
    // value of x^2/y at the center (zero when the center is infinity itself)
    LocalElem x0, y0, offset;
    const LocalRing* ring;
};

// local model of the curve at v
struct LocalCurve {
    const LocalRing* ring;
    LocalField Kv;
    PolyOf<LocalField> f;

    LocalCurve(const NumberField& K, const CurveModel<NumberField>& C, const LocalRing& R)
        : ring(&R), Kv(R) {
        for (const auto& c : C.f) f.push_back(embed(K, c, R));
    }
};

inline Uniformizer uniformizer_at(const NumberField& K, const CurveModel<NumberField>& C,
                                  const CurvePoint<NumberField>& Q, const Place& v,
                                  const LocalCurve& LC) {
    if (!is_good_reduction(K, C, v)) throw bad_reduction_error("uniformizer needs good reduction");
    const LocalField& Kv = LC.Kv;
    Uniformizer U;
    U.ring = LC.ring;
    if (Q.infinity) {
        U.kind = DiscKind::InfinityDisc;
        U.x0 = Kv.zero();
        U.y0 = Kv.zero();
        U.offset = Kv.zero();
        return U;
    }
    long vx = valuation_at(K, Q.x, v, LC.ring->digits());
    if (vx < 0) {
        // the point lives in the disc at infinity; t = x^2/y - offset
        U.kind = DiscKind::InfinityDisc;
        U.x0 = embed(K, Q.x, *LC.ring);
        U.y0 = embed(K, Q.y, *LC.ring);
        U.offset = Kv.div(Kv.mul(U.x0, U.x0), U.y0);
        if (Kv.val(U.offset) < 1) throw error("point is not inside the disc at infinity");
        return U;
    }
    U.x0 = embed(K, Q.x, *LC.ring);
    U.y0 = embed(K, Q.y, *LC.ring);
    U.offset = Kv.zero();
    if (Kv.val(U.y0) >= 1) {
        U.kind = DiscKind::FiniteWeierstrass;  // reduction hits y = 0
    } else {
        U.kind = DiscKind::FiniteOrdinary;
    }
    return U;
}

// ---------------------------------------------------------------------------
// Expansion of the basis differentials x^{k-1} dx / y, k = 1, 2
// ---------------------------------------------------------------------------

struct Expansion {
    std::vector<LocalElem> coeffs;  // alpha_j, j = 0..J
    DiscKind kind;
};

namespace detail {

// square root of a series with unit square constant term, root picked by y0
inline Series series_sqrt(const LocalField& Kv, const Series& a, const LocalElem& y0) {
    Series r = series_const(Kv, a.size(), y0);
    auto half = Kv.inv(Kv.from_int(2));
    size_t have = 1;
    while (have < a.size()) {
        auto q = series_mul(Kv, a, series_inv(Kv, r));
        r = series_scale(Kv, half, series_add(Kv, r, q));
        have *= 2;
    }
    return r;
}

inline Series eval_poly_series(const LocalField& Kv, const PolyOf<LocalField>& f,
                               const Series& x) {
    Series acc(x.size(), Kv.zero());
    for (size_t i = f.size(); i-- > 0;) {
        acc = series_mul(Kv, acc, x);
        acc[0] = Kv.add(acc[0], f[i]);
    }
    return acc;
}

}  // namespace detail

// omega_k = x^{k-1} dx / y expanded in the well-behaved uniformizer of U,
// to J + 1 coefficients.
inline Expansion expand_differential(const LocalCurve& LC, const Uniformizer& U, int k,
                                     size_t terms) {
    const LocalField& Kv = LC.Kv;
    size_t L = terms + 2;
    bool shifted = Kv.val(U.offset) < U.offset.prec;  // nonzero offset
    size_t Lwork = shifted ? L + static_cast<size_t>(LC.ring->digits()) : L;
    Series w;  // omega_k / dt before any recentering

    switch (U.kind) {
        case DiscKind::FiniteOrdinary: {
            // t = x - x(Q); y(t) = sqrt(f(x0 + t))
            Series x(Lwork, Kv.zero());
            x[0] = U.x0;
            x[1] = Kv.one();
            auto fx = detail::eval_poly_series(Kv, LC.f, x);
            auto y = detail::series_sqrt(Kv, fx, U.y0);
            auto yinv = series_inv(Kv, y);
            w = (k == 1) ? yinv : series_mul(Kv, x, yinv);
            break;
        }
        case DiscKind::FiniteWeierstrass: {
            // t = y - y(Q); x(t) from f(x) = (y0 + t)^2, Newton from x0
            Series rhs(Lwork, Kv.zero());
            rhs[0] = Kv.mul(U.y0, U.y0);
            rhs[1] = Kv.add(U.y0, U.y0);
            rhs[2] = Kv.one();
            Series x = series_const(Kv, Lwork, U.x0);
            auto fprime = poly_derivative(Kv, LC.f);
            size_t have = 1;
            while (have < Lwork) {
                auto fx = detail::eval_poly_series(Kv, LC.f, x);
                auto err = series_sub(Kv, fx, rhs);
                auto fpx = detail::eval_poly_series(Kv, fprime, x);
                x = series_sub(Kv, x, series_mul(Kv, err, series_inv(Kv, fpx)));
                have *= 2;
            }
            // omega_k / dt = 2 x^{k-1} / f'(x)
            auto fpx = detail::eval_poly_series(Kv, fprime, x);
            auto base = series_scale(Kv, Kv.from_int(2), series_inv(Kv, fpx));
            w = (k == 1) ? base : series_mul(Kv, x, base);
            break;
        }
        case DiscKind::InfinityDisc: {
            // t = x^2/y; x = w(t)/t^2 with w^4 = sum f_j t^{2(5-j)} w^j
            Series ww = series_const(Kv, Lwork, Kv.inv(LC.f[5]));
            size_t have = 1;
            auto tpow = [&](size_t e) {
                Series s(Lwork, Kv.zero());
                if (e < Lwork) s[e] = Kv.one();
                return s;
            };
            while (have < Lwork) {
                // G(w) = f5 w^5 + f4 t^2 w^4 + f3 t^4 w^3 + f2 t^6 w^2
                //        + f1 t^8 w + f0 t^10 - w^4
                Series wj = series_const(Kv, Lwork, Kv.one());
                std::array<Series, 6> pw{};
                for (int j = 0; j <= 5; ++j) {
                    pw[static_cast<size_t>(j)] = wj;
                    if (j < 5) wj = series_mul(Kv, wj, ww);
                }
                Series G(Lwork, Kv.zero());
                Series Gp(Lwork, Kv.zero());
                for (int j = 0; j <= 5; ++j) {
                    auto term = series_scale(Kv, LC.f[static_cast<size_t>(j)],
                                             series_mul(Kv, tpow(static_cast<size_t>(2 * (5 - j))),
                                                        pw[static_cast<size_t>(j)]));
                    G = series_add(Kv, G, term);
                    if (j >= 1) {
                        auto dterm = series_scale(
                            Kv, Kv.mul(Kv.from_int(j), LC.f[static_cast<size_t>(j)]),
                            series_mul(Kv, tpow(static_cast<size_t>(2 * (5 - j))),
                                       pw[static_cast<size_t>(j - 1)]));
                        Gp = series_add(Kv, Gp, dterm);
                    }
                }
                // subtract w^4 and its derivative 4 w^3
                auto w4 = series_mul(Kv, pw[3], ww);
                G = series_sub(Kv, G, w4);
                Gp = series_sub(Kv, Gp, series_scale(Kv, Kv.from_int(4), pw[3]));
                ww = series_sub(Kv, ww, series_mul(Kv, G, series_inv(Kv, Gp)));
                have *= 2;
            }
            auto wprime = series_derivative(Kv, ww);
            if (k == 1) {
                // (t^3 w' - 2 t^2 w) / w^2
                Series num(Lwork, Kv.zero());
                for (size_t i = 0; i + 3 < Lwork; ++i) num[i + 3] = wprime[i];
                Series num2(Lwork, Kv.zero());
                for (size_t i = 0; i + 2 < Lwork; ++i) num2[i + 2] = ww[i];
                num = series_sub(Kv, num, series_scale(Kv, Kv.from_int(2), num2));
                w = series_mul(Kv, num, series_inv(Kv, series_mul(Kv, ww, ww)));
            } else {
                // (t w' - 2 w) / w
                Series num(Lwork, Kv.zero());
                for (size_t i = 0; i + 1 < Lwork; ++i) num[i + 1] = wprime[i];
                num = series_sub(Kv, num, series_scale(Kv, Kv.from_int(2), ww));
                w = series_mul(Kv, num, series_inv(Kv, ww));
            }
            break;
        }
    }

    if (shifted) w = series_taylor_shift(Kv, w, U.offset);
    w.resize(L, Kv.zero());

    Expansion E;
    E.kind = U.kind;
    E.coeffs.assign(w.begin(), w.begin() + static_cast<long>(terms));
    for (const auto& c : E.coeffs)
        if (LC.Kv.val(c) < 0)
            throw error("expansion coefficient fails the integrality invariant");
    return E;
}

// ---------------------------------------------------------------------------
// Tiny integrals
// ---------------------------------------------------------------------------

namespace detail {

inline LocalElem div_by_int(const LocalField& Kv, const LocalElem& a, const Int& n) {
    auto [k, u] = remove_factor(n, Kv.ring().p());
    auto r = Kv.mul(a, Kv.from_mpz(invmod(mod_floor(u, Kv.ring().modulus()), Kv.ring().modulus())));
    return Kv.div_by_p_power(r, k);
}

inline long log_ceil(long n, const Int& p) {
    long l = 0;
    Int pk = 1;
    while (pk < n) { pk *= p; ++l; }
    return l;
}

}  // namespace detail

// integral from the expansion center to a point with parameter value tP
inline LocalElem tiny_integral(const LocalField& Kv, const Expansion& E, const LocalElem& tP) {
    long vt = Kv.val(tP);
    if (vt < 1) throw error("tiny_integral: point is outside the unit ball");
    LocalElem acc = Kv.zero();
    LocalElem tpow = tP;  // t^{j+1}
    int target = Kv.default_prec();
    for (size_t j = 0; j < E.coeffs.size(); ++j) {
        long n = static_cast<long>(j + 1);
        // once (j+1) vt - ceil(log_p(j+1)) clears the target it stays clear
        if (n * vt - detail::log_ceil(n, Kv.ring().p()) >= target) break;
        auto term = detail::div_by_int(Kv, Kv.mul(E.coeffs[j], tpow), Int(n));
        acc = Kv.add(acc, term);
        tpow = Kv.mul(tpow, tP);
    }
    return Kv.with_prec(acc, target);
}

// ---------------------------------------------------------------------------
// Integrals of kernel-of-reduction classes supported near infinity
// ---------------------------------------------------------------------------

// classification of a kernel-of-reduction class by where its support sits
enum class KernelShape {
    Identity,
    NearInfinity,         // all support reduces to infinity
    OrdinaryCollision,    // P and a conjugate of iota(P) share an ordinary disc
    WeierstrassCollision, // both points reduce to the same Weierstrass point
    NotKernel
};

inline KernelShape classify_kernel_class(const LocalCurve& LC, const Mumford<LocalField>& D) {
    const LocalField& Kv = LC.Kv;
    int du = poly_deg<LocalField>(D.u);
    if (du <= 0) return KernelShape::Identity;
    if (du == 1) {
        long v = Kv.val(D.u[0]);
        return (v < 0 && v != VAL_INF) ? KernelShape::NearInfinity : KernelShape::NotKernel;
    }
    long n0 = Kv.val(D.u[0]);
    long n1 = Kv.val(D.u[1]);
    if (n0 < 0 || n1 < 0) {
        bool both = (2 * n1 >= n0) ? (n0 < 0) : (n0 - n1 < 0);
        return both ? KernelShape::NearInfinity : KernelShape::NotKernel;
    }
    // integral u: the two x-coordinates must collide modulo p
    auto xR = Kv.neg(Kv.mul(D.u[1], Kv.inv(Kv.from_int(2))));
    auto quarter_disc = Kv.sub(Kv.mul(xR, xR), D.u[0]);
    if (Kv.val(quarter_disc) < 1) return KernelShape::NotKernel;
    auto fR = poly_eval(Kv, LC.f, xR);
    if (Kv.val(fR) >= 1) return KernelShape::WeierstrassCollision;
    bool v_integral = true;
    for (const auto& c : D.v)
        if (Kv.val(c) < 0) v_integral = false;
    return v_integral ? KernelShape::NotKernel : KernelShape::OrdinaryCollision;
}

// backwards-friendly alias used by the near-infinity-only entry point
inline KernelShape classify_kernel_shape(const LocalField& Kv, const Mumford<LocalField>& D) {
    int du = poly_deg<LocalField>(D.u);
    if (du <= 0) return KernelShape::Identity;
    if (du == 1) {
        long v = Kv.val(D.u[0]);
        return (v < 0 && v != VAL_INF) ? KernelShape::NearInfinity : KernelShape::NotKernel;
    }
    long n0 = Kv.val(D.u[0]);
    long n1 = Kv.val(D.u[1]);
    bool both = (2 * n1 >= n0) ? (n0 < 0) : (n0 - n1 < 0);
    return both ? KernelShape::NearInfinity : KernelShape::NotKernel;
}

namespace detail {

// sum over k >= 1 of alpha_{k-1}/k * p_k where p_k are the power sums of
// the (at most two) uniformizer values with e_1 = sum, e_2 = product;
// v2t is a lower bound for twice the valuation of each value.
inline LocalElem power_sum_integral(const LocalField& Kv, const std::vector<LocalElem>& alpha,
                                    const LocalElem& e1, const LocalElem& e2, bool quadratic,
                                    long v2t, int target) {
    LocalElem pk_prev = Kv.from_int(quadratic ? 2 : 1);
    LocalElem pk = e1;
    LocalElem acc = Kv.zero();
    for (size_t k = 1; k < alpha.size(); ++k) {
        long n = static_cast<long>(k);
        if (n * v2t / 2 - log_ceil(n, Kv.ring().p()) >= target) break;
        auto term = div_by_int(Kv, Kv.mul(alpha[k - 1], pk), Int(n));
        acc = Kv.add(acc, term);
        if (k + 1 < alpha.size()) {
            auto nxt = Kv.sub(Kv.mul(e1, pk), Kv.mul(e2, pk_prev));
            pk_prev = pk;
            pk = nxt;
        }
    }
    return Kv.with_prec(acc, target);
}

// e_1, e_2 of the uniformizer values t_i = x_i^2 / v(x_i) for support near
// infinity, from the Mumford data alone
inline std::pair<LocalElem, LocalElem> infinity_symmetric_data(const LocalField& Kv,
                                                               const Mumford<LocalField>& D,
                                                               bool& quadratic) {
    int du = poly_deg<LocalField>(D.u);
    quadratic = (du == 2);
    if (du == 1) {
        auto a = Kv.neg(D.u[0]);
        auto ya = D.v.empty() ? Kv.zero() : D.v[0];
        return {Kv.div(Kv.mul(a, a), ya), Kv.zero()};
    }
    auto g = poly_xgcd(Kv, D.v, D.u);
    if (poly_deg<LocalField>(g.g) != 0)
        throw not_in_kernel_error("v-polynomial shares support with u");
    auto vinv = poly_scale(Kv, Kv.inv(g.g[0]), g.s);
    PolyOf<LocalField> x2{Kv.zero(), Kv.zero(), Kv.one()};
    auto rho = poly_mod(Kv, poly_mul(Kv, x2, vinv), D.u);
    rho.resize(2, Kv.zero());
    const auto& r0 = rho[0];
    const auto& r1 = rho[1];
    const auto& u0 = D.u[0];
    const auto& u1 = D.u[1];
    auto e1 = Kv.sub(Kv.add(r0, r0), Kv.mul(u1, r1));
    auto e2 = Kv.add(Kv.sub(Kv.mul(r0, r0), Kv.mul(u1, Kv.mul(r0, r1))),
                     Kv.mul(u0, Kv.mul(r1, r1)));
    return {e1, e2};
}

}  // namespace detail

// sum of integrals of omega (expanded at infinity) over the support of D,
// for classes supported near infinity; power sums only, no root extraction.
inline LocalElem kernel_divisor_integral(const LocalCurve& LC, const Mumford<LocalField>& D,
                                         const Expansion& Einf, int target = -1) {
    const LocalField& Kv = LC.Kv;
    if (target < 0) target = Kv.default_prec();
    if (Einf.kind != DiscKind::InfinityDisc)
        throw error("kernel_divisor_integral wants an expansion at infinity");
    auto shape = classify_kernel_shape(Kv, D);
    if (shape == KernelShape::Identity) return Kv.zero();
    if (shape != KernelShape::NearInfinity)
        throw not_in_kernel_error("divisor support does not reduce to infinity");
    bool quadratic = false;
    auto [e1, e2] = detail::infinity_symmetric_data(Kv, D, quadratic);
    long v2t;
    {
        long ve1 = Kv.val(e1);
        long ve2 = quadratic ? Kv.val(e2) : VAL_INF;
        long tw1 = ve1 >= VAL_INF / 2 ? VAL_INF : 2 * ve1;
        v2t = quadratic ? std::min(tw1, ve2) : tw1;
        if (v2t < 1) throw not_in_kernel_error("uniformizer values are not small");
        if (v2t > 2 * Kv.default_prec()) v2t = 2 * Kv.default_prec();
    }
    return detail::power_sum_integral(Kv, Einf.coeffs, e1, e2, quadratic, v2t, target);
}

// ---------------------------------------------------------------------------
// The general kernel-class integral, dispatching on the support shape.
// ---------------------------------------------------------------------------

// integrals of omega_1, omega_2 over a class in the kernel of reduction
inline std::vector<LocalElem> kernel_class_integrals(const LocalCurve& LC,
                                                     const Mumford<LocalField>& D,
                                                     const std::vector<Expansion>& inf_exps,
                                                     int target = -1) {
    const LocalField& Kv = LC.Kv;
    if (target < 0) target = Kv.default_prec();
    auto shape = classify_kernel_class(LC, D);
    std::vector<LocalElem> out;

    switch (shape) {
        case KernelShape::Identity: {
            for (size_t i = 0; i < inf_exps.size(); ++i) out.push_back(Kv.with_prec(Kv.zero(), target));
            return out;
        }
        case KernelShape::NearInfinity: {
            for (const auto& E : inf_exps)
                out.push_back(kernel_divisor_integral(LC, D, E, target));
            return out;
        }
        case KernelShape::WeierstrassCollision: {
            // both points reduce to (x_w, 0); integrate via power sums of
            // the y-values against the expansion at the Weierstrass center
            auto xR = Kv.neg(Kv.mul(D.u[1], Kv.inv(Kv.from_int(2))));
            // Hensel: move xR to the exact root of f in the disc
            auto fprime = poly_derivative(Kv, LC.f);
            auto xw = xR;
            for (int it = 0; it < LC.ring->digits() + 2; ++it) {
                auto fx = poly_eval(Kv, LC.f, xw);
                if (Kv.val(fx) >= Kv.default_prec()) break;
                xw = Kv.sub(xw, Kv.div(fx, poly_eval(Kv, fprime, xw)));
            }
            Uniformizer U;
            U.ring = LC.ring;
            U.kind = DiscKind::FiniteWeierstrass;
            U.x0 = xw;
            U.y0 = Kv.zero();
            U.offset = Kv.zero();
            LocalElem v1 = D.v.size() > 1 ? D.v[1] : Kv.zero();
            LocalElem v0 = D.v.size() > 0 ? D.v[0] : Kv.zero();
            // e1 = y_1 + y_2, e2 = y_1 y_2 from trace/resultant data
            auto e1 = Kv.sub(Kv.add(v0, v0), Kv.mul(D.u[1], v1));
            auto e2 = Kv.add(Kv.sub(Kv.mul(v0, v0), Kv.mul(D.u[1], Kv.mul(v0, v1))),
                             Kv.mul(D.u[0], Kv.mul(v1, v1)));
            long v2t;
            {
                long ve1 = Kv.val(e1);
                long ve2 = Kv.val(e2);
                long tw1 = ve1 >= VAL_INF / 2 ? VAL_INF : 2 * ve1;
                v2t = std::min(tw1, ve2);
                if (v2t < 1) throw not_in_kernel_error("y-values are not small at the collision");
                if (v2t > 2 * target) v2t = 2 * target;
            }
            size_t terms = static_cast<size_t>(2 * target + 16);
            for (int k : {1, 2}) {
                auto E = expand_differential(LC, U, k, terms);
                out.push_back(detail::power_sum_integral(Kv, E.coeffs, e1, e2, true, v2t, target));
            }
            return out;
        }
        case KernelShape::OrdinaryCollision: {
            // I = w * sum_{j even} beta_j/(j+1) (disc/4)^{j/2} with
            // w^2 = (disc/4) / f(x_R) and the sign pinned by the v-polynomial
            auto xR = Kv.neg(Kv.mul(D.u[1], Kv.inv(Kv.from_int(2))));
            auto fR = poly_eval(Kv, LC.f, xR);
            auto D4 = Kv.sub(Kv.mul(xR, xR), D.u[0]);
            long vD = Kv.val(D4);
            if (vD >= 2 * target || vD == VAL_INF) {
                for (int k : {1, 2}) out.push_back(Kv.with_prec(Kv.zero(), target));
                (void)fR;
                return out;
            }
            auto ratio = Kv.div(D4, fR);
            long vr = Kv.val(ratio);
            if (vr % 2 != 0) throw not_in_kernel_error("collision discriminant has odd valuation");
            auto unit = Kv.mul_by_p_power(ratio, -vr);
            // w = (x_1 - x_2)/y_R = 2 sqrt(D4 / f(x_R)); sign fixed below
            auto w = Kv.mul(Kv.from_int(2), Kv.div_by_p_power(hensel_sqrt(Kv, unit), -vr / 2));
            LocalElem v1 = D.v.size() > 1 ? D.v[1] : Kv.zero();
            auto sign_probe = Kv.mul(v1, Kv.mul(w, Kv.inv(Kv.from_int(2))));
            FqField kv = LC.ring->residue_field();
            auto sp = Kv.reduce(sign_probe, kv);
            if (kv.eq(sp, kv.neg(kv.one())))
                w = Kv.neg(w);
            else if (!kv.eq(sp, kv.one()))
                throw not_in_kernel_error("collision orientation is inconsistent");

            size_t terms = static_cast<size_t>(2 * target + 8);
            size_t L = terms + 2;
            // S(t) = 1/sqrt(f(xR + t)/fR), a unit series over K_v
            Series x(L, Kv.zero());
            x[0] = xR;
            x[1] = Kv.one();
            auto fx = detail::eval_poly_series(Kv, LC.f, x);
            auto norm = series_scale(Kv, Kv.inv(fR), fx);
            auto S = series_inv(Kv, detail::series_sqrt(Kv, norm, Kv.one()));
            for (int k : {1, 2}) {
                Series bk = (k == 1) ? S : series_mul(Kv, x, S);
                LocalElem acc = Kv.zero();
                LocalElem dpow = Kv.with_prec(Kv.one(), Kv.default_prec());
                for (size_t j = 0; j < bk.size(); j += 2) {
                    long n = static_cast<long>(j + 1);
                    if (Kv.val(w) + static_cast<long>(j / 2) * vD -
                            detail::log_ceil(n, Kv.ring().p()) >=
                        target)
                        break;
                    auto term = detail::div_by_int(Kv, Kv.mul(bk[j], dpow), Int(n));
                    acc = Kv.add(acc, term);
                    dpow = Kv.mul(dpow, D4);
                }
                out.push_back(Kv.with_prec(Kv.mul(w, acc), target));
            }
            return out;
        }
        case KernelShape::NotKernel:
            break;
    }
    throw not_in_kernel_error("class is not in the kernel of reduction");
}

// ---------------------------------------------------------------------------
// Periods: integrals of the basis differentials against a global divisor
// ---------------------------------------------------------------------------

struct PeriodColumn {
    std::vector<LocalElem> tau;  // per differential omega_1, omega_2
    Int multiplier;              // the m used to land in the kernel
    long p_loss;                 // digits lost dividing the multiplier back out
};

inline Mumford<LocalField> embed_divisor(const NumberField& K, const Mumford<NumberField>& D,
                                         const LocalCurve& LC) {
    Mumford<LocalField> out;
    for (const auto& c : D.u) out.u.push_back(embed(K, c, *LC.ring));
    for (const auto& c : D.v) out.v.push_back(embed(K, c, *LC.ring));
    return out;
}

inline PeriodColumn period_column(const NumberField& K, const CurveModel<NumberField>& C,
                                  const Mumford<NumberField>& D, const LocalCurve& LC,
                                  const Int& group_order,
                                  const std::vector<Expansion>& inf_expansions,
                                  int target = -1) {
    const LocalField& Kv = LC.Kv;
    CurveModel<LocalField> CL;
    CL.f = LC.f;
    CL.lc = LC.f[5];
    CL.disc = Kv.one();  // good reduction is already certified by the caller

    auto base = embed_divisor(K, D, LC);
    auto E = scalar_mul(Kv, CL, group_order, base);

    PeriodColumn out;
    out.multiplier = group_order;
    out.p_loss = ord_at(group_order, Kv.ring().p());
    auto integrals = kernel_class_integrals(LC, E, inf_expansions, target);
    auto [k, u] = remove_factor(group_order, Kv.ring().p());
    Int uinv = invmod(mod_floor(u, Kv.ring().modulus()), Kv.ring().modulus());
    for (auto& I : integrals) {
        auto r = Kv.mul(I, Kv.from_mpz(uinv));
        out.tau.push_back(Kv.div_by_p_power(r, k));
    }
    return out;
}

}  // namespace mordell
