#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "mordell/base.hpp"
#include "mordell/poly.hpp"

namespace mordell {

// ---------------------------------------------------------------------------
// F_p
// ---------------------------------------------------------------------------

class PrimeField {
  public:
    using Elem = u64;

    explicit PrimeField(u64 p) : p_(p) {}
    u64 characteristic() const { return p_; }
    Int order() const { return Int(static_cast<unsigned long>(p_)); }

    Elem zero() const { return 0; }
    Elem one() const { return 1 % p_; }
    Elem from_int(long v) const {
        long m = v % static_cast<long>(p_);
        if (m < 0) m += static_cast<long>(p_);
        return static_cast<u64>(m);
    }
    Elem from_mpz(const Int& v) const {
        Int m = mod_floor(v, Int(static_cast<unsigned long>(p_)));
        return m.get_ui();
    }
    Elem add(Elem a, Elem b) const { return addmod(a, b, p_); }
    Elem sub(Elem a, Elem b) const { return submod(a, b, p_); }
    Elem neg(Elem a) const { return a ? p_ - a : 0; }
    Elem mul(Elem a, Elem b) const { return mulmod(a, b, p_); }
    Elem inv(Elem a) const { return invmod(a, p_); }
    Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }
    bool is_zero(Elem a) const { return a == 0; }
    bool eq(Elem a, Elem b) const { return a == b; }
    std::string encode(Elem a) const { return std::to_string(a); }

    bool is_square(Elem a) const {
        if (a == 0) return true;
        return powmod(a, (p_ - 1) / 2, p_) == 1;
    }

    Elem from_index(const Int& idx) const { return mod_floor(idx, order()).get_ui(); }
    Int to_index(Elem a) const { return Int(static_cast<unsigned long>(a)); }

    // Tonelli-Shanks; p odd.
    Elem sqrt(Elem a) const {
        if (a == 0) return 0;
        if (!is_square(a)) throw not_a_square_error("sqrt of non-residue in F_p");
        if (p_ % 4 == 3) return powmod(a, (p_ + 1) / 4, p_);
        u64 q = p_ - 1, s = 0;
        while (q % 2 == 0) { q /= 2; ++s; }
        u64 z = 2;
        while (is_square(z)) ++z;
        u64 m = s, c = powmod(z, q, p_), t = powmod(a, q, p_), r = powmod(a, (q + 1) / 2, p_);
        while (t != 1) {
            u64 i = 0, tt = t;
            while (tt != 1) { tt = mulmod(tt, tt, p_); ++i; }
            u64 b = c;
            for (u64 k = 0; k + i + 1 < m; ++k) b = mulmod(b, b, p_);
            m = i;
            c = mulmod(b, b, p_);
            t = mulmod(t, c, p_);
            r = mulmod(r, b, p_);
        }
        return r;
    }

  private:
    u64 p_;
};

// ---------------------------------------------------------------------------
// F_p[x] factorization helpers (distinct-degree + Cantor-Zassenhaus splits).
// Degrees here are tiny (defining polynomials of the number field), so the
// plain algorithms are more than enough.
// ---------------------------------------------------------------------------

using FpPoly = PolyOf<PrimeField>;

inline bool fp_squarefree(const PrimeField& F, const FpPoly& f) {
    auto g = poly_gcd(F, f, poly_derivative(F, f));
    return poly_deg<PrimeField>(g) == 0;
}

namespace detail {

template <class F>
typename F::Elem random_field_elem(const F& K, const Int& q, std::mt19937_64& rng) {
    Int i = mod_floor(Int(static_cast<unsigned long>(rng())) *
                          Int(static_cast<unsigned long>(rng() | 1)),
                      q);
    return K.from_index(i);
}

template <class F>
void fq_equal_degree_split(const F& K, const Int& q, const PolyOf<F>& f, int d,
                           std::vector<PolyOf<F>>& out, std::mt19937_64& rng) {
    int n = poly_deg<F>(f);
    if (n == d) {
        out.push_back(poly_monic(K, f));
        return;
    }
    Int qd = 1;
    for (int i = 0; i < d; ++i) qd *= q;
    while (true) {
        PolyOf<F> a(static_cast<size_t>(n), K.zero());
        for (auto& c : a) c = random_field_elem(K, q, rng);
        poly_trim(K, a);
        if (poly_deg<F>(a) < 1) continue;
        auto g = poly_gcd(K, a, f);
        if (poly_deg<F>(g) > 0 && poly_deg<F>(g) < n) {
            fq_equal_degree_split(K, q, g, d, out, rng);
            fq_equal_degree_split(K, q, poly_divmod(K, f, g).first, d, out, rng);
            return;
        }
        auto b = poly_pow_mod(K, a, (qd - 1) / 2, f);
        b = poly_sub(K, b, poly_const(K, K.one()));
        g = poly_gcd(K, b, f);
        if (poly_deg<F>(g) > 0 && poly_deg<F>(g) < n) {
            fq_equal_degree_split(K, q, g, d, out, rng);
            fq_equal_degree_split(K, q, poly_divmod(K, f, g).first, d, out, rng);
            return;
        }
    }
}

}  // namespace detail

// Factor a squarefree monic polynomial over a finite field of odd order q.
// Distinct-degree first, then seeded Cantor-Zassenhaus splits.
template <class F>
std::vector<PolyOf<F>> fq_factor_squarefree(const F& K, const Int& q, PolyOf<F> f, u64 seed = 42) {
    std::vector<PolyOf<F>> out;
    f = poly_monic(K, f);
    std::mt19937_64 rng(seed ^ 0x5bf03635u);
    auto x = poly_x(K);
    auto h = x;  // x^{q^d} mod f, iterated
    int d = 0;
    while (poly_deg<F>(f) > 0) {
        ++d;
        if (2 * d > poly_deg<F>(f)) {
            out.push_back(f);  // irreducible remainder
            break;
        }
        h = poly_pow_mod(K, h, q, f);
        auto g = poly_gcd(K, poly_sub(K, h, x), f);
        if (poly_deg<F>(g) > 0) {
            detail::fq_equal_degree_split(K, q, g, d, out, rng);
            f = poly_divmod(K, f, g).first;
            h = poly_mod(K, h, f);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<FpPoly> fp_factor_squarefree(const PrimeField& F, FpPoly f, u64 seed = 42) {
    return fq_factor_squarefree(F, F.order(), std::move(f), seed ^ (F.characteristic() << 16));
}

// ---------------------------------------------------------------------------
// F_q = F_p[x]/(g), g monic irreducible of small degree.
// ---------------------------------------------------------------------------

class FqField {
  public:
    // Elements are coefficient vectors of fixed length deg(g).
    using Elem = std::vector<u64>;

    FqField(u64 p, FpPoly modulus) : fp_(p), mod_(std::move(modulus)) {
        m_ = static_cast<size_t>(poly_deg<PrimeField>(mod_));
        if (m_ < 1) throw wrong_degree_error("field modulus must have degree >= 1");
        q_ = 1;
        for (size_t i = 0; i < m_; ++i) q_ = q_ * Int(static_cast<unsigned long>(p));
    }

    u64 characteristic() const { return fp_.characteristic(); }
    const PrimeField& prime_field() const { return fp_; }
    const FpPoly& modulus() const { return mod_; }
    size_t degree() const { return m_; }
    const Int& order() const { return q_; }

    Elem zero() const { return Elem(m_, 0); }
    Elem one() const { Elem e(m_, 0); e[0] = fp_.one(); return e; }
    Elem from_int(long v) const { Elem e(m_, 0); e[0] = fp_.from_int(v); return e; }
    Elem gen() const {
        Elem e(m_, 0);
        if (m_ == 1) {
            // x == root of a linear modulus
            e[0] = fp_.neg(mod_[0]);
        } else {
            e[1] = 1;
        }
        return e;
    }
    Elem from_poly(const FpPoly& a) const {
        auto r = poly_mod(fp_, a, mod_);
        r.resize(m_, 0);
        return r;
    }

    Elem add(const Elem& a, const Elem& b) const {
        Elem r(m_);
        for (size_t i = 0; i < m_; ++i) r[i] = fp_.add(a[i], b[i]);
        return r;
    }
    Elem sub(const Elem& a, const Elem& b) const {
        Elem r(m_);
        for (size_t i = 0; i < m_; ++i) r[i] = fp_.sub(a[i], b[i]);
        return r;
    }
    Elem neg(const Elem& a) const {
        Elem r(m_);
        for (size_t i = 0; i < m_; ++i) r[i] = fp_.neg(a[i]);
        return r;
    }
    Elem mul(const Elem& a, const Elem& b) const {
        if (m_ == 1) return {fp_.mul(a[0], b[0])};
        std::vector<u64> t(2 * m_ - 1, 0);
        for (size_t i = 0; i < m_; ++i) {
            if (!a[i]) continue;
            for (size_t j = 0; j < m_; ++j)
                if (b[j]) t[i + j] = fp_.add(t[i + j], fp_.mul(a[i], b[j]));
        }
        // reduce by the monic modulus
        for (size_t k = t.size(); k-- > m_;) {
            u64 c = t[k];
            if (!c) continue;
            t[k] = 0;
            for (size_t i = 0; i < m_; ++i)
                t[k - m_ + i] = fp_.sub(t[k - m_ + i], fp_.mul(c, mod_[i]));
        }
        t.resize(m_);
        return t;
    }
    bool is_zero(const Elem& a) const {
        for (auto c : a) if (c) return false;
        return true;
    }
    bool eq(const Elem& a, const Elem& b) const { return a == b; }
    Elem inv(const Elem& a) const {
        if (is_zero(a)) throw division_by_zero_error("inverse of zero in F_q");
        if (m_ == 1) return {fp_.inv(a[0])};
        FpPoly ap(a.begin(), a.end());
        poly_trim(fp_, ap);
        auto r = poly_xgcd(fp_, ap, mod_);
        if (poly_deg<PrimeField>(r.g) != 0) throw error("modulus not irreducible");
        auto out = r.s;
        out.resize(m_, 0);
        return out;
    }
    Elem div(const Elem& a, const Elem& b) const { return mul(a, inv(b)); }
    Elem pow(Elem a, Int e) const {
        Elem r = one();
        if (e < 0) { a = inv(a); e = -e; }
        while (e > 0) {
            if (mpz_odd_p(e.get_mpz_t())) r = mul(r, a);
            e >>= 1;
            if (e > 0) a = mul(a, a);
        }
        return r;
    }
    std::string encode(const Elem& a) const {
        std::string s;
        for (size_t i = 0; i < m_; ++i) {
            if (i) s += ':';
            s += std::to_string(a[i]);
        }
        return s;
    }

    bool is_square(const Elem& a) const {
        if (is_zero(a)) return true;
        return eq(pow(a, (q_ - 1) / 2), one());
    }
    Elem sqrt(const Elem& a) const {
        if (is_zero(a)) return a;
        if (!is_square(a)) throw not_a_square_error("sqrt of non-residue in F_q");
        // Tonelli-Shanks over F_q
        Int q1 = q_ - 1;
        unsigned long s = 0;
        Int q0 = q1;
        while (mpz_even_p(q0.get_mpz_t())) { q0 /= 2; ++s; }
        // find non-residue
        Elem z = gen();
        std::mt19937_64 rng(7);
        while (is_square(z)) {
            Elem c(m_);
            for (auto& v : c) v = rng() % characteristic();
            if (is_zero(c)) continue;
            z = c;
        }
        unsigned long m = s;
        Elem c = pow(z, q0), t = pow(a, q0), r = pow(a, (q0 + 1) / 2);
        while (!eq(t, one())) {
            unsigned long i = 0;
            Elem tt = t;
            while (!eq(tt, one())) { tt = mul(tt, tt); ++i; }
            Elem b = c;
            for (unsigned long k = 0; k + i + 1 < m; ++k) b = mul(b, b);
            m = i;
            c = mul(b, b);
            t = mul(t, c);
            r = mul(r, b);
        }
        return r;
    }

    Int to_index(const Elem& a) const {
        Int idx = 0;
        Int p(static_cast<unsigned long>(characteristic()));
        for (size_t i = m_; i-- > 0;) idx = idx * p + Int(static_cast<unsigned long>(a[i]));
        return idx;
    }

    // index <-> element, for enumeration loops
    Elem from_index(Int idx) const {
        Elem e(m_);
        Int p(static_cast<unsigned long>(characteristic()));
        for (size_t i = 0; i < m_; ++i) {
            Int r = mod_floor(idx, p);
            e[i] = r.get_ui();
            idx /= p;
        }
        return e;
    }

    // A monic irreducible quadratic x^2 - n with n a non-residue (p odd).
    Elem quadratic_nonresidue() const {
        for (Int i = 1; i < order(); ++i) {
            Elem c = from_index(i);
            if (!is_square(c)) return c;
        }
        throw error("no quadratic non-residue found");
    }

  private:
    PrimeField fp_;
    FpPoly mod_;
    size_t m_;
    Int q_;
};

// F_{q^2} = F_q[y]/(y^2 - ns).  Elements are pairs over FqField.
class Fq2Field {
  public:
    using Elem = std::pair<FqField::Elem, FqField::Elem>;

    explicit Fq2Field(const FqField& base) : base_(base), ns_(base.quadratic_nonresidue()) {
        q2_ = base.order() * base.order();
    }

    const FqField& base() const { return base_; }
    const Int& order() const { return q2_; }

    Elem zero() const { return {base_.zero(), base_.zero()}; }
    Elem one() const { return {base_.one(), base_.zero()}; }
    Elem from_int(long v) const { return {base_.from_int(v), base_.zero()}; }
    Elem lift(const FqField::Elem& a) const { return {a, base_.zero()}; }
    Elem add(const Elem& a, const Elem& b) const {
        return {base_.add(a.first, b.first), base_.add(a.second, b.second)};
    }
    Elem sub(const Elem& a, const Elem& b) const {
        return {base_.sub(a.first, b.first), base_.sub(a.second, b.second)};
    }
    Elem neg(const Elem& a) const { return {base_.neg(a.first), base_.neg(a.second)}; }
    Elem mul(const Elem& a, const Elem& b) const {
        auto ac = base_.mul(a.first, b.first);
        auto bd = base_.mul(a.second, b.second);
        auto ad = base_.mul(a.first, b.second);
        auto bc = base_.mul(a.second, b.first);
        return {base_.add(ac, base_.mul(ns_, bd)), base_.add(ad, bc)};
    }
    bool is_zero(const Elem& a) const { return base_.is_zero(a.first) && base_.is_zero(a.second); }
    bool eq(const Elem& a, const Elem& b) const { return a == b; }
    Elem inv(const Elem& a) const {
        // (x + y w)^-1 = (x - y w) / (x^2 - ns y^2)
        auto n = base_.sub(base_.mul(a.first, a.first),
                           base_.mul(ns_, base_.mul(a.second, a.second)));
        auto ninv = base_.inv(n);
        return {base_.mul(a.first, ninv), base_.neg(base_.mul(a.second, ninv))};
    }
    Elem div(const Elem& a, const Elem& b) const { return mul(a, inv(b)); }
    Elem pow(Elem a, Int e) const {
        Elem r = one();
        if (e < 0) { a = inv(a); e = -e; }
        while (e > 0) {
            if (mpz_odd_p(e.get_mpz_t())) r = mul(r, a);
            e >>= 1;
            if (e > 0) a = mul(a, a);
        }
        return r;
    }
    bool is_square(const Elem& a) const {
        if (is_zero(a)) return true;
        return eq(pow(a, (q2_ - 1) / 2), one());
    }
    Elem sqrt(const Elem& a) const {
        if (is_zero(a)) return a;
        if (!is_square(a)) throw not_a_square_error("sqrt of non-residue in F_{q^2}");
        Int q1 = q2_ - 1;
        unsigned long s = 0;
        Int q0 = q1;
        while (mpz_even_p(q0.get_mpz_t())) { q0 /= 2; ++s; }
        Elem z = {base_.zero(), base_.one()};
        Int idx = 1;
        while (is_square(z)) {
            z = from_index(idx);
            idx += 1;
        }
        unsigned long m = s;
        Elem c = pow(z, q0), t = pow(a, q0), r = pow(a, (q0 + 1) / 2);
        while (!eq(t, one())) {
            unsigned long i = 0;
            Elem tt = t;
            while (!eq(tt, one())) { tt = mul(tt, tt); ++i; }
            Elem b = c;
            for (unsigned long k = 0; k + i + 1 < m; ++k) b = mul(b, b);
            m = i;
            c = mul(b, b);
            t = mul(t, c);
            r = mul(r, b);
        }
        return r;
    }
    // q-power Frobenius (conjugation over the base field)
    Elem frobenius(const Elem& a) const { return pow(a, base_.order()); }
    std::string encode(const Elem& a) const {
        return base_.encode(a.first) + "|" + base_.encode(a.second);
    }
    Elem from_index(Int idx) const {
        Int q = base_.order();
        Int lo = mod_floor(idx, q);
        return {base_.from_index(lo), base_.from_index(idx / q)};
    }
    Int to_index(const Elem& a) const {
        return base_.to_index(a.second) * base_.order() + base_.to_index(a.first);
    }

  private:
    FqField base_;
    FqField::Elem ns_;
    Int q2_;
};

}  // namespace mordell
