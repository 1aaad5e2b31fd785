#pragma once

#include <algorithm>
#include <climits>
#include <string>
#include <utility>
#include <vector>

#include "mordell/base.hpp"
#include "mordell/finitefield.hpp"
#include "mordell/numberfield.hpp"
#include "mordell/poly.hpp"

namespace mordell {

constexpr long VAL_INF = LONG_MAX / 4;

// ---------------------------------------------------------------------------
// O_v at fixed precision: Z[x] / (p^N, g_v) with g_v a Hensel lift of the
// irreducible factor of f_K mod p attached to the place.  The Z_p-basis is
// the power basis x^0..x^{d_v-1}.
// ---------------------------------------------------------------------------

class LocalRing {
  public:
    LocalRing(const NumberField& K, Place v, int digits)
        : place_(std::move(v)), N_(digits), p_(place_.p) {
        pN_ = ipow(p_, static_cast<unsigned long>(N_));
        dv_ = place_.residue_degree;
        lift_factor(K);
        cache_theta_powers(K.degree());
    }

    const Place& place() const { return place_; }
    int digits() const { return N_; }
    const Int& p() const { return p_; }
    const Int& modulus() const { return pN_; }
    int residue_degree() const { return dv_; }
    const std::vector<Int>& lifted_factor() const { return gv_; }

    Int pow_p(long e) const { return ipow(p_, static_cast<unsigned long>(e)); }

    FqField residue_field() const { return FqField(p_.get_ui(), place_.factor_mod_p); }

    // multiply two integral coordinate vectors modulo (p^N, g_v)
    std::vector<Int> ring_mul(const std::vector<Int>& a, const std::vector<Int>& b) const {
        std::vector<Int> t(static_cast<size_t>(2 * dv_ - 1), Int(0));
        for (int i = 0; i < dv_; ++i) {
            if (a[static_cast<size_t>(i)] == 0) continue;
            for (int j = 0; j < dv_; ++j) {
                t[static_cast<size_t>(i + j)] += a[static_cast<size_t>(i)] * b[static_cast<size_t>(j)];
            }
        }
        for (size_t k = t.size(); k-- > static_cast<size_t>(dv_);) {
            Int c = mod_floor(t[k], pN_);
            t[k] = 0;
            if (c == 0) continue;
            for (int i = 0; i < dv_; ++i)
                t[k - static_cast<size_t>(dv_) + static_cast<size_t>(i)] -= c * gv_[static_cast<size_t>(i)];
        }
        t.resize(static_cast<size_t>(dv_));
        for (auto& c : t) c = mod_floor(c, pN_);
        return t;
    }

    // inverse of a unit (reduction nonzero in k_v), by lifting the residue
    // inverse with Newton iteration
    std::vector<Int> ring_inv_unit(const std::vector<Int>& a) const {
        FqField kv = residue_field();
        FqField::Elem abar(static_cast<size_t>(dv_));
        for (int i = 0; i < dv_; ++i) abar[static_cast<size_t>(i)] = mod_floor(a[static_cast<size_t>(i)], p_).get_ui();
        if (kv.is_zero(abar)) throw not_a_unit_error("ring_inv_unit: reduction vanishes");
        auto wbar = kv.inv(abar);
        std::vector<Int> w(static_cast<size_t>(dv_), Int(0));
        for (int i = 0; i < dv_; ++i) w[static_cast<size_t>(i)] = Int(static_cast<unsigned long>(wbar[static_cast<size_t>(i)]));
        // w <- w(2 - a w); precision doubles each pass
        int have = 1;
        while (have < N_) {
            auto aw = ring_mul(a, w);
            std::vector<Int> corr(static_cast<size_t>(dv_), Int(0));
            for (int i = 0; i < dv_; ++i) corr[static_cast<size_t>(i)] = mod_floor(-aw[static_cast<size_t>(i)], pN_);
            corr[0] = mod_floor(corr[0] + 2, pN_);
            w = ring_mul(w, corr);
            have *= 2;
        }
        return w;
    }

    // theta^i mod (p^N, g_v) for i = 0..deg(K)-1
    const std::vector<std::vector<Int>>& theta_powers() const { return thpow_; }

  private:
    void lift_factor(const NumberField& K) {
        PrimeField F(p_.get_ui());
        const auto& fint = K.defining_poly();
        FpPoly fbar;
        for (const auto& c : fint) fbar.push_back(F.from_mpz(c));
        poly_trim(F, fbar);
        FpPoly gbar = place_.factor_mod_p;
        FpPoly hbar = poly_divmod(F, fbar, gbar).first;

        auto to_int = [&](const FpPoly& a) {
            std::vector<Int> r;
            for (auto c : a) r.push_back(Int(static_cast<unsigned long>(c)));
            return r;
        };
        std::vector<Int> g = to_int(gbar), h = to_int(hbar), f(fint);

        if (poly_deg<PrimeField>(hbar) == 0) {
            // the factor is all of f
            gv_.assign(f.begin(), f.end());
            for (auto& c : gv_) c = mod_floor(c, pN_);
            return;
        }
        auto bez = poly_xgcd(F, gbar, hbar);  // s g + t h = 1 mod p
        std::vector<Int> sg = to_int(bez.s), th = to_int(bez.t);

        // integer polynomial helpers modulo p^k
        auto imul = [](const std::vector<Int>& a, const std::vector<Int>& b) {
            if (a.empty() || b.empty()) return std::vector<Int>{};
            std::vector<Int> r(a.size() + b.size() - 1, Int(0));
            for (size_t i = 0; i < a.size(); ++i)
                for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
            return r;
        };
        auto itrim = [](std::vector<Int>& a) {
            while (!a.empty() && a.back() == 0) a.pop_back();
        };
        // remainder by a monic polynomial
        auto imod_monic = [&](std::vector<Int> a, const std::vector<Int>& m) {
            while (a.size() >= m.size() && !a.empty()) {
                Int c = a.back();
                size_t k = a.size() - m.size();
                for (size_t i = 0; i < m.size(); ++i) a[k + i] -= c * m[i];
                itrim(a);
            }
            return a;
        };

        Int pk = p_;
        for (int k = 1; k < N_; ++k) {
            // e = (f - g h) / p^k mod p
            auto gh = imul(g, h);
            std::vector<Int> e(f.size(), Int(0));
            for (size_t i = 0; i < f.size(); ++i) {
                Int diff = f[i] - (i < gh.size() ? gh[i] : Int(0));
                e[i] = mod_floor(diff / pk, p_);
            }
            itrim(e);
            auto dg = imod_monic(imul(th, e), g);
            auto dh = imod_monic(imul(sg, e), h);
            for (auto& c : dg) c = mod_floor(c, p_);
            for (auto& c : dh) c = mod_floor(c, p_);
            dg.resize(std::max(dg.size(), g.size()), Int(0));
            dh.resize(std::max(dh.size(), h.size()), Int(0));
            for (size_t i = 0; i < g.size(); ++i) g[i] = mod_floor(g[i] + pk * dg[i], pk * p_);
            for (size_t i = 0; i < h.size(); ++i) h[i] = mod_floor(h[i] + pk * dh[i], pk * p_);
            pk *= p_;
        }
        gv_ = g;
        for (auto& c : gv_) c = mod_floor(c, pN_);
        if (static_cast<int>(gv_.size()) != dv_ + 1 || gv_.back() != 1)
            throw error("Hensel lift lost monicity");
    }

    void cache_theta_powers(int d) {
        std::vector<Int> cur(static_cast<size_t>(dv_), Int(0));
        cur[0] = 1;
        thpow_.push_back(cur);
        std::vector<Int> x(static_cast<size_t>(dv_), Int(0));
        if (dv_ == 1) {
            x[0] = mod_floor(-gv_[0], pN_);  // root of the linear lifted factor
        } else {
            x[1] = 1;
        }
        for (int i = 1; i < d; ++i) {
            cur = ring_mul(cur, x);
            thpow_.push_back(cur);
        }
    }

    Place place_;
    int N_;
    Int p_, pN_;
    int dv_ = 1;
    std::vector<Int> gv_;
    std::vector<std::vector<Int>> thpow_;
};

// ---------------------------------------------------------------------------
// Elements of K_v at finite precision: value = (sum c_i x^i) / p^shift with
// the c_i integral.  `prec` is the absolute precision: the value is known
// modulo p^prec.  All arithmetic propagates worst-case precision.
// ---------------------------------------------------------------------------

struct LocalElem {
    std::vector<Int> c;
    int shift = 0;
    int prec = 0;
};

class LocalField {
  public:
    using Elem = LocalElem;

    explicit LocalField(const LocalRing& R, int zero_test_floor = 5)
        : R_(&R), floor_(zero_test_floor) {}

    const LocalRing& ring() const { return *R_; }
    int default_prec() const { return R_->digits(); }

    Elem zero() const { return make_integral(std::vector<Int>(dv(), Int(0))); }
    Elem one() const {
        std::vector<Int> c(dv(), Int(0));
        c[0] = 1;
        return make_integral(std::move(c));
    }
    Elem from_int(long v) const {
        std::vector<Int> c(dv(), Int(0));
        c[0] = mod_floor(Int(v), R_->modulus());
        return make_integral(std::move(c));
    }
    Elem from_mpz(const Int& v) const {
        std::vector<Int> c(dv(), Int(0));
        c[0] = mod_floor(v, R_->modulus());
        return make_integral(std::move(c));
    }
    Elem make_integral(std::vector<Int> c, int prec = -1) const {
        Elem e;
        e.c = std::move(c);
        for (auto& x : e.c) x = mod_floor(x, R_->modulus());
        e.shift = 0;
        e.prec = prec < 0 ? R_->digits() : prec;
        return e;
    }

    // ord_v of the value; VAL_INF when indistinguishable from zero at the
    // element's precision.
    long val(const Elem& a) const {
        long m = VAL_INF;
        int cap = a.prec + a.shift;  // digits of the numerator that are meaningful
        cap = std::min(cap, R_->digits());
        if (cap <= 0) return a.prec;  // knows nothing; treat as zero at prec
        Int pcap = R_->pow_p(cap);
        for (const auto& x : a.c) {
            Int r = mod_floor(x, pcap);
            if (r == 0) continue;
            m = std::min(m, ord_at(r, R_->p()));
        }
        if (m == VAL_INF) return VAL_INF;
        long v = m - a.shift;
        return std::min(v, static_cast<long>(a.prec));
    }

    bool is_zero(const Elem& a) const {
        long v = val(a);
        if (v < a.prec) return false;
        if (a.prec < floor_)
            throw precision_loss_error("zero test with only " + std::to_string(a.prec) +
                                       " trusted digits");
        return true;
    }
    bool eq(const Elem& a, const Elem& b) const { return is_zero(sub(a, b)); }

    Elem add(const Elem& a, const Elem& b) const { return addsub(a, b, false); }
    Elem sub(const Elem& a, const Elem& b) const { return addsub(a, b, true); }
    Elem neg(const Elem& a) const {
        Elem r = a;
        for (auto& x : r.c) x = mod_floor(-x, R_->modulus());
        return r;
    }

    Elem mul(const Elem& a, const Elem& b) const {
        long va = std::min(val(a), static_cast<long>(a.prec));
        long vb = std::min(val(b), static_cast<long>(b.prec));
        Elem r;
        r.c = R_->ring_mul(a.c, b.c);
        r.shift = a.shift + b.shift;
        long pr = std::min(static_cast<long>(a.prec) + vb, static_cast<long>(b.prec) + va);
        pr = std::min(pr, static_cast<long>(R_->digits()) - r.shift);
        r.prec = static_cast<int>(std::max(0L, pr));
        normalize(r);
        return r;
    }

    Elem inv(const Elem& a) const {
        long v = val(a);
        if (v >= a.prec)
            throw precision_loss_error("inverse of a value indistinguishable from zero");
        // strip p^{v+shift} from the numerator, invert the unit part
        long strip = v + a.shift;
        Int ps = R_->pow_p(strip);
        std::vector<Int> u(a.c);
        for (auto& x : u) x = mod_floor(x, R_->modulus()) / ps;
        auto w = R_->ring_inv_unit(u);
        Elem r;
        r.c = std::move(w);
        r.shift = static_cast<int>(v);
        // relative precision of a is prec - v; result has the same
        long rel = a.prec - v;
        r.prec = static_cast<int>(std::min(rel - v, static_cast<long>(R_->digits()) - r.shift));
        if (r.shift < 0) {
            // value has positive valuation; fold p^{-shift} into numerator
            Int mul = R_->pow_p(-r.shift);
            for (auto& x : r.c) x = mod_floor(x * mul, R_->modulus());
            r.shift = 0;
        }
        normalize(r);
        return r;
    }
    Elem div(const Elem& a, const Elem& b) const { return mul(a, inv(b)); }

    Elem div_by_p_power(const Elem& a, long k) const {
        Elem r = a;
        r.shift += static_cast<int>(k);
        r.prec -= static_cast<int>(k);
        normalize(r);
        return r;
    }
    Elem mul_by_p_power(const Elem& a, long k) const { return div_by_p_power(a, -k); }

    Elem with_prec(const Elem& a, int prec) const {
        Elem r = a;
        r.prec = std::min(prec, r.prec);
        return r;
    }

    std::string encode(const Elem& a) const {
        std::string s;
        for (size_t i = 0; i < a.c.size(); ++i) {
            if (i) s += ' ';
            s += a.c[i].get_str();
        }
        s += " /p^" + std::to_string(a.shift) + " @" + std::to_string(a.prec);
        return s;
    }

    // reduction to k_v; requires a v-integral value known to >= 1 digit
    FqField::Elem reduce(const Elem& a, const FqField& kv) const {
        long v = val(a);
        if (v < 0) throw bad_reduction_error("reduction of a non-integral value");
        if (a.prec < 1) throw precision_loss_error("reduction with no trusted digits");
        FqField::Elem r(static_cast<size_t>(dv()));
        Int ps = R_->pow_p(a.shift);
        for (size_t i = 0; i < r.size(); ++i) {
            Int x = mod_floor(a.c[i], R_->modulus());
            // integral value: numerator divisible by p^shift
            r[i] = mod_floor(x / ps, R_->p()).get_ui();
        }
        return r;
    }

    // coordinates on the Z_p-basis x^0..x^{d_v-1}: scalars value_i/p^shift
    std::vector<std::pair<Int, int>> coordinates(const Elem& a) const {
        std::vector<std::pair<Int, int>> out;
        for (const auto& x : a.c) out.emplace_back(mod_floor(x, R_->modulus()), a.shift);
        return out;
    }

  private:
    size_t dv() const { return static_cast<size_t>(R_->residue_degree()); }

    void normalize(Elem& r) const {
        // pull the largest possible p-power out of the numerator
        if (r.shift > 0) {
            long strip = VAL_INF;
            for (const auto& x : r.c) {
                if (x != 0) strip = std::min(strip, ord_at(x, R_->p()));
                if (strip == 0) break;
            }
            if (strip == VAL_INF) strip = r.shift;  // numerator is exactly 0
            strip = std::min(strip, static_cast<long>(r.shift));
            if (strip > 0) {
                Int ps = R_->pow_p(strip);
                for (auto& x : r.c) x /= ps;
                r.shift -= static_cast<int>(strip);
            }
        }
        if (r.shift < 0) {
            Int ps = R_->pow_p(-r.shift);
            for (auto& x : r.c) x *= ps;
            r.shift = 0;
        }
        r.prec = std::min(r.prec, R_->digits() - r.shift);
        Int pm = R_->pow_p(std::max(0, r.prec + r.shift));
        for (auto& x : r.c) x = mod_floor(x, pm);
        if (r.prec < 0) r.prec = 0;
    }

    Elem addsub(const Elem& a, const Elem& b, bool negate) const {
        Elem r;
        int sh = std::max(a.shift, b.shift);
        Int ma = R_->pow_p(sh - a.shift), mb = R_->pow_p(sh - b.shift);
        r.c.resize(dv());
        for (size_t i = 0; i < dv(); ++i) {
            Int x = a.c[i] * ma;
            Int y = b.c[i] * mb;
            r.c[i] = mod_floor(negate ? Int(x - y) : Int(x + y), R_->modulus());
        }
        r.shift = sh;
        r.prec = std::min(a.prec, b.prec);
        normalize(r);
        return r;
    }

    const LocalRing* R_;
    int floor_;
};

// ---------------------------------------------------------------------------
// Embeddings and exact valuations
// ---------------------------------------------------------------------------

// K -> K_v via theta |-> x mod g_v.  Denominator p-parts become a shift.
inline LocalElem embed(const NumberField& K, const NfElem& x, const LocalRing& R,
                       bool require_integral = false) {
    LocalField Kv(R);
    const Int& p = R.p();
    // common denominator and its p-part
    Int den = K.denominator(x);
    auto [k, d0] = den == 1 ? std::pair<long, Int>{0, Int(1)} : remove_factor(den, p);
    if (require_integral && k > 0)
        throw non_integral_denominator_error("denominator divisible by p");
    Int d0inv = invmod(mod_floor(d0, R.modulus()), R.modulus());
    std::vector<Int> acc(static_cast<size_t>(R.residue_degree()), Int(0));
    const auto& pows = R.theta_powers();
    for (size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0) continue;
        // x_i = num/denx; write against the common denominator den = p^k d0
        Int num = Int(x[i].get_num()) * (den / Int(x[i].get_den()));
        Int scaled = mod_floor(num * d0inv, R.modulus());
        for (size_t j = 0; j < acc.size(); ++j)
            acc[j] = mod_floor(acc[j] + scaled * pows[i][j], R.modulus());
    }
    LocalElem e;
    e.c = std::move(acc);
    e.shift = static_cast<int>(k);
    e.prec = R.digits() - e.shift;
    // normalize via a field op
    return Kv.add(e, Kv.zero());
}

// ord_v of an exact element; +infinity only for x = 0.  Retries at doubled
// precision as needed (the embedding may vanish to high order).
inline long valuation_at(const NumberField& K, const NfElem& x, const Place& v, int digits = 30) {
    if (K.is_zero(x)) return VAL_INF;
    for (int attempt = 0; attempt < 5; ++attempt) {
        LocalRing R(K, v, digits);
        LocalField Kv(R);
        LocalElem e = embed(K, x, R);
        long w = Kv.val(e);
        if (w < e.prec) return w;
        digits *= 2;
    }
    throw precision_exhausted_error("valuation_at: element vanishes beyond retry budget");
}

// ---------------------------------------------------------------------------
// Hensel square root of a unit whose reduction is a square in k_v
// ---------------------------------------------------------------------------

inline LocalElem hensel_sqrt(const LocalField& Kv, const LocalElem& a) {
    const LocalRing& R = Kv.ring();
    long v = Kv.val(a);
    if (v != 0 || a.shift != 0) throw not_a_unit_error("hensel_sqrt expects a unit");
    FqField kv = R.residue_field();
    auto abar = Kv.reduce(a, kv);
    auto rbar = kv.sqrt(abar);  // throws not_a_square_error on non-residues
    std::vector<Int> y(static_cast<size_t>(R.residue_degree()), Int(0));
    for (size_t i = 0; i < y.size(); ++i) y[i] = Int(static_cast<unsigned long>(rbar[i]));
    LocalElem r = Kv.make_integral(std::move(y), a.prec);
    // Newton: y <- (y + a/y)/2
    LocalElem half = Kv.inv(Kv.from_int(2));
    int have = 1;
    while (have < a.prec) {
        r = Kv.mul(half, Kv.add(r, Kv.div(a, r)));
        have *= 2;
    }
    r.prec = a.prec;
    return r;
}

// ---------------------------------------------------------------------------
// Hermite Normal Form over Z_p at fixed precision.
//
// Input entries are integral (already scaled by p^a).  Row operations are
// exact in Z/p^prec; the returned pivot-valuation sum is what the caller
// charges against the input's trusted digits when drawing mod-p
// conclusions downstream.
// ---------------------------------------------------------------------------

struct ZpMat {
    int nr = 0, nc = 0;
    std::vector<Int> a;  // row-major
    Int& at(int i, int j) { return a[static_cast<size_t>(i) * nc + static_cast<size_t>(j)]; }
    const Int& at(int i, int j) const {
        return a[static_cast<size_t>(i) * nc + static_cast<size_t>(j)];
    }
    static ZpMat zero(int r, int c) {
        ZpMat m;
        m.nr = r;
        m.nc = c;
        m.a.assign(static_cast<size_t>(r) * c, Int(0));
        return m;
    }
    static ZpMat identity(int n) {
        ZpMat m = zero(n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }
};

inline ZpMat zp_mul(const ZpMat& A, const ZpMat& B, const Int& mod) {
    ZpMat C = ZpMat::zero(A.nr, B.nc);
    for (int i = 0; i < A.nr; ++i)
        for (int k = 0; k < A.nc; ++k) {
            if (A.at(i, k) == 0) continue;
            for (int j = 0; j < B.nc; ++j)
                C.at(i, j) = mod_floor(C.at(i, j) + A.at(i, k) * B.at(k, j), mod);
        }
    return C;
}

enum class PivotOrder { MinValuation, ColumnSweep };

struct HnfResult {
    ZpMat U, H;
    int zero_rows = 0;
    long pivot_val_sum = 0;       // sum of pivot valuations (0 in the generic case)
    std::vector<int> pivot_cols;  // for the nonzero rows, in row order
};

// U unimodular over Z_p with U*M = H in echelon form, pivots p^e, entries
// below pivots zero mod p^prec.  Trailing h rows of H vanish mod p^prec.
inline HnfResult hnf_zp(const Int& p, const ZpMat& M, int prec,
                        PivotOrder order = PivotOrder::MinValuation,
                        int ambiguity_floor = 3) {
    Int mod = ipow(p, static_cast<unsigned long>(prec));
    HnfResult res;
    res.H = M;
    for (auto& x : res.H.a) x = mod_floor(x, mod);
    res.U = ZpMat::identity(M.nr);
    int nr = M.nr, nc = M.nc;

    auto entry_val = [&](int i, int j) -> long {
        const Int& x = res.H.at(i, j);
        if (x == 0) return VAL_INF;
        return ord_at(x, p);
    };

    std::vector<bool> row_done(static_cast<size_t>(nr), false);
    std::vector<bool> col_done(static_cast<size_t>(nc), false);
    std::vector<std::pair<int, int>> pivots;  // (row, col)

    int steps = std::min(nr, nc);
    for (int s = 0; s < steps; ++s) {
        long best = VAL_INF;
        int bi = -1, bj = -1;
        if (order == PivotOrder::MinValuation) {
            for (int i = 0; i < nr; ++i) {
                if (row_done[static_cast<size_t>(i)]) continue;
                for (int j = 0; j < nc; ++j) {
                    if (col_done[static_cast<size_t>(j)]) continue;
                    long v = entry_val(i, j);
                    if (v < best) { best = v; bi = i; bj = j; }
                }
            }
        } else {
            // leftmost active column containing a usable entry
            for (int j = 0; j < nc && bi < 0; ++j) {
                if (col_done[static_cast<size_t>(j)]) continue;
                for (int i = 0; i < nr; ++i) {
                    if (row_done[static_cast<size_t>(i)]) continue;
                    long v = entry_val(i, j);
                    if (v < best) { best = v; bi = i; bj = j; }
                }
                if (bi >= 0) break;
            }
        }
        if (bi < 0 || best >= prec) break;  // remaining block vanishes at precision
        if (best > prec - ambiguity_floor)
            throw precision_ambiguous_error("pivot valuation too close to working precision");

        // scale the pivot row so the pivot becomes exactly p^best
        Int unit = res.H.at(bi, bj) / ipow(p, static_cast<unsigned long>(best));
        Int uinv = invmod(mod_floor(unit, mod), mod);
        for (int j = 0; j < nc; ++j) res.H.at(bi, j) = mod_floor(res.H.at(bi, j) * uinv, mod);
        for (int j = 0; j < nr; ++j) res.U.at(bi, j) = mod_floor(res.U.at(bi, j) * uinv, mod);

        Int piv = res.H.at(bi, bj);  // = p^best exactly as a residue
        for (int i = 0; i < nr; ++i) {
            if (i == bi) continue;
            const Int& x = res.H.at(i, bj);
            if (x == 0) continue;
            Int q = x / piv;  // exact: every entry has valuation >= best
            if (q == 0) continue;
            for (int j = 0; j < nc; ++j)
                res.H.at(i, j) = mod_floor(res.H.at(i, j) - q * res.H.at(bi, j), mod);
            for (int j = 0; j < nr; ++j)
                res.U.at(i, j) = mod_floor(res.U.at(i, j) - q * res.U.at(bi, j), mod);
        }
        row_done[static_cast<size_t>(bi)] = true;
        col_done[static_cast<size_t>(bj)] = true;
        pivots.emplace_back(bi, bj);
        res.pivot_val_sum += best;
    }

    // order rows: pivot rows by pivot column, zero rows last
    std::sort(pivots.begin(), pivots.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
    std::vector<int> perm;
    for (auto& pr : pivots) perm.push_back(pr.first);
    for (int i = 0; i < nr; ++i)
        if (!row_done[static_cast<size_t>(i)]) perm.push_back(i);
    ZpMat H2 = ZpMat::zero(nr, nc), U2 = ZpMat::zero(nr, nr);
    for (int i = 0; i < nr; ++i) {
        for (int j = 0; j < nc; ++j) H2.at(i, j) = res.H.at(perm[static_cast<size_t>(i)], j);
        for (int j = 0; j < nr; ++j) U2.at(i, j) = res.U.at(perm[static_cast<size_t>(i)], j);
    }
    res.H = std::move(H2);
    res.U = std::move(U2);
    res.zero_rows = nr - static_cast<int>(pivots.size());
    for (auto& pr : pivots) res.pivot_cols.push_back(pr.second);
    return res;
}

// determinant valuation of a square matrix mod p^prec (for unimodularity checks)
inline long zp_det_val(const Int& p, ZpMat A, int prec) {
    Int mod = ipow(p, static_cast<unsigned long>(prec));
    int n = A.nr;
    long v = 0;
    for (int c = 0; c < n; ++c) {
        int best = -1;
        long bv = VAL_INF;
        for (int r = c; r < n; ++r) {
            Int x = mod_floor(A.at(r, c), mod);
            if (x == 0) continue;
            long w = ord_at(x, p);
            if (w < bv) { bv = w; best = r; }
        }
        if (best < 0) return VAL_INF;
        if (best != c)
            for (int j = 0; j < n; ++j) std::swap(A.at(c, j), A.at(best, j));
        v += bv;
        Int unit = A.at(c, c) / ipow(p, static_cast<unsigned long>(bv));
        Int uinv = invmod(mod_floor(unit, mod), mod);
        for (int r = c + 1; r < n; ++r) {
            Int x = mod_floor(A.at(r, c), mod);
            if (x == 0) continue;
            long w = ord_at(x, p);
            if (w < bv) throw error("pivot not minimal in zp_det_val");
            Int q = mod_floor((x / ipow(p, static_cast<unsigned long>(bv))) * uinv, mod);
            for (int j = c; j < n; ++j) A.at(r, j) = mod_floor(A.at(r, j) - q * A.at(c, j), mod);
        }
    }
    return v;
}

}  // namespace mordell
