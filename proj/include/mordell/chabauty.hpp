#pragma once

#include <memory>
#include <vector>

#include "mordell/base.hpp"
#include "mordell/coleman.hpp"
#include "mordell/finitegroup.hpp"
#include "mordell/localfield.hpp"
#include "mordell/mumford.hpp"

namespace mordell {

// ---------------------------------------------------------------------------
// The unit-ball criterion: stack the period matrix T and the
// multiplication-by-alpha matrix A over the places above p, echelonize
// p^a T over Z_p, and test the mod-p rank of the trailing rows of U A.
// ---------------------------------------------------------------------------

struct CriterionConfig {
    int precision = 30;   // trusted digits required of the period data
    int slack = 30;       // extra working digits (consumed near infinity)
    int retries = 2;      // doublings of the working precision
    PivotOrder pivot_order = PivotOrder::MinValuation;
};

enum class Verdict { UniqueInBall, Inconclusive };

struct ChabautyData {
    Int p;
    int d = 0, g = 2, r = 0;
    long denom_exp = 0;          // a with p^a T integral
    int trusted_digits = 0;      // of the scaled period matrix entries
    long pivot_val_sum = 0;
    int h = 0;                   // zero rows of U(p^a T)
    std::vector<std::vector<Int>> M;        // h x d, entries mod p^N
    std::vector<std::vector<u64>> M_mod_p;  // the mod-p reduction (U-dependent)
    int rank = 0;
    Verdict verdict = Verdict::Inconclusive;
};

// per-place state shared by the period and alpha computations
struct PlaceContext {
    Place v;
    std::unique_ptr<LocalRing> ring;
    std::unique_ptr<LocalCurve> LC;
    std::vector<Expansion> inf_exps;  // omega_1, omega_2 at infinity
    Int group_order;                  // #J(k_v)
};

inline std::vector<PlaceContext> make_place_contexts(const NumberField& K,
                                                     const CurveModel<NumberField>& C,
                                                     const Int& p, int digits,
                                                     bool with_expansions, int target = -1) {
    auto places = K.split_prime(p);  // throws on ramification (p2)
    if (p == 2) throw error("p must be odd");
    if (target < 0) target = digits;
    std::vector<PlaceContext> out;
    for (const auto& v : places) {
        if (!is_good_reduction(K, C, v))
            throw bad_reduction_error("bad reduction above " + p.get_str());
        PlaceContext ctx;
        ctx.v = v;
        ctx.ring = std::make_unique<LocalRing>(K, v, digits);
        ctx.LC = std::make_unique<LocalCurve>(K, C, *ctx.ring);
        FqField kv(p.get_ui(), v.factor_mod_p);
        auto Cv = reduce_curve(K, C, v, kv);
        ctx.group_order = jacobian_order(kv, Cv);
        if (with_expansions) {
            Uniformizer U;
            U.ring = ctx.ring.get();
            U.kind = DiscKind::InfinityDisc;
            U.x0 = ctx.LC->Kv.zero();
            U.y0 = ctx.LC->Kv.zero();
            U.offset = ctx.LC->Kv.zero();
            size_t terms = static_cast<size_t>(2 * target + 16);
            ctx.inf_exps.push_back(expand_differential(*ctx.LC, U, 1, terms));
            ctx.inf_exps.push_back(expand_differential(*ctx.LC, U, 2, terms));
        }
        out.push_back(std::move(ctx));
    }
    return out;
}

// scaled period matrix: entries of p^a T as integers, with trusted digits
struct PeriodMatrix {
    ZpMat T;  // gd x r, already scaled by p^a
    long a = 0;
    int trusted = 0;
};

inline PeriodMatrix build_period_matrix(const NumberField& K, const CurveModel<NumberField>& C,
                                        const std::vector<Mumford<NumberField>>& basis,
                                        std::vector<PlaceContext>& ctxs, int target = -1) {
    int d = K.degree();
    int gd = 2 * d;
    int r = static_cast<int>(basis.size());
    // collect raw scalars (residue, shift, prec)
    struct Scalar {
        Int x;
        int shift, prec;
    };
    std::vector<std::vector<Scalar>> raw(static_cast<size_t>(gd),
                                         std::vector<Scalar>(static_cast<size_t>(r)));
    long a = 0;
    int trusted = INT32_MAX;
    int row_base = 0;
    for (auto& ctx : ctxs) {
        const LocalField& Kv = ctx.LC->Kv;
        int dv = ctx.ring->residue_degree();
        for (int j = 0; j < r; ++j) {
            auto col = period_column(K, C, basis[static_cast<size_t>(j)], *ctx.LC,
                                     ctx.group_order, ctx.inf_exps, target);
            for (int w = 0; w < 2; ++w) {
                auto coords = Kv.coordinates(col.tau[static_cast<size_t>(w)]);
                int prec = col.tau[static_cast<size_t>(w)].prec;
                for (int i = 0; i < dv; ++i) {
                    Scalar s{coords[static_cast<size_t>(i)].first,
                             coords[static_cast<size_t>(i)].second, prec};
                    a = std::max(a, static_cast<long>(s.shift));
                    trusted = std::min(trusted, prec);
                    raw[static_cast<size_t>(row_base + w * dv + i)][static_cast<size_t>(j)] = s;
                }
            }
        }
        row_base += 2 * dv;
    }
    PeriodMatrix out;
    out.a = (r == 0) ? 0 : a;
    out.trusted = (r == 0) ? INT32_MAX : trusted;
    out.T = ZpMat::zero(gd, r);
    const Int& p = ctxs.front().ring->p();
    Int mod = ctxs.front().ring->modulus();
    for (int i = 0; i < gd; ++i)
        for (int j = 0; j < r; ++j) {
            const auto& s = raw[static_cast<size_t>(i)][static_cast<size_t>(j)];
            out.T.at(i, j) = mod_floor(s.x * ipow(p, static_cast<unsigned long>(out.a - s.shift)), mod);
        }
    return out;
}

// block-diagonal multiplication-by-alpha matrix for the point Q
inline ZpMat build_alpha_matrix(const NumberField& K, const CurveModel<NumberField>& C,
                                const CurvePoint<NumberField>& Q,
                                std::vector<PlaceContext>& ctxs) {
    int d = K.degree();
    ZpMat A = ZpMat::zero(2 * d, d);
    int row_base = 0, col_base = 0;
    for (auto& ctx : ctxs) {
        const LocalField& Kv = ctx.LC->Kv;
        const LocalRing& R = *ctx.ring;
        int dv = R.residue_degree();
        auto U = uniformizer_at(K, C, Q, ctx.v, *ctx.LC);
        for (int w = 0; w < 2; ++w) {
            auto E = expand_differential(*ctx.LC, U, w + 1, 4);
            const auto& alpha = E.coeffs[0];
            if (Kv.val(alpha) < 0) throw error("alpha is not integral");
            // columns: coordinates of alpha * x^{j}
            std::vector<Int> av(alpha.c);
            if (alpha.shift != 0) {
                Int ps = R.pow_p(alpha.shift);
                for (auto& c : av) c = mod_floor(c, R.modulus()) / ps;
            }
            std::vector<Int> xj(static_cast<size_t>(dv), Int(0));
            xj[0] = 1;
            std::vector<Int> xpoly(static_cast<size_t>(dv), Int(0));
            if (dv == 1) {
                xpoly[0] = mod_floor(-R.lifted_factor()[0], R.modulus());
            } else {
                xpoly[1] = 1;
            }
            for (int j = 0; j < dv; ++j) {
                auto prod = R.ring_mul(av, xj);
                for (int i = 0; i < dv; ++i)
                    A.at(row_base + w * dv + i, col_base + j) = prod[static_cast<size_t>(i)];
                if (j + 1 < dv) xj = R.ring_mul(xj, xpoly);
            }
        }
        row_base += 2 * dv;
        col_base += dv;
    }
    return A;
}

inline int rank_mod_p(const std::vector<std::vector<u64>>& M, u64 p) {
    auto a = M;
    int rows = static_cast<int>(a.size());
    if (rows == 0) return 0;
    int cols = static_cast<int>(a[0].size());
    int rank = 0;
    for (int c = 0; c < cols && rank < rows; ++c) {
        int piv = -1;
        for (int r = rank; r < rows; ++r)
            if (a[static_cast<size_t>(r)][static_cast<size_t>(c)] % p != 0) { piv = r; break; }
        if (piv < 0) continue;
        std::swap(a[static_cast<size_t>(piv)], a[static_cast<size_t>(rank)]);
        u64 inv = invmod(a[static_cast<size_t>(rank)][static_cast<size_t>(c)] % p, p);
        for (int r = rank + 1; r < rows; ++r) {
            u64 f = mulmod(a[static_cast<size_t>(r)][static_cast<size_t>(c)] % p, inv, p);
            if (!f) continue;
            for (int cc = c; cc < cols; ++cc)
                a[static_cast<size_t>(r)][static_cast<size_t>(cc)] =
                    submod(a[static_cast<size_t>(r)][static_cast<size_t>(cc)] % p,
                           mulmod(f, a[static_cast<size_t>(rank)][static_cast<size_t>(cc)] % p, p), p);
        }
        ++rank;
    }
    return rank;
}

// Session: the period side of the criterion depends only on (basis, p), so
// it is built once and reused across the points to be checked.
class CriterionSession {
  public:
    CriterionSession(const NumberField& K, const CurveModel<NumberField>& C,
                     std::vector<Mumford<NumberField>> basis, Int p, CriterionConfig cfg = {})
        : K_(K), C_(C), basis_(std::move(basis)), p_(std::move(p)), cfg_(cfg) {
        int digits = cfg_.precision + cfg_.slack;
        for (int attempt = 0;; ++attempt) {
            try {
                build(digits);
                return;
            } catch (const precision_loss_error&) {
                if (attempt >= cfg_.retries) throw;
            } catch (const precision_exhausted_error&) {
                if (attempt >= cfg_.retries) throw;
            } catch (const precision_ambiguous_error&) {
                if (attempt >= cfg_.retries) throw;
            }
            digits *= 2;
        }
    }

    ChabautyData check(const CurvePoint<NumberField>& Q) {
        ChabautyData out;
        out.p = p_;
        out.d = K_.degree();
        out.r = static_cast<int>(basis_.size());
        out.denom_exp = denom_exp_;
        out.trusted_digits = trusted_;
        out.pivot_val_sum = pivot_val_sum_;
        out.h = h_;
        int gd = 2 * out.d;
        const Int mod = ctxs_.front().ring->modulus();

        auto A = build_alpha_matrix(K_, C_, Q, ctxs_);
        ZpMat UA = (out.r > 0) ? zp_mul(U_, A, mod) : A;
        for (int i = gd - h_; i < gd; ++i) {
            std::vector<Int> row;
            std::vector<u64> rowp;
            for (int j = 0; j < out.d; ++j) {
                Int x = mod_floor(UA.at(i, j), mod);
                row.push_back(x);
                rowp.push_back(mod_floor(x, p_).get_ui());
            }
            out.M.push_back(std::move(row));
            out.M_mod_p.push_back(std::move(rowp));
        }
        out.rank = rank_mod_p(out.M_mod_p, p_.get_ui());
        out.verdict = (out.rank == out.d) ? Verdict::UniqueInBall : Verdict::Inconclusive;
        return out;
    }

    const std::vector<PlaceContext>& contexts() const { return ctxs_; }
    int null_rows() const { return h_; }

  private:
    void build(int digits) {
        ctxs_.clear();
        int target = cfg_.precision + 4;
        ctxs_ = make_place_contexts(K_, C_, p_, digits, !basis_.empty(), target);
        int gd = 2 * K_.degree();
        int r = static_cast<int>(basis_.size());
        if (r == 0) {
            denom_exp_ = 0;
            trusted_ = digits;
            pivot_val_sum_ = 0;
            h_ = gd;
            U_ = ZpMat::identity(gd);
            return;
        }
        auto P = build_period_matrix(K_, C_, basis_, ctxs_, target);
        denom_exp_ = P.a;
        trusted_ = std::min(P.trusted, digits);
        int hnf_prec = std::min(trusted_ + static_cast<int>(P.a), digits);
        if (hnf_prec < 2) throw precision_loss_error("period matrix has no trusted digits");
        auto H = hnf_zp(p_, P.T, hnf_prec, cfg_.pivot_order);
        pivot_val_sum_ = H.pivot_val_sum;
        h_ = H.zero_rows;
        if (h_ < gd - r) throw error("zero-row count below the generic value");
        if (h_ > gd - r)
            throw rank_defect_error(
                "more null rows than gd - r: dependent basis modulo torsion or precision loss");
        if (trusted_ - H.pivot_val_sum < 1)
            throw precision_ambiguous_error("pivot valuations consume the trusted digits");
        U_ = H.U;
    }

    const NumberField& K_;
    const CurveModel<NumberField>& C_;
    std::vector<Mumford<NumberField>> basis_;
    Int p_;
    CriterionConfig cfg_;
    std::vector<PlaceContext> ctxs_;
    ZpMat U_;
    long denom_exp_ = 0;
    int trusted_ = 0;
    long pivot_val_sum_ = 0;
    int h_ = 0;
};

inline ChabautyData criterion(const NumberField& K, const CurveModel<NumberField>& C,
                              const std::vector<Mumford<NumberField>>& basis,
                              const CurvePoint<NumberField>& Q, const Int& p,
                              const CriterionConfig& cfg = {}) {
    CriterionSession session(K, C, basis, p, cfg);
    return session.check(Q);
}

}  // namespace mordell
