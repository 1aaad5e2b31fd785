#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mordell/base.hpp"
#include "mordell/chabauty.hpp"
#include "mordell/finitegroup.hpp"
#include "mordell/lattice.hpp"
#include "mordell/mumford.hpp"

namespace mordell {

// ---------------------------------------------------------------------------
// The supplied Mordell-Weil data: free generators, torsion generators with
// their orders, known points and their exact decompositions.
// ---------------------------------------------------------------------------

struct AbstractMW {
    const NumberField* K = nullptr;
    const CurveModel<NumberField>* C = nullptr;
    std::vector<Mumford<NumberField>> free_gens;
    std::vector<Mumford<NumberField>> torsion_gens;
    std::vector<Int> torsion_orders;
    std::vector<CurvePoint<NumberField>> points;
    size_t base_index = 0;
    std::vector<std::vector<Int>> decomp;  // per point, length r + #torsion

    int rank() const { return static_cast<int>(free_gens.size()); }
    int gens_total() const { return rank() + static_cast<int>(torsion_gens.size()); }

    const Mumford<NumberField>& generator(int i) const {
        return i < rank() ? free_gens[static_cast<size_t>(i)]
                          : torsion_gens[static_cast<size_t>(i - rank())];
    }

    // exact verification over K of every stated fact
    void verify() const {
        const auto& k = *K;
        for (size_t i = 0; i < torsion_gens.size(); ++i) {
            auto power = scalar_mul(k, *C, torsion_orders[i], torsion_gens[i]);
            if (!mumford_is_identity(k, power))
                throw not_on_jacobian_error("torsion generator order is wrong");
            for (Int m = 1; m < torsion_orders[i]; m += 1)
                if (mumford_is_identity(k, scalar_mul(k, *C, m, torsion_gens[i])))
                    throw not_on_jacobian_error("torsion generator order is not minimal");
        }
        if (points.size() != decomp.size())
            throw schema_error("every known point needs a decomposition");
        const auto& P0 = points[base_index];
        for (size_t q = 0; q < points.size(); ++q) {
            if (!on_curve(k, *C, points[q])) throw not_on_jacobian_error("point not on curve");
            auto lhs = abel_jacobi(k, *C, points[q], P0);
            auto rhs = mumford_identity(k);
            if (static_cast<int>(decomp[q].size()) != gens_total())
                throw schema_error("decomposition has the wrong length");
            for (int j = 0; j < gens_total(); ++j)
                if (decomp[q][static_cast<size_t>(j)] != 0)
                    rhs = cantor_add(k, *C, rhs,
                                     scalar_mul(k, *C, decomp[q][static_cast<size_t>(j)],
                                                generator(j)));
            if (!mumford_eq(k, lhs, rhs))
                throw not_on_jacobian_error("decomposition of a known point fails");
        }
    }
};

// ---------------------------------------------------------------------------
// Cached data of a single place used by the sieve
// ---------------------------------------------------------------------------

struct AdmissibilityReport {
    Place v;
    bool good_reduction = false;
    bool within_cap = false;
    bool smooth = false;
    Int order = 0;
    std::string reason;
    bool admissible() const { return good_reduction && within_cap && smooth; }
};

inline AdmissibilityReport admissible_place(const NumberField& K,
                                            const CurveModel<NumberField>& C, const Place& v,
                                            const Int& smooth_bound, const Int& q_cap) {
    AdmissibilityReport rep;
    rep.v = v;
    rep.good_reduction = is_good_reduction(K, C, v);
    if (!rep.good_reduction) {
        rep.reason = "bad reduction";
        return rep;
    }
    Int q = ipow(v.p, static_cast<unsigned long>(v.residue_degree));
    rep.within_cap = q <= q_cap;
    if (!rep.within_cap) {
        rep.reason = "residue field above the cap";
        return rep;
    }
    FqField kv(v.p_u64(), v.factor_mod_p);
    auto Cv = reduce_curve(K, C, v, kv);
    rep.order = jacobian_order(kv, Cv);
    rep.smooth = is_smooth(rep.order, smooth_bound);
    if (!rep.smooth) rep.reason = "group order is not smooth";
    return rep;
}

struct PlaceData {
    Place v;
    Int order;
    std::vector<std::pair<Int, unsigned>> factorization;
    std::shared_ptr<JacobianGroup> J;
    IMat gen_coords;                      // gens_total x m
    std::vector<Int> moduli;              // invariant orders of J(k_v)
    std::set<std::vector<Int>> aj_image;  // coords of [P - red(P0)]
    std::string label;
};

inline std::optional<PlaceData> make_place_data(const AbstractMW& mw, const Place& v, u64 seed) {
    const auto& K = *mw.K;
    FqField kv(v.p_u64(), v.factor_mod_p);
    auto Cv = reduce_curve(K, *mw.C, v, kv);
    PlaceData pd;
    pd.v = v;
    pd.label = v.label();
    pd.J = std::make_shared<JacobianGroup>(kv, Cv, seed);
    if (!pd.J->info().structure_known) return std::nullopt;
    pd.order = pd.J->order();
    pd.factorization = pd.J->info().factorization;
    pd.moduli = pd.J->info().invariant_orders;
    int m = static_cast<int>(pd.moduli.size());
    pd.gen_coords = IMat(mw.gens_total(), m);
    for (int i = 0; i < mw.gens_total(); ++i) {
        auto red = reduce_divisor(K, *mw.C, mw.generator(i), v, kv, Cv);
        auto c = pd.J->coords(red);
        for (int j = 0; j < m; ++j) pd.gen_coords.at(i, j) = c[static_cast<size_t>(j)];
    }
    auto base = reduce_point(K, mw.points[mw.base_index], v, kv);
    pd.aj_image = aj_image_set(*pd.J, base);
    return pd;
}

// image of an abstract vector in J(k_v), in group coordinates
inline std::vector<Int> place_image(const PlaceData& pd, const std::vector<Int>& w) {
    int m = static_cast<int>(pd.moduli.size());
    std::vector<Int> out(static_cast<size_t>(m), Int(0));
    for (int j = 0; j < m; ++j) {
        Int acc = 0;
        for (int i = 0; i < pd.gen_coords.nr; ++i)
            acc += w[static_cast<size_t>(i)] * pd.gen_coords.at(i, j);
        out[static_cast<size_t>(j)] = mod_floor(acc, pd.moduli[static_cast<size_t>(j)]);
    }
    return out;
}

inline bool maps_to_zero(const PlaceData& pd, const std::vector<Int>& w) {
    for (const auto& c : place_image(pd, w))
        if (c != 0) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Sieve chain
// ---------------------------------------------------------------------------

struct SieveState {
    int n = 0;      // r + #torsion
    IMat L;         // canonical HNF basis of the current lattice
    std::vector<std::vector<Int>> W;
    std::vector<std::string> places_used;
    std::vector<size_t> w_trace;
};

inline SieveState sieve_initial(const AbstractMW& mw) {
    SieveState s;
    s.n = mw.gens_total();
    s.L = IMat::identity(s.n);
    s.W.push_back(std::vector<Int>(static_cast<size_t>(s.n), Int(0)));
    s.w_trace.push_back(1);
    return s;
}

// reduce a vector into the fundamental box of an HNF lattice basis
inline std::vector<Int> box_reduce(const IMat& H, std::vector<Int> w) {
    for (int i = H.nr - 1; i >= 0; --i) {
        // pivot column of row i
        int c = -1;
        for (int j = 0; j < H.nc; ++j)
            if (H.at(i, j) != 0) { c = j; break; }
        if (c < 0) continue;
        Int q;
        mpz_fdiv_q(q.get_mpz_t(), w[static_cast<size_t>(c)].get_mpz_t(), H.at(i, c).get_mpz_t());
        if (q != 0)
            for (int j = 0; j < H.nc; ++j) w[static_cast<size_t>(j)] -= q * H.at(i, j);
    }
    return w;
}

struct SieveCaps {
    Int wprime_cap = 100000;
};

// One refinement step at an admissible place.
inline void sieve_step(const AbstractMW& mw, SieveState& s, const PlaceData& pd,
                       const SieveCaps& caps = {}) {
    int n = s.n;
    int m = static_cast<int>(pd.moduli.size());
    // composite map on the current lattice: rows of L map through gen_coords
    IMat comp = imat_mul(s.L, pd.gen_coords);
    auto kernel_in_s = kernel_mod(comp, pd.moduli);
    IMat Lnext_rows = imat_mul(kernel_in_s, s.L);
    IMat Lnext = lattice_canonical(Lnext_rows, n);

    // torsion relations must stay inside the lattice
    for (size_t j = 0; j < mw.torsion_orders.size(); ++j) {
        std::vector<Int> t(static_cast<size_t>(n), Int(0));
        t[static_cast<size_t>(mw.rank()) + j] = mw.torsion_orders[j];
        if (!lattice_contains(Lnext, t))
            throw error("sieve_step: torsion relation escaped the lattice");
    }

    // coset representatives of L_i / L_{i+1}
    std::vector<std::vector<Int>> reps;
    {
        IMat M(n, n);
        for (int i = 0; i < n; ++i) {
            std::vector<Int> row(static_cast<size_t>(n));
            for (int j = 0; j < n; ++j) row[static_cast<size_t>(j)] = Lnext.at(i, j);
            auto sol = solve_left(s.L, row);
            if (!sol) throw error("sieve_step: refined lattice not inside the old one");
            for (int j = 0; j < n; ++j) M.at(i, j) = (*sol)[static_cast<size_t>(j)];
        }
        auto snf = snf_z(M);
        Int index = 1;
        for (int i = 0; i < n; ++i) index *= snf.D.at(i, i);
        index = abs(index);
        if (Int(static_cast<long>(s.W.size())) * index > caps.wprime_cap)
            throw explosion_guard_error("coset blow-up at " + pd.label);
        // V^{-1} rows give the quotient coordinates; enumerate the box
        // z in prod [0, d_k) and map z * V^{-1} * L
        IMat Vinv(n, n);
        {
            // invert the unimodular V by solving V x = e_i columnwise
            auto h = hnf_z(snf.V);  // U V = I-ish; easier: adjugate via solve
            for (int col = 0; col < n; ++col) {
                std::vector<Int> e(static_cast<size_t>(n), Int(0));
                e[static_cast<size_t>(col)] = 1;
                auto x = solve_left(snf.V, e);  // x * V = e
                if (!x) throw error("sieve_step: V not invertible");
                for (int j = 0; j < n; ++j) Vinv.at(col, j) = (*x)[static_cast<size_t>(j)];
            }
            (void)h;
        }
        std::vector<Int> dims;
        for (int i = 0; i < n; ++i) dims.push_back(abs(snf.D.at(i, i)));
        std::vector<Int> z(static_cast<size_t>(n), Int(0));
        while (true) {
            // rep = z * Vinv * L  (z viewed in the quotient box)
            std::vector<Int> y(static_cast<size_t>(n), Int(0));
            for (int j = 0; j < n; ++j) {
                Int acc = 0;
                for (int i = 0; i < n; ++i) acc += z[static_cast<size_t>(i)] * Vinv.at(i, j);
                y[static_cast<size_t>(j)] = acc;
            }
            std::vector<Int> rep(static_cast<size_t>(n), Int(0));
            for (int j = 0; j < n; ++j) {
                Int acc = 0;
                for (int i = 0; i < n; ++i) acc += y[static_cast<size_t>(i)] * s.L.at(i, j);
                rep[static_cast<size_t>(j)] = acc;
            }
            reps.push_back(rep);
            int k = 0;
            while (k < n) {
                z[static_cast<size_t>(k)] += 1;
                if (z[static_cast<size_t>(k)] < dims[static_cast<size_t>(k)]) break;
                z[static_cast<size_t>(k)] = 0;
                ++k;
            }
            if (k == n) break;
        }
    }

    // W' = W + reps, filtered by membership of the reduction in j(C(k_v))
    std::vector<std::vector<Int>> Wnext;
    std::set<std::vector<Int>> seen;
    for (const auto& w : s.W)
        for (const auto& q : reps) {
            std::vector<Int> cand(static_cast<size_t>(n));
            for (int j = 0; j < n; ++j) cand[static_cast<size_t>(j)] = w[static_cast<size_t>(j)] + q[static_cast<size_t>(j)];
            if (!pd.aj_image.count(place_image(pd, cand))) continue;
            auto canon = box_reduce(Lnext, cand);
            if (seen.insert(canon).second) Wnext.push_back(std::move(canon));
        }

    s.L = Lnext;
    s.W = std::move(Wnext);
    s.places_used.push_back(pd.label);
    s.w_trace.push_back(s.W.size());
    (void)m;

    // soundness witness: every known point stays covered
    for (const auto& dq : mw.decomp) {
        bool covered = false;
        for (const auto& w : s.W) {
            std::vector<Int> diff(static_cast<size_t>(n));
            for (int j = 0; j < n; ++j) diff[static_cast<size_t>(j)] = dq[static_cast<size_t>(j)] - w[static_cast<size_t>(j)];
            if (lattice_contains(s.L, diff)) { covered = true; break; }
        }
        if (!covered) throw error("sieve soundness witness failed");
    }
}

// ---------------------------------------------------------------------------
// Saturation: prove q does not divide the index [J(K) : L_0]
// ---------------------------------------------------------------------------

struct SaturationRecord {
    Int q;
    bool proven = false;
    bool vacuous = false;
    std::vector<std::string> places;
    // torsion-completeness certificate: min q-part of #J(k_v) over places
    // with residue characteristic != q must match the input torsion
    bool torsion_bound_ok = false;
    long torsion_bound_exp = -1;
};

struct OrderedPlace {
    Place v;
    Int order;
};

inline SaturationRecord saturation_check(const AbstractMW& mw, const Int& q,
                                         const std::vector<OrderedPlace>& places, u64 seed,
                                         int place_budget = 24) {
    SaturationRecord rec;
    rec.q = q;

    long input_exp = 0;
    for (const auto& t : mw.torsion_orders) input_exp += ord_at(t, q);
    long bound = -1;
    for (const auto& op : places) {
        if (op.v.p == q) continue;
        long e = ord_at(op.order, q);
        if (bound < 0 || e < bound) bound = e;
        if (bound == input_exp) break;
    }
    rec.torsion_bound_exp = bound;
    rec.torsion_bound_ok = (bound >= 0 && bound == input_exp);

    std::vector<int> dims;
    for (int i = 0; i < mw.rank(); ++i) dims.push_back(i);
    for (size_t j = 0; j < mw.torsion_orders.size(); ++j)
        if (mw.torsion_orders[j] % q == 0) dims.push_back(mw.rank() + static_cast<int>(j));
    if (dims.empty()) {
        rec.proven = rec.torsion_bound_ok;
        rec.vacuous = true;
        return rec;
    }

    u64 qq = q.get_ui();
    std::vector<std::vector<u64>> kernel;
    for (size_t i = 0; i < dims.size(); ++i) {
        std::vector<u64> e(dims.size(), 0);
        e[i] = 1;
        kernel.push_back(std::move(e));
    }
    int used = 0;
    for (const auto& op : places) {
        if (kernel.empty()) break;
        if (used >= place_budget) break;
        if (op.v.p == q) continue;      // reduction loses q-information at q
        if (op.order % q != 0) continue;  // J(k_v)/q J(k_v) is trivial

        const auto& K = *mw.K;
        FqField kv(op.v.p_u64(), op.v.factor_mod_p);
        auto Cv = reduce_curve(K, *mw.C, op.v, kv);
        JacobianGroup J(kv, Cv, seed, Int(1) << 20, q);
        if (!J.info().structure_known) continue;
        ++used;
        int m = static_cast<int>(J.info().invariant_orders.size());
        if (m == 0) continue;
        // images of the active generators in the q-Sylow coordinates, mod q
        std::vector<std::vector<u64>> gen_img;
        for (int idx : dims) {
            auto red = reduce_divisor(K, *mw.C, mw.generator(idx), op.v, kv, Cv);
            auto c = J.coords(red);
            std::vector<u64> row;
            for (int k = 0; k < m; ++k) row.push_back(mod_floor(c[static_cast<size_t>(k)], q).get_ui());
            gen_img.push_back(std::move(row));
        }
        // restrict the map to the current kernel and take its nullspace
        size_t rows = kernel.size(), cols = static_cast<size_t>(m);
        std::vector<std::vector<u64>> aug;
        for (const auto& kvec : kernel) {
            std::vector<u64> row(cols, 0);
            for (size_t i = 0; i < dims.size(); ++i) {
                if (!kvec[i]) continue;
                for (size_t c = 0; c < cols; ++c)
                    row[c] = addmod(row[c], mulmod(kvec[i], gen_img[i][c], qq), qq);
            }
            aug.push_back(std::move(row));
        }
        std::vector<std::vector<u64>> trans;
        for (size_t i = 0; i < rows; ++i) {
            std::vector<u64> e(rows, 0);
            e[i] = 1;
            trans.push_back(std::move(e));
        }
        size_t rk = 0;
        for (size_t c = 0; c < cols && rk < rows; ++c) {
            size_t piv = rows;
            for (size_t r = rk; r < rows; ++r)
                if (aug[r][c]) { piv = r; break; }
            if (piv == rows) continue;
            std::swap(aug[piv], aug[rk]);
            std::swap(trans[piv], trans[rk]);
            u64 inv = invmod(aug[rk][c], qq);
            for (size_t r = 0; r < rows; ++r) {
                if (r == rk) continue;
                u64 fmul = mulmod(aug[r][c], inv, qq);
                if (!fmul) continue;
                for (size_t cc = 0; cc < cols; ++cc)
                    aug[r][cc] = submod(aug[r][cc], mulmod(fmul, aug[rk][cc], qq), qq);
                for (size_t cc = 0; cc < rows; ++cc)
                    trans[r][cc] = submod(trans[r][cc], mulmod(fmul, trans[rk][cc], qq), qq);
            }
            ++rk;
        }
        std::vector<std::vector<u64>> next;
        for (size_t r = rk; r < rows; ++r) {
            std::vector<u64> vec(dims.size(), 0);
            bool nz = false;
            for (size_t i = 0; i < rows; ++i) {
                if (!trans[r][i]) continue;
                for (size_t jj = 0; jj < dims.size(); ++jj)
                    vec[jj] = addmod(vec[jj], mulmod(trans[r][i], kernel[i][jj], qq), qq);
            }
            for (auto x : vec) nz = nz || x;
            if (nz) next.push_back(std::move(vec));
        }
        if (next.size() < kernel.size()) rec.places.push_back(op.v.label());
        kernel = std::move(next);
    }
    rec.proven = kernel.empty() && rec.torsion_bound_ok;
    return rec;
}

// ---------------------------------------------------------------------------
// Theorem-3 orchestration
// ---------------------------------------------------------------------------

struct VerifyConfig {
    Int smooth_bound = 75;       // B
    Int place_qmax = 400;        // rational primes scanned for sieve places
    Int q_cap = Int(1) << 20;    // residue field size cap
    Int prime_pool_max = 200;    // candidate p for the unit-ball criterion
    SieveCaps caps;
    CriterionConfig criterion;
    u64 seed = 1;
    int max_places = 64;
    // optional pinned schedule: place labels like "109.0" in order
    std::vector<std::string> schedule_override;
};

struct WitnessRecord {
    std::vector<Int> w;
    int point_index = -1;
    Int p = 0;
    int h = 0;
    int rank = 0;
    bool unique_in_ball = false;
    long denom_exp = 0;
    int trusted_digits = 0;
    std::vector<std::vector<u64>> matrix_mod_p;  // U-dependent
};

struct Certificate {
    bool certified = false;
    std::string failure;
    std::vector<SaturationRecord> saturation;
    SieveState sieve;
    std::vector<WitnessRecord> witnesses;
    std::vector<std::string> place_pool;  // admissible places considered
    VerifyConfig config;
};

// deterministic scan of candidate sieve places
inline std::vector<Place> scan_places(const NumberField& K, const Int& qmax) {
    std::vector<Place> out;
    for (Int p = 3; p <= qmax; p += 2) {
        if (!is_prime(p)) continue;
        try {
            for (auto& v : K.split_prime(p)) out.push_back(std::move(v));
        } catch (const ramified_prime_error&) {
            continue;
        }
    }
    return out;
}

// per-p data needed by conditions (c) and (d) of the certification
struct PrimeBundle {
    Int p;
    std::vector<PlaceData> places;
    bool smooth = true;
};

inline std::optional<PrimeBundle> make_prime_bundle(const AbstractMW& mw, const Int& p,
                                                    const VerifyConfig& cfg) {
    const auto& K = *mw.K;
    PrimeBundle b;
    b.p = p;
    std::vector<Place> places;
    try {
        places = K.split_prime(p);
    } catch (const ramified_prime_error&) {
        return std::nullopt;
    }
    for (const auto& v : places) {
        auto rep = admissible_place(K, *mw.C, v, cfg.smooth_bound, cfg.q_cap);
        if (!rep.admissible()) return std::nullopt;
        auto pd = make_place_data(mw, v, cfg.seed);
        if (!pd) return std::nullopt;
        b.places.push_back(std::move(*pd));
    }
    return b;
}

// conditions (c)+(d) for a coset w at p: the refined lattice dies in every
// J(k_v), and some known point matches w in every J(k_v)
inline int match_point_at(const AbstractMW& mw, const PrimeBundle& b, const SieveState& s,
                          const std::vector<Int>& w) {
    for (const auto& pd : b.places)
        for (int i = 0; i < s.L.nr; ++i) {
            std::vector<Int> row(static_cast<size_t>(s.n));
            for (int j = 0; j < s.n; ++j) row[static_cast<size_t>(j)] = s.L.at(i, j);
            if (!maps_to_zero(pd, row)) return -2;  // L_s not in the kernel at p
        }
    for (size_t q = 0; q < mw.decomp.size(); ++q) {
        bool all = true;
        for (const auto& pd : b.places) {
            std::vector<Int> diff(static_cast<size_t>(s.n));
            for (int j = 0; j < s.n; ++j)
                diff[static_cast<size_t>(j)] =
                    mw.decomp[q][static_cast<size_t>(j)] - w[static_cast<size_t>(j)];
            if (!maps_to_zero(pd, diff)) { all = false; break; }
        }
        if (all) return static_cast<int>(q);
    }
    return -1;
}

inline Certificate theorem3_verify(const AbstractMW& mw, const VerifyConfig& cfg) {
    const auto& K = *mw.K;
    Certificate cert;
    cert.config = cfg;
    mw.verify();

    // 1. place scan: good places with orders, and the smooth structured pool
    std::vector<OrderedPlace> good_places;
    std::vector<PlaceData> pool;
    std::vector<std::string> pool_labels;
    auto want = [&](const std::string& label) {
        if (cfg.schedule_override.empty()) return true;
        for (const auto& s : cfg.schedule_override)
            if (s == label) return true;
        return false;
    };
    for (const auto& v : scan_places(K, cfg.place_qmax)) {
        auto rep = admissible_place(K, *mw.C, v, cfg.smooth_bound, cfg.q_cap);
        if (!rep.good_reduction || !rep.within_cap) continue;
        good_places.push_back({v, rep.order});
        if (!rep.smooth) continue;
        if (static_cast<int>(pool.size()) >= cfg.max_places && cfg.schedule_override.empty())
            continue;
        if (!want(v.label())) continue;
        auto pd = make_place_data(mw, v, cfg.seed);
        if (!pd) continue;
        pool_labels.push_back(pd->label);
        pool.push_back(std::move(*pd));
    }
    cert.place_pool = pool_labels;

    // 2. saturation for every prime below B
    bool saturated = true;
    for (Int q = 2; q < cfg.smooth_bound; q += (q == 2 ? 1 : 2)) {
        if (!is_prime(q)) continue;
        auto rec = saturation_check(mw, q, good_places, cfg.seed);
        saturated = saturated && rec.proven;
        cert.saturation.push_back(std::move(rec));
    }
    if (!saturated) {
        cert.failure = "saturation incomplete below the smoothness bound";
        return cert;
    }

    // 3. sieve chain
    auto state = sieve_initial(mw);
    if (!cfg.schedule_override.empty()) {
        for (const auto& label : cfg.schedule_override) {
            const PlaceData* pd = nullptr;
            for (const auto& c : pool)
                if (c.label == label) pd = &c;
            if (!pd) {
                cert.failure = "pinned schedule names an unusable place: " + label;
                cert.sieve = state;
                return cert;
            }
            sieve_step(mw, state, *pd, cfg.caps);
        }
    } else {
        for (const auto& pd : pool) {
            auto before_index = lattice_index(state.L);
            auto before_W = state.W.size();
            try {
                sieve_step(mw, state, pd, cfg.caps);
            } catch (const explosion_guard_error&) {
                continue;  // deterministic skip, try the next place
            }
            if (lattice_index(state.L) == before_index && state.W.size() == before_W) {
                state.places_used.pop_back();
                state.w_trace.pop_back();
            }
        }
    }
    cert.sieve = state;

    // 4. per-coset certification through the unit-ball criterion
    std::map<std::string, std::shared_ptr<CriterionSession>> sessions;
    std::map<std::string, std::optional<PrimeBundle>> bundles;
    std::vector<Mumford<NumberField>> basis = mw.free_gens;
    for (const auto& t : mw.torsion_gens) basis.push_back(t), (void)t;

    for (const auto& w : state.W) {
        bool done = false;
        for (Int p = 3; p <= cfg.prime_pool_max && !done; p += 2) {
            if (!is_prime(p)) continue;
            auto key = p.get_str();
            if (!bundles.count(key)) bundles[key] = make_prime_bundle(mw, p, cfg);
            const auto& b = bundles[key];
            if (!b) continue;
            int qi = match_point_at(mw, *b, state, w);
            if (qi < 0) continue;
            if (!sessions.count(key)) {
                try {
                    sessions[key] = std::make_shared<CriterionSession>(K, *mw.C, mw.free_gens, p,
                                                                       cfg.criterion);
                } catch (const rank_defect_error&) {
                    bundles[key] = std::nullopt;
                    continue;
                }
            }
            auto data = sessions[key]->check(mw.points[static_cast<size_t>(qi)]);
            if (data.verdict != Verdict::UniqueInBall) continue;
            WitnessRecord rec;
            rec.w = w;
            rec.point_index = qi;
            rec.p = p;
            rec.h = data.h;
            rec.rank = data.rank;
            rec.unique_in_ball = true;
            rec.denom_exp = data.denom_exp;
            rec.trusted_digits = data.trusted_digits;
            rec.matrix_mod_p = data.M_mod_p;
            cert.witnesses.push_back(std::move(rec));
            done = true;
        }
        if (!done) {
            cert.failure = "no usable prime for a surviving coset";
            return cert;
        }
    }
    cert.certified = true;
    return cert;
}

}  // namespace mordell
