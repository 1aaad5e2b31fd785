#pragma once

#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "mordell/base.hpp"
#include "mordell/finitefield.hpp"
#include "mordell/lattice.hpp"
#include "mordell/mumford.hpp"

namespace mordell {

// ---------------------------------------------------------------------------
// Point counting over F_{q^k}, k = 1, 2, by enumeration with a squares table.
// ---------------------------------------------------------------------------

namespace detail {

template <class F>
Int count_points_enum(const F& kq, const PolyOf<F>& f) {
    Int q = kq.order();
    if (q > Int(1) << 22) throw budget_exhausted_error("field too large for enumeration");
    size_t qs = static_cast<size_t>(q.get_ui());
    std::vector<bool> sq(qs, false);
    for (size_t i = 0; i < qs; ++i) {
        auto r = kq.from_index(Int(static_cast<unsigned long>(i)));
        sq[static_cast<size_t>(kq.to_index(kq.mul(r, r)).get_ui())] = true;
    }
    Int n = 1;  // the point at infinity
    for (size_t i = 0; i < qs; ++i) {
        auto x = kq.from_index(Int(static_cast<unsigned long>(i)));
        auto v = poly_eval(kq, f, x);
        if (kq.is_zero(v))
            n += 1;
        else if (sq[static_cast<size_t>(kq.to_index(v).get_ui())])
            n += 2;
    }
    return n;
}

}  // namespace detail

// N_k for the genus-2 model over F_{q^k}; k = 1 or 2.
inline Int count_points(const FqField& kv, const CurveModel<FqField>& C, int ext) {
    if (ext == 1) return detail::count_points_enum(kv, C.f);
    if (ext != 2) throw error("count_points supports extension degrees 1 and 2");
    Fq2Field k2(kv);
    PolyOf<Fq2Field> f2;
    for (const auto& c : C.f) f2.push_back(k2.lift(c));
    return detail::count_points_enum(k2, f2);
}

// #J(F_q) from the zeta numerator determined by N_1, N_2.
inline Int jacobian_order(const FqField& kv, const CurveModel<FqField>& C) {
    Int q = kv.order();
    Int n1 = count_points(kv, C, 1);
    Int n2 = count_points(kv, C, 2);
    Int s1 = q + 1 - n1;
    Int p2 = q * q + 1 - n2;
    Int s2 = (s1 * s1 - p2) / 2;
    Int order = 1 + q * q - (1 + q) * s1 + s2;
    if (order <= 0) throw error("jacobian_order: nonpositive result");
    return order;
}

// ---------------------------------------------------------------------------
// Random divisor classes
// ---------------------------------------------------------------------------

inline CurvePoint<FqField> random_point(const FqField& kv, const CurveModel<FqField>& C,
                                        std::mt19937_64& rng) {
    Int q = kv.order();
    while (true) {
        Int i = mod_floor(Int(static_cast<unsigned long>(rng())), q);
        auto x = kv.from_index(i);
        auto fx = poly_eval(kv, C.f, x);
        if (kv.is_zero(fx)) return CurvePoint<FqField>::affine(x, kv.zero());
        if (!kv.is_square(fx)) continue;
        auto y = kv.sqrt(fx);
        if (rng() & 1) y = kv.neg(y);
        return CurvePoint<FqField>::affine(x, y);
    }
}

// Uniform-enough class sampling: alternates split divisors (two rational
// points) with conjugate pairs of F_{q^2}-points, which the split kind
// alone does not always generate.
class ClassSampler {
  public:
    ClassSampler(const FqField& kv, const CurveModel<FqField>& C)
        : kv_(&kv), C_(&C), k2_(kv) {
        for (const auto& c : C.f) f2_.push_back(k2_.lift(c));
        // 2-torsion pool: classes (u, 0) for monic u | f of degree <= 2;
        // these are not reachable through the point samplers
        auto factors = fq_factor_squarefree(kv, kv.order(), C.f, 11);
        std::vector<PolyOf<FqField>> linear;
        for (const auto& g : factors) {
            if (poly_deg<FqField>(g) == 1) linear.push_back(g);
            if (poly_deg<FqField>(g) == 2) pool_.push_back({g, {}});
        }
        for (size_t i = 0; i < linear.size(); ++i)
            for (size_t j = i + 1; j < linear.size(); ++j)
                pool_.push_back({poly_mul(kv, linear[i], linear[j]), {}});
        for (const auto& g : linear) pool_.push_back({g, {}});
    }

    Mumford<FqField> operator()(std::mt19937_64& rng) const {
        const FqField& kv = *kv_;
        if (!pool_.empty() && rng() % 8 == 0) return pool_[rng() % pool_.size()];
        u64 kind = rng() % 3;
        if (kind == 0) {
            // degree-1 class [P - infinity]
            return mumford_from_point(kv, *C_, random_point(kv, *C_, rng));
        }
        if (kind == 1) {
            auto P1 = random_point(kv, *C_, rng);
            auto P2 = random_point(kv, *C_, rng);
            return mumford_from_point_pair(kv, *C_, P1, P2);
        }
        // conjugate pair over the quadratic extension
        for (int tries = 0; tries < 4 * 64; ++tries) {
            Int i = mod_floor(Int(static_cast<unsigned long>(rng())) *
                                  Int(static_cast<unsigned long>(rng() | 1)),
                              k2_.order());
            auto x = k2_.from_index(i);
            auto fx = poly_eval(k2_, f2_, x);
            if (k2_.is_zero(fx) || !k2_.is_square(fx)) continue;
            auto xq = k2_.frobenius(x);
            if (k2_.eq(xq, x)) continue;  // rational x: handled by the split kind
            auto y = k2_.sqrt(fx);
            if (rng() & 1) y = k2_.neg(y);
            auto yq = k2_.frobenius(y);
            auto slope = k2_.div(k2_.sub(y, yq), k2_.sub(x, xq));
            auto v0 = k2_.sub(y, k2_.mul(slope, x));
            auto tr = k2_.add(x, xq);
            auto nm = k2_.mul(x, xq);
            auto down = [&](const Fq2Field::Elem& e) {
                if (!kv.is_zero(e.second)) throw error("conjugate data not rational");
                return e.first;
            };
            PolyOf<FqField> u{down(nm), kv.neg(down(tr)), kv.one()};
            PolyOf<FqField> v{down(v0), down(slope)};
            poly_trim(kv, v);
            return mumford_make(kv, *C_, u, v);
        }
        // fall back on a split divisor
        auto P1 = random_point(kv, *C_, rng);
        auto P2 = random_point(kv, *C_, rng);
        return mumford_from_point_pair(kv, *C_, P1, P2);
    }

  private:
    const FqField* kv_;
    const CurveModel<FqField>* C_;
    Fq2Field k2_;
    PolyOf<Fq2Field> f2_;
    std::vector<Mumford<FqField>> pool_;
};

inline Mumford<FqField> random_class(const FqField& kv, const CurveModel<FqField>& C,
                                     std::mt19937_64& rng) {
    return ClassSampler(kv, C)(rng);
}

// order of an element given a factored annihilating integer
inline Int element_order(const FqField& kv, const CurveModel<FqField>& C, const Mumford<FqField>& D,
                         const Int& mult, const std::vector<std::pair<Int, unsigned>>& fac) {
    if (!mumford_is_identity(kv, scalar_mul(kv, C, mult, D)))
        throw error("element_order: multiplier does not annihilate");
    Int ord = mult;
    for (const auto& [ell, e] : fac) {
        for (unsigned i = 0; i < e; ++i) {
            Int cand = ord / ell;
            if (mumford_is_identity(kv, scalar_mul(kv, C, cand, D)))
                ord = cand;
            else
                break;
        }
    }
    return ord;
}

// ---------------------------------------------------------------------------
// Group structure: basis with invariant factors, plus discrete logarithms.
// ---------------------------------------------------------------------------

struct FiniteGroupInfo {
    Int order = 1;
    std::vector<std::pair<Int, unsigned>> factorization;
    std::vector<Mumford<FqField>> generators;   // direct-sum basis
    std::vector<Int> invariant_orders;          // ord(generators[i]), descending
    bool structure_known = false;
    u64 seed = 0;
};

class JacobianGroup {
  public:
    // restrict_prime != 0 builds only that prime's Sylow subgroup; the
    // coordinates then describe the image in the Sylow direct summand.
    JacobianGroup(FqField kv, CurveModel<FqField> C, u64 seed = 1,
                  Int enumeration_cap = Int(1) << 20, Int restrict_prime = 0)
        : kv_(std::move(kv)), C_(std::move(C)), cap_(std::move(enumeration_cap)) {
        info_.seed = seed;
        info_.order = jacobian_order(kv_, C_);
        auto full = factorize(info_.order);
        if (restrict_prime != 0) {
            for (auto& pe : full)
                if (pe.first == restrict_prime) info_.factorization.push_back(pe);
        } else {
            info_.factorization = full;
        }
        build_structure(seed);
    }

    const FqField& field() const { return kv_; }
    const CurveModel<FqField>& curve() const { return C_; }
    const FiniteGroupInfo& info() const { return info_; }
    const Int& order() const { return info_.order; }

    // coordinates on the basis (unique mod invariant_orders)
    std::vector<Int> coords(const Mumford<FqField>& y) const {
        if (!info_.structure_known) throw budget_exhausted_error("structure not available");
        std::vector<Int> out(info_.generators.size(), Int(0));
        for (const auto& [ell, a] : info_.factorization) {
            auto cy = sylow_dlog(y, ell, a);
            // CRT-combine into out coordinatewise
            for (size_t i = 0; i < out.size(); ++i) {
                Int ni = info_.invariant_orders[i];
                long ei = ni == 1 ? 0 : ord_at(ni, ell);
                if (ei == 0) continue;
                Int le = ipow(ell, static_cast<unsigned long>(ei));
                Int rest = ni / le;
                // out[i] mod le should become cy[i]
                Int cur = mod_floor(out[i], le);
                Int delta = mod_floor(cy[i] - cur, le);
                Int t = mod_floor(delta * invmod(mod_floor(rest, le), le), le);
                out[i] = mod_floor(out[i] + t * rest, ni);
            }
        }
        return out;
    }

    Mumford<FqField> from_coords(const std::vector<Int>& c) const {
        auto acc = mumford_identity(kv_);
        for (size_t i = 0; i < c.size(); ++i)
            acc = cantor_add(kv_, C_, acc,
                             scalar_mul(kv_, C_, mod_floor(c[i], info_.invariant_orders[i]),
                                        info_.generators[i]));
        return acc;
    }

  private:
    void build_structure(u64 seed) {
        std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + 1);
        ClassSampler sample(kv_, C_);
        size_t total_budget = 4096;
        for (const auto& [ell, a] : info_.factorization) {
            Int sylow_size = ipow(ell, a);
            if (sylow_size > cap_) { info_.structure_known = false; return; }
            Int cof = info_.order / sylow_size;

            // 1. collect generators until they span the full Sylow subgroup,
            //    tracking the subgroup size through an element table
            std::unordered_map<std::string, std::vector<Int>> table;
            std::vector<Mumford<FqField>> elems{mumford_identity(kv_)};
            std::vector<std::vector<Int>> reps{{}};
            table[mumford_key(kv_, elems[0])] = {};
            std::vector<Mumford<FqField>> gens;
            // the insert-time relations ell^{k_i} g_i = (combination of
            // g_j, j < i) generate the full relation lattice: they are
            // lower triangular with determinant = the subgroup order
            std::vector<std::vector<Int>> rel_rows;
            size_t tries = 0;
            while (Int(static_cast<long>(elems.size())) < sylow_size) {
                if (++tries > total_budget) { info_.structure_known = false; return; }
                auto y = scalar_mul(kv_, C_, cof, sample(rng));
                if (table.count(mumford_key(kv_, y))) continue;
                // smallest k with ell^k y inside the current table
                std::vector<Mumford<FqField>> ypows{y};
                while (!table.count(mumford_key(kv_, ypows.back())))
                    ypows.push_back(scalar_mul(kv_, C_, ell, ypows.back()));
                long k = static_cast<long>(ypows.size()) - 1;
                auto anchor = table.at(mumford_key(kv_, ypows.back()));
                gens.push_back(y);
                size_t gi = gens.size() - 1;
                {
                    std::vector<Int> row(gi + 1, Int(0));
                    for (size_t j = 0; j < anchor.size(); ++j) row[j] = -anchor[j];
                    row[gi] = ipow(ell, static_cast<unsigned long>(k));
                    rel_rows.push_back(std::move(row));
                }
                // extend the table by the new coset layers
                std::vector<Mumford<FqField>> base_elems = elems;
                std::vector<std::vector<Int>> base_reps = reps;
                Int lk = ipow(ell, static_cast<unsigned long>(k));
                for (Int j = 1; j < lk; ++j) {
                    auto shift = scalar_mul(kv_, C_, j, y);
                    for (size_t t = 0; t < base_elems.size(); ++t) {
                        auto e = cantor_add(kv_, C_, base_elems[t], shift);
                        auto rep = base_reps[t];
                        rep.resize(gi + 1, Int(0));
                        rep[gi] = j;
                        auto key = mumford_key(kv_, e);
                        if (!table.emplace(key, rep).second)
                            throw error("group structure: coset layers collide");
                        elems.push_back(std::move(e));
                        reps.push_back(std::move(rep));
                    }
                }
            }

            int t = static_cast<int>(gens.size());
            IMat rel(static_cast<int>(rel_rows.size()), t);
            for (size_t i = 0; i < rel_rows.size(); ++i)
                for (int j = 0; j < t; ++j)
                    rel.at(static_cast<int>(i), j) =
                        j < static_cast<int>(rel_rows[i].size()) ? rel_rows[i][static_cast<size_t>(j)] : Int(0);
            auto canon = lattice_canonical(rel, t);
            if (lattice_index(canon) != sylow_size)
                throw error("group structure: relation lattice incomplete");

            // 3. Smith form: with U rel V = D, the class of row j of V^{-1}
            //    generates the Z/d_j factor of Z^t / rowspan(rel)
            auto s = snf_z(canon);
            std::vector<std::pair<Int, Mumford<FqField>>> basis;  // (order, element)
            for (int j = 0; j < t; ++j) {
                Int dj = s.D.at(j, j);
                if (dj == 1) continue;
                std::vector<Int> e(static_cast<size_t>(t), Int(0));
                e[static_cast<size_t>(j)] = 1;
                auto x = solve_left(s.V, e);  // x * V = e_j
                if (!x) throw error("group structure: SNF transform not invertible");
                auto g = mumford_identity(kv_);
                for (int i = 0; i < t; ++i) {
                    Int c = mod_floor((*x)[static_cast<size_t>(i)], sylow_size);
                    if (c != 0)
                        g = cantor_add(kv_, C_, g,
                                       scalar_mul(kv_, C_, c, gens[static_cast<size_t>(i)]));
                }
                basis.emplace_back(dj, g);
            }
            std::sort(basis.begin(), basis.end(),
                      [](const auto& x, const auto& y) { return x.first > y.first; });
            sylow_basis_[ell] = basis;

            // 4. table of the ell-torsion layer for digit peeling
            auto& vt = torsion_tables_[ell];
            std::vector<Mumford<FqField>> vgens;
            std::vector<Int> vords;
            for (const auto& [dj, g] : basis) {
                long e = ord_at(dj, ell);
                vgens.push_back(scalar_mul(kv_, C_, dj / ell, g));
                vords.push_back(ell);
                (void)e;
            }
            std::vector<Mumford<FqField>> velems{mumford_identity(kv_)};
            std::vector<std::vector<Int>> vreps{std::vector<Int>(vgens.size(), Int(0))};
            vt[mumford_key(kv_, velems[0])] = vreps[0];
            for (size_t i = 0; i < vgens.size(); ++i) {
                auto base_e = velems;
                auto base_r = vreps;
                for (Int j = 1; j < ell; ++j) {
                    auto shift = scalar_mul(kv_, C_, j, vgens[i]);
                    for (size_t tt = 0; tt < base_e.size(); ++tt) {
                        auto e = cantor_add(kv_, C_, base_e[tt], shift);
                        auto rep = base_r[tt];
                        rep[i] = j;
                        vt.emplace(mumford_key(kv_, e), rep);
                        velems.push_back(e);
                        vreps.push_back(rep);
                    }
                }
            }
        }

        // merge the Sylow bases into global invariant factors
        size_t rank = 0;
        for (auto& [ell, basis] : sylow_basis_) rank = std::max(rank, basis.size());
        info_.generators.assign(rank, mumford_identity(kv_));
        info_.invariant_orders.assign(rank, Int(1));
        for (auto& [ell, basis] : sylow_basis_) {
            for (size_t i = 0; i < basis.size(); ++i) {
                info_.invariant_orders[i] *= basis[i].first;
                info_.generators[i] =
                    cantor_add(kv_, C_, info_.generators[i], basis[i].second);
            }
        }
        // descending divisibility: n_1 >= n_2 >= ... with n_{i+1} | n_i
        Int prod = 1;
        for (const auto& n : info_.invariant_orders) prod *= n;
        if (prod != info_.order) throw error("group structure: invariant factors do not multiply up");
        info_.structure_known = true;
    }

    // digit-peeling dlog inside the ell-Sylow subgroup
    std::vector<Int> sylow_dlog(const Mumford<FqField>& y0, const Int& ell, unsigned a) const {
        auto itb = sylow_basis_.find(ell);
        if (itb == sylow_basis_.end()) return {};
        const auto& basis = itb->second;
        const auto& vt = torsion_tables_.at(ell);
        Int cof = info_.order / ipow(ell, a);
        auto y = scalar_mul(kv_, C_, cof, y0);
        std::vector<Int> c(basis.size(), Int(0));
        long emax = basis.empty() ? 0 : ord_at(basis[0].first, ell);
        for (long t = 0; t < emax; ++t) {
            // residual = y - sum c_i b_i ; z = ell^{emax-1-t} * residual
            auto resid = y;
            for (size_t i = 0; i < basis.size(); ++i)
                if (c[i] != 0)
                    resid = cantor_add(kv_, C_, resid,
                                       mumford_neg(kv_, scalar_mul(kv_, C_, c[i], basis[i].second)));
            auto z = scalar_mul(kv_, C_, ipow(ell, static_cast<unsigned long>(emax - 1 - t)), resid);
            auto it = vt.find(mumford_key(kv_, z));
            if (it == vt.end())
                throw error("sylow_dlog: element outside the recorded group");
            for (size_t i = 0; i < basis.size(); ++i) {
                long ei = ord_at(basis[i].first, ell);
                long shift = t - (emax - ei);
                if (it->second[i] != 0) {
                    if (shift < 0) throw error("sylow_dlog: inconsistent digit");
                    c[i] = mod_floor(c[i] + it->second[i] * ipow(ell, static_cast<unsigned long>(shift)),
                                     basis[i].first);
                }
            }
        }
        // final consistency: the projection must equal sum c_i b_i
        auto resid = y;
        for (size_t i = 0; i < basis.size(); ++i)
            if (c[i] != 0)
                resid = cantor_add(kv_, C_, resid,
                                   mumford_neg(kv_, scalar_mul(kv_, C_, c[i], basis[i].second)));
        if (!mumford_is_identity(kv_, resid)) throw error("sylow_dlog: no solution");
        // c solves cof * y0 = sum c_i b_i; undo the cofactor twist so the
        // digits are coordinates of y0 itself
        for (size_t i = 0; i < basis.size(); ++i) {
            Int m = basis[i].first;
            c[i] = mod_floor(c[i] * invmod(mod_floor(cof, m), m), m);
        }
        return c;
    }

    FqField kv_;
    CurveModel<FqField> C_;
    Int cap_;
    FiniteGroupInfo info_;
    std::map<Int, std::vector<std::pair<Int, Mumford<FqField>>>> sylow_basis_;
    std::map<Int, std::unordered_map<std::string, std::vector<Int>>> torsion_tables_;
};

// ---------------------------------------------------------------------------
// dlog_solve: coordinates of targets on an arbitrary generating list.
// ---------------------------------------------------------------------------

inline std::optional<IMat> dlog_solve(const JacobianGroup& J,
                                      const std::vector<Mumford<FqField>>& targets,
                                      const std::vector<Mumford<FqField>>& gens) {
    const auto& info = J.info();
    int m = static_cast<int>(info.generators.size());
    int t = static_cast<int>(gens.size());
    IMat X(t, m);
    for (int i = 0; i < t; ++i) {
        auto c = J.coords(gens[static_cast<size_t>(i)]);
        for (int j = 0; j < m; ++j) X.at(i, j) = c[static_cast<size_t>(j)];
    }
    IMat out(static_cast<int>(targets.size()), t);
    for (size_t k = 0; k < targets.size(); ++k) {
        auto c = J.coords(targets[k]);
        // solve a * X = c  (mod invariant orders): stack moduli rows
        IMat S(t + m, m);
        for (int i = 0; i < t; ++i)
            for (int j = 0; j < m; ++j) S.at(i, j) = X.at(i, j);
        for (int j = 0; j < m; ++j) S.at(t + j, j) = info.invariant_orders[static_cast<size_t>(j)];
        std::vector<Int> b(static_cast<size_t>(m));
        for (int j = 0; j < m; ++j) b[static_cast<size_t>(j)] = c[static_cast<size_t>(j)];
        auto sol = solve_left(S, b);
        if (!sol) return std::nullopt;
        for (int i = 0; i < t; ++i) out.at(static_cast<int>(k), i) = (*sol)[static_cast<size_t>(i)];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Abel-Jacobi image of C(F_q), as coordinate vectors on the group basis.
// ---------------------------------------------------------------------------

inline std::set<std::vector<Int>> aj_image_set(const JacobianGroup& J,
                                               const CurvePoint<FqField>& base) {
    const auto& kv = J.field();
    const auto& C = J.curve();
    std::set<std::vector<Int>> out;
    auto base_div = mumford_from_point(kv, C, base);
    Int q = kv.order();
    // infinity
    out.insert(J.coords(cantor_sub(kv, C, mumford_identity(kv), base_div)));
    for (Int i = 0; i < q; ++i) {
        auto x = kv.from_index(i);
        auto fx = poly_eval(kv, C.f, x);
        if (kv.is_zero(fx)) {
            auto P = CurvePoint<FqField>::affine(x, kv.zero());
            out.insert(J.coords(cantor_sub(kv, C, mumford_from_point(kv, C, P), base_div)));
        } else if (kv.is_square(fx)) {
            auto y = kv.sqrt(fx);
            for (int sgn = 0; sgn < 2; ++sgn) {
                auto P = CurvePoint<FqField>::affine(x, sgn ? kv.neg(y) : y);
                out.insert(J.coords(cantor_sub(kv, C, mumford_from_point(kv, C, P), base_div)));
            }
        }
    }
    return out;
}

}  // namespace mordell
