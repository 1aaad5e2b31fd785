#pragma once

#include <optional>
#include <vector>

#include "mordell/base.hpp"

namespace mordell {

// Integer matrices (row-major) and the normal forms the sieve needs.  All
// dimensions here are tiny (rank + torsion generators), so the classical
// algorithms with exact arithmetic are the right tool.

struct IMat {
    int nr = 0, nc = 0;
    std::vector<Int> a;
    IMat() = default;
    IMat(int r, int c) : nr(r), nc(c), a(static_cast<size_t>(r) * c, Int(0)) {}
    Int& at(int i, int j) { return a[static_cast<size_t>(i) * nc + static_cast<size_t>(j)]; }
    const Int& at(int i, int j) const {
        return a[static_cast<size_t>(i) * nc + static_cast<size_t>(j)];
    }
    static IMat identity(int n) {
        IMat m(n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }
    bool operator==(const IMat& o) const { return nr == o.nr && nc == o.nc && a == o.a; }
};

inline IMat imat_mul(const IMat& A, const IMat& B) {
    IMat C(A.nr, B.nc);
    for (int i = 0; i < A.nr; ++i)
        for (int k = 0; k < A.nc; ++k) {
            if (A.at(i, k) == 0) continue;
            for (int j = 0; j < B.nc; ++j) C.at(i, j) += A.at(i, k) * B.at(k, j);
        }
    return C;
}

// Row-style Hermite normal form with transform: U*A = H, U unimodular,
// H upper-triangular-echelon with positive pivots, entries above pivots
// reduced.  Returns rank.
struct ZHnf {
    IMat U, H;
    int rank = 0;
    std::vector<int> pivot_cols;
};

inline ZHnf hnf_z(const IMat& A) {
    ZHnf r;
    r.H = A;
    r.U = IMat::identity(A.nr);
    int row = 0;
    for (int col = 0; col < A.nc && row < A.nr; ++col) {
        // gcd-eliminate the column below `row`
        while (true) {
            int piv = -1;
            Int best;
            for (int i = row; i < A.nr; ++i) {
                Int v = abs(r.H.at(i, col));
                if (v != 0 && (piv < 0 || v < best)) { piv = i; best = v; }
            }
            if (piv < 0) break;
            if (piv != row)
                for (int j = 0; j < A.nc; ++j) {
                    std::swap(r.H.at(piv, j), r.H.at(row, j));
                }
            if (piv != row)
                for (int j = 0; j < A.nr; ++j) std::swap(r.U.at(piv, j), r.U.at(row, j));
            bool clean = true;
            for (int i = row + 1; i < A.nr; ++i) {
                if (r.H.at(i, col) == 0) continue;
                Int q = r.H.at(i, col) / r.H.at(row, col);  // truncated division
                if (q != 0) {
                    for (int j = 0; j < A.nc; ++j) r.H.at(i, j) -= q * r.H.at(row, j);
                    for (int j = 0; j < A.nr; ++j) r.U.at(i, j) -= q * r.U.at(row, j);
                }
                if (r.H.at(i, col) != 0) clean = false;
            }
            if (clean) break;
        }
        if (r.H.at(row, col) == 0) continue;
        if (r.H.at(row, col) < 0) {
            for (int j = 0; j < A.nc; ++j) r.H.at(row, j) = -r.H.at(row, j);
            for (int j = 0; j < A.nr; ++j) r.U.at(row, j) = -r.U.at(row, j);
        }
        // reduce entries above the pivot
        for (int i = 0; i < row; ++i) {
            Int q;
            mpz_fdiv_q(q.get_mpz_t(), r.H.at(i, col).get_mpz_t(), r.H.at(row, col).get_mpz_t());
            if (q != 0) {
                for (int j = 0; j < A.nc; ++j) r.H.at(i, j) -= q * r.H.at(row, j);
                for (int j = 0; j < A.nr; ++j) r.U.at(i, j) -= q * r.U.at(row, j);
            }
        }
        r.pivot_cols.push_back(col);
        ++row;
    }
    r.rank = row;
    return r;
}

// Smith normal form with transforms: U*A*V = D, diagonal d_1 | d_2 | ...
struct ZSnf {
    IMat U, V, D;
};

inline ZSnf snf_z(const IMat& A) {
    ZSnf r;
    r.D = A;
    r.U = IMat::identity(A.nr);
    r.V = IMat::identity(A.nc);
    int n = std::min(A.nr, A.nc);
    for (int t = 0; t < n; ++t) {
        while (true) {
            // find a nonzero pivot in the remaining block
            int pi = -1, pj = -1;
            Int best;
            for (int i = t; i < A.nr; ++i)
                for (int j = t; j < A.nc; ++j) {
                    Int v = abs(r.D.at(i, j));
                    if (v != 0 && (pi < 0 || v < best)) { pi = i; pj = j; best = v; }
                }
            if (pi < 0) break;
            if (pi != t) {
                for (int j = 0; j < A.nc; ++j) std::swap(r.D.at(pi, j), r.D.at(t, j));
                for (int j = 0; j < A.nr; ++j) std::swap(r.U.at(pi, j), r.U.at(t, j));
            }
            if (pj != t) {
                for (int i = 0; i < A.nr; ++i) std::swap(r.D.at(i, pj), r.D.at(i, t));
                for (int i = 0; i < A.nc; ++i) std::swap(r.V.at(i, pj), r.V.at(i, t));
            }
            bool dirty = false;
            for (int i = t + 1; i < A.nr; ++i) {
                Int q = r.D.at(i, t) / r.D.at(t, t);
                if (q != 0) {
                    for (int j = 0; j < A.nc; ++j) r.D.at(i, j) -= q * r.D.at(t, j);
                    for (int j = 0; j < A.nr; ++j) r.U.at(i, j) -= q * r.U.at(t, j);
                }
                if (r.D.at(i, t) != 0) dirty = true;
            }
            for (int j = t + 1; j < A.nc; ++j) {
                Int q = r.D.at(t, j) / r.D.at(t, t);
                if (q != 0) {
                    for (int i = 0; i < A.nr; ++i) r.D.at(i, j) -= q * r.D.at(i, t);
                    for (int i = 0; i < A.nc; ++i) r.V.at(i, j) -= q * r.V.at(i, t);
                }
                if (r.D.at(t, j) != 0) dirty = true;
            }
            if (!dirty) {
                // check divisibility of the rest; fold offenders into column t
                bool fixed = true;
                for (int i = t + 1; i < A.nr && fixed; ++i)
                    for (int j = t + 1; j < A.nc && fixed; ++j)
                        if (r.D.at(i, j) % r.D.at(t, t) != 0) {
                            for (int jj = 0; jj < A.nc; ++jj)
                                r.D.at(t, jj) += r.D.at(i, jj);
                            for (int jj = 0; jj < A.nr; ++jj)
                                r.U.at(t, jj) += r.U.at(i, jj);
                            fixed = false;
                        }
                if (fixed) break;
            }
        }
        if (r.D.at(t, t) < 0) {
            for (int j = 0; j < A.nc; ++j) r.D.at(t, j) = -r.D.at(t, j);
            for (int j = 0; j < A.nr; ++j) r.U.at(t, j) = -r.U.at(t, j);
        }
    }
    return r;
}

// Solve x * A = b over Z (x integral row vector); A given, b row vector.
inline std::optional<std::vector<Int>> solve_left(const IMat& A, const std::vector<Int>& b) {
    // HNF of A: U A = H; solve y H = b by back-substitution, then x = y U.
    auto h = hnf_z(A);
    std::vector<Int> y(static_cast<size_t>(A.nr), Int(0));
    std::vector<Int> rem = b;
    for (int r = 0; r < h.rank; ++r) {
        int c = h.pivot_cols[static_cast<size_t>(r)];
        Int q = rem[static_cast<size_t>(c)];
        if (q % h.H.at(r, c) != 0) return std::nullopt;
        q /= h.H.at(r, c);
        y[static_cast<size_t>(r)] = q;
        if (q != 0)
            for (int j = 0; j < A.nc; ++j) rem[static_cast<size_t>(j)] -= q * h.H.at(r, j);
    }
    for (const auto& v : rem)
        if (v != 0) return std::nullopt;
    std::vector<Int> x(static_cast<size_t>(A.nr), Int(0));
    for (int j = 0; j < A.nr; ++j)
        for (int i = 0; i < A.nr; ++i) x[static_cast<size_t>(j)] += y[static_cast<size_t>(i)] * h.U.at(i, j);
    return x;
}

// Is the row vector in the lattice spanned by the rows of A?
inline bool lattice_contains(const IMat& A, const std::vector<Int>& b) {
    return solve_left(A, b).has_value();
}

// Kernel of the map Z^n -> prod Z/m_k, x |-> x * C mod m, as a row lattice.
// C is n x c, mods has length c.
inline IMat kernel_mod(const IMat& C, const std::vector<Int>& mods) {
    int n = C.nr, c = C.nc;
    IMat S(n + c, c);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < c; ++j) S.at(i, j) = C.at(i, j);
    for (int j = 0; j < c; ++j) S.at(n + j, j) = mods[static_cast<size_t>(j)];
    auto h = hnf_z(S);
    // rows of U with zero image span the kernel of [C; diag(m)]; project to
    // the first n coordinates
    IMat K(n, n);
    int out = 0;
    for (int i = h.rank; i < n + c; ++i) {
        std::vector<Int> row(static_cast<size_t>(n));
        for (int j = 0; j < n; ++j) row[static_cast<size_t>(j)] = h.U.at(i, j);
        bool nz = false;
        for (const auto& v : row) nz = nz || v != 0;
        if (!nz) continue;
        if (out < n) {
            for (int j = 0; j < n; ++j) K.at(out, j) = row[static_cast<size_t>(j)];
            ++out;
        }
    }
    // The projection always contains mods-multiples of every basis vector,
    // so it has full rank n; bring to HNF for a canonical basis.
    IMat K2(out, n);
    for (int i = 0; i < out; ++i)
        for (int j = 0; j < n; ++j) K2.at(i, j) = K.at(i, j);
    auto hk = hnf_z(K2);
    if (hk.rank != n) throw error("kernel_mod: unexpected rank deficiency");
    IMat R(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) R.at(i, j) = hk.H.at(i, j);
    return R;
}

// canonical HNF basis of the lattice spanned by the rows of A (full rank n)
inline IMat lattice_canonical(const IMat& A, int n) {
    auto h = hnf_z(A);
    if (h.rank != n) throw error("lattice_canonical: not full rank");
    IMat R(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) R.at(i, j) = h.H.at(i, j);
    return R;
}

inline Int lattice_index(const IMat& H) {
    Int d = 1;
    for (int i = 0; i < H.nr && i < H.nc; ++i) d *= H.at(i, i);
    return abs(d);
}

}  // namespace mordell
