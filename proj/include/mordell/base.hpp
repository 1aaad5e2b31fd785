#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mordell {

using Int = mpz_class;
using Rat = mpq_class;

// ---------------------------------------------------------------------------
// Error types. Each names the condition that was violated; callers that can
// recover (e.g. by retrying at higher precision) catch the specific type.
// ---------------------------------------------------------------------------

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct not_monic_error : error { using error::error; };
struct reducible_error : error { using error::error; };
struct irreducibility_unprovable_error : error { using error::error; };
struct division_by_zero_error : error { using error::error; };
struct ramified_prime_error : error { using error::error; };
struct precision_exhausted_error : error { using error::error; };
struct non_integral_denominator_error : error { using error::error; };
struct not_a_square_error : error { using error::error; };
struct not_a_unit_error : error { using error::error; };
struct precision_ambiguous_error : error { using error::error; };
struct precision_loss_error : error { using error::error; };
struct wrong_degree_error : error { using error::error; };
struct singular_model_error : error { using error::error; };
struct not_on_jacobian_error : error { using error::error; };
struct bad_reduction_error : error { using error::error; };
struct not_in_kernel_error : error { using error::error; };
struct kernel_assertion_error : error { using error::error; };
struct rank_defect_error : error { using error::error; };
struct not_smooth_error : error { using error::error; };
struct budget_exhausted_error : error { using error::error; };
struct explosion_guard_error : error { using error::error; };
struct no_usable_prime_error : error { using error::error; };
struct schema_error : error { using error::error; };

// ---------------------------------------------------------------------------
// Small integer helpers
// ---------------------------------------------------------------------------

inline Int ipow(const Int& b, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
    return r;
}

inline Int powmod(const Int& b, const Int& e, const Int& m) {
    Int r;
    mpz_powm(r.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
    return r;
}

inline Int gcd(const Int& a, const Int& b) {
    Int r;
    mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline Int lcm(const Int& a, const Int& b) {
    Int r;
    mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline Int mod_floor(const Int& a, const Int& m) {
    Int r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

inline Int invmod(const Int& a, const Int& m) {
    Int r;
    if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
        throw division_by_zero_error("value not invertible modulo m");
    return r;
}

// ord_p(a) for a != 0; returns the pair (valuation, a / p^valuation).
inline std::pair<long, Int> remove_factor(Int a, const Int& p) {
    if (a == 0) throw division_by_zero_error("valuation of zero");
    Int r;
    long v = static_cast<long>(mpz_remove(r.get_mpz_t(), a.get_mpz_t(), p.get_mpz_t()));
    return {v, r};
}

inline long ord_at(const Int& a, const Int& p) { return remove_factor(a, p).first; }

inline bool is_prime(const Int& n) {
    return mpz_probab_prime_p(n.get_mpz_t(), 40) != 0;
}

// Exact integer n-th root if it exists.
inline std::optional<Int> perfect_nth_root(const Int& a, unsigned long n) {
    Int r;
    if (a >= 0) {
        if (mpz_root(r.get_mpz_t(), a.get_mpz_t(), n) != 0) return r;
        return std::nullopt;
    }
    if (n % 2 == 0) return std::nullopt;
    Int b = -a;
    if (mpz_root(r.get_mpz_t(), b.get_mpz_t(), n) != 0) return Int(-r);
    return std::nullopt;
}

// Trial-division factorization; adequate for the smooth group orders and
// discriminant bookkeeping this library deals with.
inline std::vector<std::pair<Int, unsigned>> factorize(Int n) {
    std::vector<std::pair<Int, unsigned>> out;
    if (n < 0) n = -n;
    if (n <= 1) return out;
    for (Int p = 2; p * p <= n;) {
        if (n % p == 0) {
            unsigned e = 0;
            while (n % p == 0) { n /= p; ++e; }
            out.emplace_back(p, e);
        }
        p = (p == 2) ? Int(3) : Int(p + 2);
        if (p * p > n) break;
    }
    if (n > 1) {
        if (!is_prime(n)) {
            // fall back to rho for a stray large composite
            throw error("factorize: composite cofactor too large for trial division");
        }
        out.emplace_back(n, 1);
    }
    return out;
}

inline bool is_smooth(const Int& n, const Int& bound) {
    Int m = abs(n);
    if (m == 0) return false;
    for (Int p = 2; p < bound; p = (p == 2) ? Int(3) : Int(p + 2)) {
        if (!is_prime(p)) continue;
        while (m % p == 0) m /= p;
    }
    return m == 1;
}

// ---------------------------------------------------------------------------
// 64-bit modular arithmetic (residue characteristics stay well below 2^31)
// ---------------------------------------------------------------------------

using u64 = std::uint64_t;

inline u64 addmod(u64 a, u64 b, u64 p) { u64 s = a + b; return s >= p ? s - p : s; }
inline u64 submod(u64 a, u64 b, u64 p) { return a >= b ? a - b : a + p - b; }
inline u64 mulmod(u64 a, u64 b, u64 p) {
    return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % p);
}
inline u64 powmod(u64 b, u64 e, u64 p) {
    u64 r = 1 % p;
    while (e) {
        if (e & 1) r = mulmod(r, b, p);
        b = mulmod(b, b, p);
        e >>= 1;
    }
    return r;
}
inline u64 invmod(u64 a, u64 p) {
    if (a % p == 0) throw division_by_zero_error("inverse of zero mod p");
    return powmod(a % p, p - 2, p);  // p prime
}

}  // namespace mordell
