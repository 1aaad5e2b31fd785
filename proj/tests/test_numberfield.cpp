#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "mordell/localfield.hpp"
#include "mordell/numberfield.hpp"

using namespace mordell;

static NumberField cbrt2_field() { return make_number_field({Int(-2), Int(0), Int(0), Int(1)}); }

TEST_CASE("make_number_field validates and certifies") {
    SECTION("x^3 - 2 gives a cubic field") {
        auto K = cbrt2_field();
        REQUIRE(K.degree() == 3);
        REQUIRE(K.disc() == -108);
    }
    SECTION("x - 1 gives the rationals") {
        auto K = make_number_field({Int(-1), Int(1)});
        REQUIRE(K.degree() == 1);
        auto th = K.theta();
        REQUIRE(th[0] == 1);
    }
    SECTION("x^4 - 4 is rejected as reducible") {
        REQUIRE_THROWS_AS(make_number_field({Int(-4), Int(0), Int(0), Int(0), Int(1)}),
                          reducible_error);
    }
    SECTION("non-monic input rejected") {
        REQUIRE_THROWS_AS(make_number_field({Int(1), Int(2)}), not_monic_error);
    }
    SECTION("rational root rejected") {
        REQUIRE_THROWS_AS(make_number_field({Int(-1), Int(0), Int(0), Int(1)}), reducible_error);
    }
}

TEST_CASE("field inversion") {
    auto K = cbrt2_field();
    auto th = K.theta();
    SECTION("1/theta = theta^2/2") {
        auto i = K.inv(th);
        REQUIRE(i == K.from_coords({Rat(0), Rat(0), Rat(1, 2)}));
        REQUIRE(K.eq(K.mul(i, th), K.one()));
    }
    SECTION("fundamental unit 1 - theta has an integral inverse") {
        auto eps = K.sub(K.one(), th);
        REQUIRE(K.norm(eps) == -1);
        auto i = K.inv(eps);
        for (const auto& c : i) REQUIRE(c.get_den() == 1);
        REQUIRE(i == K.from_coords({Rat(-1), Rat(-1), Rat(-1)}));
    }
    SECTION("1/1 = 1") { REQUIRE(K.eq(K.inv(K.one()), K.one())); }
    SECTION("1/0 throws") { REQUIRE_THROWS_AS(K.inv(K.zero()), division_by_zero_error); }
}

TEST_CASE("splitting rational primes") {
    auto K = cbrt2_field();
    SECTION("109 splits completely") {
        auto places = K.split_prime(Int(109));
        REQUIRE(places.size() == 3);
        for (const auto& v : places) REQUIRE(v.residue_degree == 1);
        // roots of the linear factors are the cube roots of 2 mod 109
        std::vector<u64> roots;
        for (const auto& v : places) roots.push_back((109 - v.factor_mod_p[0]) % 109);
        std::sort(roots.begin(), roots.end());
        REQUIRE(roots == std::vector<u64>{57, 58, 103});
    }
    SECTION("5 gives residue degrees 1 and 2") {
        auto places = K.split_prime(Int(5));
        REQUIRE(places.size() == 2);
        std::vector<int> degs;
        for (const auto& v : places) degs.push_back(v.residue_degree);
        std::sort(degs.begin(), degs.end());
        REQUIRE(degs == std::vector<int>{1, 2});
        // x^3 - 2 = (x - 3)(x^2 + 3x + 4) mod 5
        for (const auto& v : places) {
            if (v.residue_degree == 1) REQUIRE(v.factor_mod_p == FpPoly{2, 1});
            if (v.residue_degree == 2) REQUIRE(v.factor_mod_p == FpPoly{4, 3, 1});
        }
    }
    SECTION("degree sums to d and factors are irreducible, several primes") {
        for (long p : {7, 11, 13, 31, 101, 109, 113}) {
            auto places = K.split_prime(Int(p));
            int total = 0;
            for (const auto& v : places) {
                total += v.residue_degree;
                // brute-force irreducibility for degree <= 3: no roots (and
                // for cubics that is enough over F_p)
                if (v.residue_degree >= 2) {
                    PrimeField F(static_cast<u64>(p));
                    bool has_root = false;
                    for (u64 x = 0; x < static_cast<u64>(p); ++x)
                        if (F.is_zero(poly_eval(F, v.factor_mod_p, x))) has_root = true;
                    REQUIRE_FALSE(has_root);
                }
            }
            REQUIRE(total == 3);
        }
    }
    SECTION("ramified prime rejected") {
        REQUIRE_THROWS_AS(K.split_prime(Int(3)), ramified_prime_error);  // x^3-2 = (x+1)^3 mod 3
    }
    SECTION("K = Q: single place of degree 1") {
        auto Q = rational_field();
        auto places = Q.split_prime(Int(7));
        REQUIRE(places.size() == 1);
        REQUIRE(places[0].residue_degree == 1);
    }
}

TEST_CASE("valuations at places") {
    auto K = cbrt2_field();
    auto places5 = K.split_prime(Int(5));
    const Place* v1 = nullptr;
    for (const auto& v : places5)
        if (v.residue_degree == 1) v1 = &v;
    REQUIRE(v1 != nullptr);

    SECTION("val of 0 is +infinity") { REQUIRE(valuation_at(K, K.zero(), *v1) == VAL_INF); }
    SECTION("val of p is 1 (unramified)") {
        REQUIRE(valuation_at(K, K.from_int(5), *v1) == 1);
    }
    SECTION("theta - 3 has positive valuation at the degree-1 place over 5") {
        auto x = K.sub(K.theta(), K.from_int(3));
        REQUIRE(valuation_at(K, x, *v1) >= 1);
    }
}

TEST_CASE("norm and valuation properties on random elements") {
    auto K = cbrt2_field();
    std::mt19937_64 rng(20240901);
    auto rand_elem = [&](int span) {
        NfElem e = K.zero();
        for (auto& c : e) c = Rat(static_cast<long>(rng() % (2 * span + 1)) - span);
        return e;
    };
    SECTION("x * inv(x) = 1 for random nonzero x") {
        for (int i = 0; i < 50; ++i) {
            auto x = rand_elem(30);
            if (K.is_zero(x)) continue;
            REQUIRE(K.eq(K.mul(x, K.inv(x)), K.one()));
        }
    }
    SECTION("norm is multiplicative") {
        for (int i = 0; i < 50; ++i) {
            auto x = rand_elem(20), y = rand_elem(20);
            REQUIRE(K.norm(K.mul(x, y)) == K.norm(x) * K.norm(y));
        }
    }
    SECTION("ord_v(xy) = ord_v(x) + ord_v(y)") {
        auto places = K.split_prime(Int(7));
        for (const auto& v : places) {
            for (int i = 0; i < 20; ++i) {
                auto x = rand_elem(15), y = rand_elem(15);
                if (K.is_zero(x) || K.is_zero(y)) continue;
                REQUIRE(valuation_at(K, K.mul(x, y), v) ==
                        valuation_at(K, x, v) + valuation_at(K, y, v));
            }
        }
    }
}
