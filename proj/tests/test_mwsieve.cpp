#include <catch2/catch_amalgamated.hpp>

#include "fixture_data.hpp"
#include "mordell/mwsieve.hpp"

using namespace mordell;
using namespace testdata;

namespace {

AbstractMW make_I1(const NumberField& Q, const CurveModel<NumberField>& C) {
    AbstractMW mw;
    mw.K = &Q;
    mw.C = &C;
    mw.torsion_gens = {
        mumford_from_point(Q, C, CurvePoint<NumberField>::affine(Q.one(), Q.zero()))};
    mw.torsion_orders = {Int(2)};
    mw.points = {CurvePoint<NumberField>::at_infinity(),
                 CurvePoint<NumberField>::affine(Q.one(), Q.zero())};
    mw.base_index = 0;
    mw.decomp = {{Int(0)}, {Int(1)}};
    return mw;
}

AbstractMW make_I2(const NumberField& Q, const CurveModel<NumberField>& C) {
    AbstractMW mw;
    mw.K = &Q;
    mw.C = &C;
    mw.free_gens = {generator_I2(Q, C)};
    mw.points = {CurvePoint<NumberField>::at_infinity()};
    mw.base_index = 0;
    mw.decomp = {{Int(0)}};
    return mw;
}

}  // namespace

TEST_CASE("abstract MW data verifies exactly") {
    auto K = cbrt2_field();
    for (long s : {-2L, -1L, 0L, 1L}) {
        auto fx = fixture_s(K, s);
        AbstractMW mw;
        mw.K = &K;
        mw.C = &fx.C;
        mw.free_gens = fx.basis;
        mw.points = fx.points;
        mw.base_index = fx.base_index;
        for (const auto& d : fx.decomp) {
            std::vector<Int> row;
            for (long c : d) row.push_back(Int(c));
            mw.decomp.push_back(row);
        }
        REQUIRE_NOTHROW(mw.verify());
        // corrupt one decomposition
        mw.decomp[0][0] += 1;
        REQUIRE_THROWS_AS(mw.verify(), not_on_jacobian_error);
    }
}

TEST_CASE("admissibility of places") {
    auto K = cbrt2_field();
    auto fx = fixture_s(K, 1);
    SECTION("the places over 109 are admissible with order 12100") {
        for (const auto& v : K.split_prime(Int(109))) {
            auto rep = admissible_place(K, fx.C, v, Int(75), Int(1) << 20);
            REQUIRE(rep.admissible());
            REQUIRE(rep.order == 12100);
        }
        // 12100 = 2^2 5^2 11^2
        auto fac = factorize(Int(12100));
        REQUIRE(fac == std::vector<std::pair<Int, unsigned>>{{Int(2), 2u}, {Int(5), 2u}, {Int(11), 2u}});
    }
    SECTION("bad-reduction places are inadmissible") {
        for (const auto& v : K.split_prime(Int(5))) {
            auto rep = admissible_place(K, fx.C, v, Int(75), Int(1) << 20);
            REQUIRE_FALSE(rep.admissible());
        }
    }
}

namespace {

std::vector<OrderedPlace> good_places_upto(const NumberField& K, const CurveModel<NumberField>& C,
                                           long qmax) {
    std::vector<OrderedPlace> out;
    for (const auto& v : scan_places(K, Int(qmax))) {
        auto rep = admissible_place(K, C, v, Int(75), Int(1) << 20);
        if (rep.good_reduction && rep.within_cap) out.push_back({v, rep.order});
    }
    return out;
}

}  // namespace

TEST_CASE("saturation") {
    auto Q = rational_field();
    SECTION("case I.1: every prime below 75 is proven") {
        auto C = curve_I1(Q);
        auto mw = make_I1(Q, C);
        mw.verify();
        auto places = good_places_upto(Q, C, 400);
        REQUIRE(places.size() >= 20);
        for (Int q = 2; q < 75; q += (q == 2 ? 1 : 2)) {
            if (!is_prime(q)) continue;
            auto rec = saturation_check(mw, q, places, 1);
            INFO("q = " << q);
            REQUIRE(rec.proven);
        }
    }
    SECTION("a deliberately unsaturated basis is never proven at q = 2") {
        auto C = curve_I2(Q);
        auto mw = make_I2(Q, C);
        mw.free_gens = {scalar_mul(Q, C, Int(2), generator_I2(Q, C))};
        mw.verify();
        auto places = good_places_upto(Q, C, 200);
        auto rec = saturation_check(mw, Int(2), places, 1);
        REQUIRE_FALSE(rec.proven);
    }
}

TEST_CASE("sieve steps refine the lattice and keep the witnesses") {
    auto Q = rational_field();
    auto C = curve_I2(Q);
    auto mw = make_I2(Q, C);
    mw.verify();
    auto state = sieve_initial(mw);
    Int last_index = 1;
    int used = 0;
    for (const auto& v : scan_places(Q, Int(120))) {
        auto rep = admissible_place(Q, C, v, Int(75), Int(1) << 20);
        if (!rep.admissible()) continue;
        auto pd = make_place_data(mw, v, 1);
        if (!pd) continue;
        auto before = state.W.size();
        sieve_step(mw, state, *pd);
        ++used;
        Int idx = lattice_index(state.L);
        REQUIRE(idx % last_index == 0);  // chain monotonicity
        last_index = idx;
        REQUIRE(state.W.size() <= before * 64);
        if (used > 6) break;
    }
    REQUIRE(used >= 3);
    REQUIRE(last_index > 1);
    // the zero coset always survives (it is j(infinity))
    bool zero_there = false;
    for (const auto& w : state.W) {
        bool z = true;
        for (const auto& c : w) z = z && c == 0;
        zero_there = zero_there || z;
    }
    REQUIRE(zero_there);
}

TEST_CASE("full verification of the y-odd fixtures") {
    auto Q = rational_field();
    SECTION("case I.1 certifies C(Q) = {infinity, (1,0)}") {
        auto C = curve_I1(Q);
        auto mw = make_I1(Q, C);
        VerifyConfig cfg;
        cfg.place_qmax = 200;
        cfg.prime_pool_max = 60;
        auto cert = theorem3_verify(mw, cfg);
        INFO(cert.failure);
        REQUIRE(cert.certified);
        REQUIRE(cert.witnesses.size() == cert.sieve.W.size());
    }
    SECTION("case I.2 certifies C(Q) = {infinity}") {
        auto C = curve_I2(Q);
        auto mw = make_I2(Q, C);
        VerifyConfig cfg;
        cfg.place_qmax = 400;
        cfg.prime_pool_max = 120;
        auto cert = theorem3_verify(mw, cfg);
        INFO(cert.failure);
        REQUIRE(cert.certified);
        for (const auto& rec : cert.witnesses) REQUIRE(rec.point_index == 0);
    }
}
