#include <catch2/catch_amalgamated.hpp>

#include "fixture_data.hpp"
#include "mordell/chabauty.hpp"

using namespace mordell;
using namespace testdata;

TEST_CASE("criterion on the rank-3 fixture at p = 109") {
    auto K = cbrt2_field();
    auto fx = fixture_s(K, 1);
    CriterionConfig cfg;
    for (size_t i = 0; i < fx.points.size(); ++i) {
        auto data = criterion(K, fx.C, fx.basis, fx.points[i], Int(109), cfg);
        INFO("point index " << i);
        REQUIRE(data.h == 3);
        REQUIRE(data.rank == 3);
        REQUIRE(data.verdict == Verdict::UniqueInBall);
        REQUIRE(data.denom_exp == 0);
        REQUIRE(data.trusted_digits >= cfg.precision);
    }
}

TEST_CASE("criterion respects the stacking contract") {
    auto K = cbrt2_field();
    auto fx = fixture_s(K, 1);
    // identical h and rank for both pivot orders
    CriterionConfig c1, c2;
    c2.pivot_order = PivotOrder::ColumnSweep;
    auto d1 = criterion(K, fx.C, fx.basis, fx.points[0], Int(109), c1);
    auto d2 = criterion(K, fx.C, fx.basis, fx.points[0], Int(109), c2);
    REQUIRE(d1.h == d2.h);
    REQUIRE(d1.rank == d2.rank);
}

TEST_CASE("rank defect detected for a dependent basis") {
    auto K = cbrt2_field();
    auto fx = fixture_s(K, 1);
    std::vector<Mumford<NumberField>> dep{fx.basis[0], scalar_mul(K, fx.C, Int(2), fx.basis[0]),
                                          fx.basis[1]};
    REQUIRE_THROWS_AS(criterion(K, fx.C, dep, fx.points[0], Int(109)), rank_defect_error);
}

TEST_CASE("torsion-only inputs use the alpha matrix directly") {
    auto Q = rational_field();
    auto C = curve_I1(Q);
    std::vector<Mumford<NumberField>> empty_basis;
    SECTION("weierstrass point (1, 0) at p = 7") {
        auto data =
            criterion(Q, C, empty_basis, CurvePoint<NumberField>::affine(Q.one(), Q.zero()),
                      Int(7));
        REQUIRE(data.h == 2);
        REQUIRE(data.r == 0);
        // alpha values are 2/15 and 2/15: units at 7, rank 1
        REQUIRE(data.rank == 1);
        REQUIRE(data.verdict == Verdict::UniqueInBall);
    }
    SECTION("infinity at p = 7: alpha = (0, -2), still rank 1") {
        auto data = criterion(Q, C, empty_basis, CurvePoint<NumberField>::at_infinity(), Int(7));
        REQUIRE(data.rank == 1);
        REQUIRE(data.verdict == Verdict::UniqueInBall);
        REQUIRE(data.M_mod_p[0][0] == 0);
        REQUIRE(data.M_mod_p[1][0] == 7 - 2);
    }
}

TEST_CASE("alpha matrix is the matrix of multiplication") {
    auto K = cbrt2_field();
    auto fx = fixture_s(K, 1);
    auto ctxs = make_place_contexts(K, fx.C, Int(109), 20, false);
    auto A = build_alpha_matrix(K, fx.C, fx.points[0], ctxs);
    // d_v = 1 here: blocks are 1x1 scalars equal to alpha; check the
    // multiplication property trivially by recomputing alpha
    int row = 0, col = 0;
    for (auto& ctx : ctxs) {
        auto U = uniformizer_at(K, fx.C, fx.points[0], ctx.v, *ctx.LC);
        for (int w = 0; w < 2; ++w) {
            auto E = expand_differential(*ctx.LC, U, w + 1, 4);
            auto co = ctx.LC->Kv.coordinates(E.coeffs[0]);
            REQUIRE(A.at(row + w, col) == co[0].first);
        }
        row += 2;
        col += 1;
    }
}

TEST_CASE("criterion rejects bad primes") {
    auto K = cbrt2_field();
    auto fx = fixture_s(K, 1);
    SECTION("ramified prime") {
        REQUIRE_THROWS_AS(criterion(K, fx.C, fx.basis, fx.points[0], Int(3)),
                          ramified_prime_error);
    }
    SECTION("bad-reduction prime") {
        // 5 divides the discriminant data of the s=1 model
        bool bad = false;
        for (const auto& v : K.split_prime(Int(5)))
            if (!is_good_reduction(K, fx.C, v)) bad = true;
        if (bad)
            REQUIRE_THROWS_AS(criterion(K, fx.C, fx.basis, fx.points[0], Int(5)),
                              bad_reduction_error);
    }
}
