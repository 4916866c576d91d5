#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ibnls/admissible.hpp"

#include <random>

using namespace ibnls;

namespace {

ExponentPair pr(ExtendedRational p, Rational q) { return ExponentPair(std::move(p), std::move(q)); }
auto inf = ExtendedRational::infinity();

std::mt19937_64 rng(3);

/// Random pair with 1/p in [0, 1/2], 1/q in (0, 1/2].
ExponentPair random_pair() {
    Rational up = rat(long(rng() % 33), 64);
    Rational uq = rat(1 + long(rng() % 32), 64);
    ExtendedRational p = up.is_zero() ? inf : ExtendedRational(Rational(1) / up);
    return pr(p, Rational(1) / uq);
}

}  // namespace

TEST_CASE("pair classes on the worked examples") {
    PairClass c1 = classify_pair(3, pr(inf, 2));
    CHECK(c1.in_A);
    CHECK(c1.in_B);
    CHECK(c1.in_B0);
    CHECK(c1.in_S);

    PairClass c2 = classify_pair(3, pr(Rational(2), 2));
    CHECK_FALSE(c2.in_A);
    CHECK_FALSE(c2.in_B);
    CHECK_FALSE(c2.in_B0);
    CHECK_FALSE(c2.in_S);

    PairClass c3 = classify_pair(5, pr(rat(24, 5), 3));
    CHECK(c3.in_B0);

    // class hierarchy on random pairs: B0 => B => A, S => A, B <=> gamma = 0
    for (int i = 0; i < 500; ++i) {
        ExponentPair p = random_pair();
        PairClass c = classify_pair(1 + int(rng() % 8), p);
        if (c.in_B0) CHECK(c.in_B);
        if (c.in_B) CHECK(c.in_A);
        if (c.in_S) CHECK(c.in_A);
    }
}

TEST_CASE("in_B iff gamma_pq vanishes (within class A)") {
    for (int i = 0; i < 500; ++i) {
        int d = 1 + int(rng() % 8);
        ExponentPair p = random_pair();
        PairClass c = classify_pair(d, p);
        CHECK(c.in_B == (c.in_A && gamma_pq(d, p) == Rational(0)));
    }
}

TEST_CASE("gamma_pq values") {
    CHECK(gamma_pq(3, pr(inf, 2)) == Rational(0));
    CHECK(gamma_pq(1, pr(Rational(2), 2)) == Rational(-2));
}

TEST_CASE("holder_dual") {
    CHECK(holder_dual(ExtendedRational(Rational(2))) == ExtendedRational(Rational(2)));
    CHECK(holder_dual(inf) == ExtendedRational(Rational(1)));
    CHECK(holder_dual(ExtendedRational(rat(4, 3))) == ExtendedRational(Rational(4)));
    CHECK_THROWS_AS(holder_dual(ExtendedRational(rat(1, 2))), std::domain_error);

    for (int i = 0; i < 300; ++i) {
        Rational up = rat(long(rng() % 65), 64);  // 1/p in [0, 1]
        ExtendedRational p = up.is_zero() ? inf : ExtendedRational(Rational(1) / up);
        CHECK(holder_dual(holder_dual(p)) == p);
    }
}

TEST_CASE("Sobolev embedding predicate") {
    CHECK(embeds(3, Rational(1), Rational(2), Rational(0), Rational(6), true));
    CHECK(embeds(3, Rational(1), Rational(2), Rational(1), Rational(2), true));
    CHECK(embeds(3, Rational(2), Rational(2), Rational(1), Rational(2), false));
    CHECK_FALSE(embeds(3, Rational(2), Rational(2), Rational(1), Rational(2), true));
    CHECK_FALSE(embeds(3, Rational(0), Rational(6), Rational(1), Rational(2), false));

    // transitivity
    for (int i = 0; i < 2000; ++i) {
        int d = 1 + int(rng() % 4);
        auto rs = [&] { return rat(long(rng() % 17), 8); };
        auto rp = [&] { return rat(1 + long(rng() % 15), 8) + Rational(1); };  // (1, 3]-ish
        Rational s1 = rs(), s2 = rs(), s3 = rs();
        Rational p1 = rp(), p2 = rp(), p3 = rp();
        for (bool hom : {true, false}) {
            if (embeds(d, s1, p1, s2, p2, hom) && embeds(d, s2, p2, s3, p3, hom))
                CHECK(embeds(d, s1, p1, s3, p3, hom));
        }
    }
}

TEST_CASE("chain rule exponent predicate") {
    CHECK(chain_rule_ok(Rational(1), Rational(1), rat(3, 2), Rational(2),
                        ExtendedRational(Rational(6))));
    CHECK_FALSE(chain_rule_ok(Rational(3), rat(1, 2), rat(3, 2), Rational(2),
                              ExtendedRational(Rational(4))));
    // sigma even: only the Hoelder identity matters (1/2 + 2/6 = 5/6)
    CHECK(chain_rule_ok(Rational(3), Rational(2), rat(6, 5), Rational(2),
                        ExtendedRational(Rational(6))));
    CHECK_FALSE(chain_rule_ok(Rational(0), Rational(2), rat(3, 2), Rational(2),
                              ExtendedRational(Rational(4))));
}

TEST_CASE("product rule exponent predicate") {
    CHECK(product_rule_ok(rat(3, 2), ExtendedRational(Rational(6)), Rational(2), Rational(2),
                          ExtendedRational(Rational(6))));
    CHECK(product_rule_ok(Rational(2), inf, Rational(2), Rational(2), inf));
    CHECK_FALSE(product_rule_ok(Rational(2), ExtendedRational(Rational(3)), Rational(3),
                                Rational(2), inf));
}

TEST_CASE("weight integrability windows") {
    WeightWindow w1 = weight_window(3, Rational(2), Rational(0), Rational(1));
    CHECK(w1.local_ok);
    CHECK_FALSE(w1.exterior_ok);

    WeightWindow w2 = weight_window(3, Rational(2), Rational(1), Rational(1));
    CHECK(w2.exterior_ok);
    CHECK_FALSE(w2.local_ok);

    // boundary b + s = d/r belongs to neither
    WeightWindow w3 = weight_window(3, Rational(2), Rational(1), rat(1, 2));
    CHECK_FALSE(w3.local_ok);
    CHECK_FALSE(w3.exterior_ok);
}

TEST_CASE("for d >= 5, B0 membership pins q below 2d/(d-4)") {
    for (int i = 0; i < 1000; ++i) {
        int d = 5 + int(rng() % 4);
        ExponentPair p = random_pair();
        PairClass c = classify_pair(d, p);
        bool alt = c.in_B && p.q < rat(2 * d, d - 4);
        CHECK(c.in_B0 == alt);
    }
}
