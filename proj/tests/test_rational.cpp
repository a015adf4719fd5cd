#include <doctest.h>

#include <numbers>

#include "breather/exact.hpp"
#include "breather/rational.hpp"

using namespace breather;

TEST_CASE("continued-fraction reconstruction hits small rationals") {
    auto r = detect_rational(0.75);
    REQUIRE(r.has_value());
    CHECK(r->num == 3);
    CHECK(r->den == 4);

    r = detect_rational(3.0000000000000004);
    REQUIRE(r.has_value());
    CHECK(r->num == 3);
    CHECK(r->den == 1);

    r = detect_rational(1.0 / 3.0);
    REQUIRE(r.has_value());
    CHECK(r->num == 1);
    CHECK(r->den == 3);
}

TEST_CASE("detection rejects irrationals and huge denominators") {
    CHECK_FALSE(detect_rational(std::numbers::sqrt2).has_value());
    CHECK_FALSE(detect_rational(std::numbers::pi).has_value());
    // A fraction past the denominator cap.
    CHECK_FALSE(detect_rational(1.0 / 1234567.0).has_value());
}

TEST_CASE("round-trip: reconstructed fraction reproduces the input") {
    for (double v : {7.0 / 9.0, 15.0 / 11.0, 1.0 / 999983.0 * 999983.0, 21.0 / 5.0}) {
        const auto r = detect_rational(v);
        REQUIRE(r.has_value());
        CHECK(std::fabs(r->value() - v) <= 1e-12 * std::max(1.0, std::fabs(v)));
    }
}

TEST_CASE("odd/odd classification") {
    CHECK(Rational::reduced(3, 1).odd_over_odd());
    CHECK(Rational::reduced(9, 15).odd_over_odd());  // reduces to 3/5
    CHECK_FALSE(Rational::reduced(2, 1).odd_over_odd());
    CHECK_FALSE(Rational::reduced(3, 4).odd_over_odd());
    CHECK_FALSE(Rational::reduced(-3, 5).odd_over_odd());
    CHECK_THROWS_AS(OddRational::from(Rational::reduced(2, 1), "x"), NotAdmissible);
}

TEST_CASE("exact value parser") {
    auto e = parse_exact("1/2 pi");
    REQUIRE(e.has_value());
    CHECK(e->value() == doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));
    CHECK(e->pi_pow == 1);

    e = parse_exact("3/4 sqrt(2)");
    REQUIRE(e.has_value());
    CHECK(e->value() == doctest::Approx(0.75 * std::numbers::sqrt2).epsilon(1e-15));
    CHECK(e->root == 2);

    e = parse_exact("sqrt(8)");
    REQUIRE(e.has_value());
    CHECK(e->rat.num == 2);  // sqrt(8) = 2 sqrt(2)
    CHECK(e->root == 2);

    e = parse_exact("9");
    REQUIRE(e.has_value());
    CHECK(e->is_rational());
    CHECK(e->value() == 9.0);

    CHECK_FALSE(parse_exact("1.5").has_value());
    CHECK_FALSE(parse_exact("sqrt(x)").has_value());
    CHECK_FALSE(parse_exact("").has_value());
}

TEST_CASE("exact arithmetic and square roots") {
    const auto nine = *parse_exact("9");
    const auto r = exact_sqrt(nine);
    REQUIRE(r.has_value());
    CHECK(r->is_rational());
    CHECK(r->value() == 3.0);

    const auto half = *parse_exact("1/2");
    const auto s = exact_sqrt(half);  // sqrt(1/2) = (1/2) sqrt(2)
    REQUIRE(s.has_value());
    CHECK(s->rat.num == 1);
    CHECK(s->rat.den == 2);
    CHECK(s->root == 2);

    // sqrt(2) * sqrt(2) = 2 exactly.
    const auto sqrt2 = *parse_exact("sqrt(2)");
    const auto prod = sqrt2 * sqrt2;
    CHECK(prod.is_rational());
    CHECK(prod.rat.num == 2);

    // pi cancels in ratios.
    const auto c = *parse_exact("1/2 pi");
    const auto q = c / *parse_exact("pi");
    CHECK(q.is_rational());
    CHECK(q.rat == Rational::reduced(1, 2));
}
