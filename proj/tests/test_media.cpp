#include <doctest.h>

#include <cmath>
#include <numbers>

#include "breather/media.hpp"

using namespace breather;
using namespace breather::media;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("step admissibility: canonical and derived cases") {
    // sqrt(1) * 1 * (pi/2) * 2/pi = 1
    auto r = check_step_admissible(1.0, 1.0, kPi / 2, 1.0);
    CHECK(r.p == 1);
    CHECK(r.q == 1);

    // sqrt(9) * (pi/2) * 2/pi = 3
    r = check_step_admissible(4.0, 9.0, kPi / 2, 1.0);
    CHECK(r.p == 3);
    CHECK(r.q == 1);

    // sqrt(4) * (pi/2) * 2/pi = 2: even numerator.
    CHECK_THROWS_AS(check_step_admissible(1.0, 4.0, kPi / 2, 1.0), NotAdmissible);

    // q > 1 lattice: sqrt(1) * 1 * (pi/6) * 2/pi = 1/3.
    r = check_step_admissible(1.0, 1.0, kPi / 6, 1.0);
    CHECK(r.p == 1);
    CHECK(r.q == 3);

    CHECK_THROWS_AS(check_step_admissible(-1.0, 1.0, 1.0, 1.0), ConfigError);
}

TEST_CASE("periodic admissibility") {
    // l = sqrt(9) * 1 = 3, 2m = 4 * 1 * (1/2) * (1/2) = 1.
    const auto adm = check_periodic_admissible(1.0, 9.0, 0.5, 0.5);
    CHECK(adm.l_ratio.p == 3);
    CHECK(adm.l_ratio.q == 1);
    CHECK(adm.two_m_ratio.p == 1);
    CHECK(adm.two_m_ratio.q == 1);
    CHECK(adm.r_base == 1);

    // 2m = 4 * 3 * (3/4) * (1/6) = 3/2: even denominator.
    CHECK_THROWS_AS(check_periodic_admissible(9.0, 1.0, 0.75, 1.0 / 6.0), NotAdmissible);

    // a = b violates the precondition, not admissibility.
    CHECK_THROWS_AS(check_periodic_admissible(1.0, 1.0, 0.5, 0.5), ConfigError);
    CHECK_THROWS_AS(check_periodic_admissible(1.0, 9.0, 1.5, 0.5), ConfigError);
}

TEST_CASE("dirichlet admissibility") {
    auto adm = check_dirichlet_admissible(kPi / 4, 1.0);
    CHECK(adm.p == 1);
    CHECK(adm.q4 == 4);

    adm = check_dirichlet_admissible(3 * kPi / 8, 1.0);
    CHECK(adm.p == 3);
    CHECK(adm.q4 == 8);

    // 1/2 has denominator not divisible by 4.
    CHECK_THROWS_AS(check_dirichlet_admissible(kPi / 2, 1.0), NotAdmissible);
}

TEST_CASE("exact-input route bypasses detection") {
    const auto a = *parse_exact("1");
    const auto b = *parse_exact("9");
    const auto c = *parse_exact("1/2 pi");
    const auto w = *parse_exact("1");
    const auto r = check_step_admissible(a, b, c, w);
    CHECK(r.p == 3);
    CHECK(r.q == 1);

    const auto adm = check_periodic_admissible(*parse_exact("1"), *parse_exact("9"),
                                               *parse_exact("1/2"), *parse_exact("1/2"));
    CHECK(adm.l_ratio.p == 3);
    CHECK(adm.two_m_ratio.p == 1);
    CHECK(adm.r_base == 1);

    const auto dadm = check_dirichlet_admissible(*parse_exact("3/8 pi"), *parse_exact("1"));
    CHECK(dadm.p == 3);
    CHECK(dadm.q4 == 8);

    // Irrational combination is rejected, not loosely matched.
    CHECK_THROWS_AS(check_step_admissible(*parse_exact("1"), *parse_exact("2"),
                                          *parse_exact("1/2 pi"), *parse_exact("1")),
                    NotAdmissible);
}

TEST_CASE("accepted step medium has cos(k omega sqrt(b) c) = 0 on the lattice") {
    const StepMedium med = make_step(1.0, 1.0, kPi / 2, 1.0);
    const std::int64_t q = med.base_index();
    for (std::int64_t k = q; k <= 1001; k += 2 * q) {
        const double arg = static_cast<double>(k) * med.omega * std::sqrt(med.b) * med.c;
        CHECK(std::fabs(std::cos(arg)) < 1e-12);
    }
    // Same for a lattice with q = 3.
    const StepMedium med3 = make_step(1.0, 1.0, kPi / 6, 1.0);
    for (std::int64_t k = 3; k <= 999; k += 6) {
        const double arg = static_cast<double>(k) * med3.omega * std::sqrt(med3.b) * med3.c;
        CHECK(std::fabs(std::cos(arg)) < 1e-12);
    }
}

TEST_CASE("rational witnesses reproduce the defining expressions") {
    const StepMedium s = make_step(4.0, 9.0, kPi / 2, 1.0);
    const double expr = std::sqrt(s.b) * s.omega * s.c * 2.0 / kPi;
    CHECK(std::fabs(expr - s.ratio.value()) <= 1e-12 * std::max(1.0, expr));

    const PeriodicStepMedium p = make_periodic(1.0, 9.0, 0.5, 0.5);
    CHECK(std::fabs(p.l() - p.l_ratio.value()) <= 1e-12 * p.l());
    CHECK(std::fabs(2.0 * p.m() - p.two_m_ratio.value()) <= 1e-12);
    CHECK(p.r_base % 2 == 1);  // product of odd q and odd qt
}

TEST_CASE("symmetry index validation") {
    const Medium m = make_periodic(1.0, 9.0, 0.5, 0.5);
    CHECK(SymmetryIndex::for_medium(m, 1).r == 1);
    CHECK(SymmetryIndex::for_medium(m, 3).r == 3);
    CHECK_THROWS_AS(SymmetryIndex::for_medium(m, 2), ConfigError);
    CHECK_THROWS_AS(SymmetryIndex::for_medium(m, -3), ConfigError);

    const Medium s3 = make_step(1.0, 1.0, kPi / 6, 1.0);  // base 3
    CHECK(SymmetryIndex::for_medium(s3, 3).r == 3);
    CHECK(SymmetryIndex::for_medium(s3, 9).r == 9);
    CHECK_THROWS_AS(SymmetryIndex::for_medium(s3, 5), ConfigError);
    CHECK_THROWS_AS(SymmetryIndex::for_medium(s3, 6), ConfigError);
}

TEST_CASE("g evaluator and interfaces") {
    const Medium step = make_step(2.0, 3.0, 1.0, kPi / (2.0 * std::sqrt(3.0)));
    CHECK(g_at(step, 0.5) == 3.0);
    CHECK(g_at(step, -0.5) == 3.0);
    CHECK(g_at(step, 1.5) == -2.0);
    CHECK(interfaces_on(step, 10.0) == std::vector<double>{1.0});

    const Medium per = make_periodic(1.0, 9.0, 0.5, 0.5);
    CHECK(g_at(per, 0.1) == 1.0);
    CHECK(g_at(per, kPi / 2 + 0.1) == 9.0);
    CHECK(g_at(per, 2 * kPi + 0.1) == 1.0);          // periodicity
    CHECK(g_at(per, -(kPi / 2 + 0.1)) == 9.0);       // evenness
    CHECK(g_at(per, 2 * kPi - 0.1) == 1.0);          // even within the period
    const auto ifaces = interfaces_on(per, 4 * kPi);
    REQUIRE(ifaces.size() == 4);
    CHECK(ifaces[0] == doctest::Approx(kPi / 2));
    CHECK(ifaces[1] == doctest::Approx(3 * kPi / 2));
    CHECK(ifaces[2] == doctest::Approx(5 * kPi / 2));

    const Medium dir = make_dirichlet(3 * kPi / 8, 1.0);
    CHECK(g_at(dir, 0.2) == 1.0);
    CHECK(is_bounded(dir));
    CHECK(domain_halfwidth(dir) == doctest::Approx(3 * kPi / 8));
}
