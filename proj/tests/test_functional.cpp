#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "breather/functional.hpp"
#include "oracles.hpp"

using namespace breather;
using namespace breather::functional;
using seq::OddSequence;

namespace {

constexpr double kPi = std::numbers::pi;

/// Canonical step problem: T = 2 pi, slopes k, gamma = -1, so
/// a_k = -2 pi / k and eta_k = -4 pi / k.
FunctionalSpec canonical_spec(int N) {
    return eta_table(media::make_step(1.0, 1.0, kPi / 2, 1.0), -1.0, N, 1);
}

FunctionalSpec periodic_spec(int N, double gamma) {
    return eta_table(media::make_periodic(1.0, 9.0, 0.5, 0.5), gamma, N, 1);
}

double directional_fd(const FunctionalSpec& spec, const OddSequence& z, const OddSequence& dir,
                      double h) {
    auto shift = [&](double s) {
        OddSequence out = OddSequence::zeros(spec.N);
        for (int k = 1; k <= spec.N; k += 2) out.set(k, z.at(k) + s * dir.at(k));
        return out;
    };
    return (eval_J(spec, shift(h)) - eval_J(spec, shift(-h))) / (2.0 * h);
}

} // namespace

TEST_CASE("eta table of the canonical step problem") {
    const auto spec = canonical_spec(21);
    REQUIRE(spec.support.size() == 11);
    for (std::size_t i = 0; i < spec.support.size(); ++i) {
        const int k = spec.support[i];
        CHECK(spec.slope0[i] == doctest::Approx(static_cast<double>(k)).epsilon(1e-13));
        CHECK(spec.coeff_a[i] == doctest::Approx(-2.0 * kPi / k).epsilon(1e-13));
        CHECK(spec.coeff_eta[i] == doctest::Approx(-4.0 * kPi / k).epsilon(1e-13));
    }
    // |eta_k| k is constant: the C/k decay is exact for these media.
    for (std::size_t i = 0; i < spec.support.size(); ++i)
        CHECK(std::fabs(spec.coeff_eta[i]) * spec.support[i] ==
              doctest::Approx(4.0 * kPi).epsilon(1e-13));
}

TEST_CASE("sign condition: step admits only gamma < 0, periodic both") {
    CHECK_NOTHROW(canonical_spec(9));
    CHECK_THROWS_AS(eta_table(media::make_step(1.0, 1.0, kPi / 2, 1.0), +1.0, 9, 1),
                    SignConditionFailed);
    CHECK_NOTHROW(periodic_spec(9, +1.0));
    CHECK_NOTHROW(periodic_spec(9, -1.0));
}

TEST_CASE("J on the seed ray: closed quartic") {
    const auto spec = canonical_spec(9);
    // J(t y) = 1.5 t^4 - 4 pi t^2 for the signed pair at k0 = 1.
    for (double t : {0.1, 0.5, 1.0, 2.0}) {
        const double J = eval_J(spec, OddSequence::pair(1, t, 9));
        CHECK(J == doctest::Approx(1.5 * t * t * t * t - 4.0 * kPi * t * t).epsilon(1e-13));
    }
    const double t_star = std::sqrt(4.0 * kPi / 3.0);
    CHECK(eval_J(spec, OddSequence::pair(1, t_star, 9)) ==
          doctest::Approx(-8.0 * kPi * kPi / 3.0).epsilon(1e-13));

    // Same minimum from a blind golden-section search over t.
    const double t_gold = oracles::golden_min(
        [&](double t) { return eval_J(spec, OddSequence::pair(1, t, 9)); }, 0.0, 5.0);
    CHECK(t_gold == doctest::Approx(t_star).epsilon(1e-8));

    CHECK(eval_J(spec, OddSequence::zeros(9)) == 0.0);
}

TEST_CASE("support violations are rejected") {
    const auto spec = canonical_spec(9);
    CHECK_THROWS_AS(eval_J(spec, OddSequence::pair(11, 1.0, 11)), SupportViolation);

    const auto spec3 = eta_table(media::make_step(1.0, 1.0, kPi / 2, 1.0), -1.0, 21, 3);
    CHECK_NOTHROW(eval_J(spec3, OddSequence::pair(9, 1.0, 21)));
    CHECK_THROWS_AS(eval_J(spec3, OddSequence::pair(5, 1.0, 21)), SupportViolation);
}

TEST_CASE("gradient vs central differences, both media, both symmetry settings") {
    std::mt19937_64 rng(77);
    const auto step1 = canonical_spec(21);
    const auto per1 = periodic_spec(21, +1.0);
    const auto step3 = eta_table(media::make_step(1.0, 1.0, kPi / 2, 1.0), -1.0, 33, 3);
    const auto per3 = eta_table(media::make_periodic(1.0, 9.0, 0.5, 0.5), -1.0, 33, 3);

    for (const auto* spec : {&step1, &per1, &step3, &per3}) {
        for (int trial = 0; trial < 25; ++trial) {
            OddSequence z = OddSequence::zeros(spec->N);
            OddSequence dir = OddSequence::zeros(spec->N);
            std::uniform_real_distribution<double> u(-1.5, 1.5);
            for (int k : spec->support) {
                z.set(k, u(rng));
                dir.set(k, u(rng));
            }
            const OddSequence g = grad_J(*spec, z);
            double pairing = 0.0;
            for (int k : spec->support) pairing += 2.0 * g.at(k) * dir.at(k);
            const double fd = directional_fd(*spec, z, dir, 1e-5);
            CHECK(std::fabs(fd - pairing) <= 1e-6 * std::max(1.0, std::fabs(fd)));
        }
    }
}

TEST_CASE("gradient of zero is zero") {
    const auto spec = canonical_spec(9);
    const auto g = grad_J(spec, OddSequence::zeros(9));
    for (int k = 1; k <= 9; k += 2) CHECK(g.at(k) == 0.0);
}

TEST_CASE("el residual of the single-pair ansatz") {
    const auto spec = canonical_spec(9);
    for (double t : {0.5, 1.0, 2.0}) {
        const auto el = el_residual(spec, OddSequence::pair(1, t, 9));
        // (z*z*z)_{k0} = -3 t^3, so r_{k0} = -3t^3 - eta_1 t; r_{3k0} = t^3.
        const double eta1 = -4.0 * kPi;
        REQUIRE(el.k_on[0] == 1);
        CHECK(el.res_on[0] == doctest::Approx(-3.0 * t * t * t - eta1 * t).epsilon(1e-13));
        REQUIRE(el.k_on[1] == 3);
        CHECK(el.res_on[1] == doctest::Approx(t * t * t).epsilon(1e-13));
        // The brute-force cube agrees.
        const auto z = OddSequence::pair(1, t, 9);
        const auto cube = oracles::brute_convolve(
            oracles::brute_convolve(oracles::to_signed(z), oracles::to_signed(z)),
            oracles::to_signed(z));
        CHECK(oracles::brute_at(cube, 3) == doctest::Approx(t * t * t).epsilon(1e-13));
    }
    // At the seed amplitude the k0 residual vanishes but 3 k0 remains: single
    // harmonics are never exact critical points.
    const double t_star = std::sqrt(4.0 * kPi / 3.0);
    const auto el = el_residual(spec, OddSequence::pair(1, t_star, 9));
    CHECK(std::fabs(el.res_on[0]) < 1e-12);
    CHECK(std::fabs(el.res_on[1]) > 1.0);

    const auto zero = el_residual(spec, OddSequence::zeros(9));
    CHECK(zero.sup == 0.0);
}

TEST_CASE("gradient and el residual are the same object up to sign") {
    std::mt19937_64 rng(11);
    const auto spec = canonical_spec(21);
    const auto z = oracles::random_sequence(rng, 21);
    const auto g = grad_J(spec, z);
    const auto el = el_residual(spec, z);
    for (std::size_t i = 0; i < el.k_on.size(); ++i)
        CHECK(g.at(el.k_on[i]) == doctest::Approx(-el.res_on[i]).epsilon(1e-14));
}

TEST_CASE("off-lattice residuals vanish identically for lattice-supported input") {
    const auto spec3 = eta_table(media::make_periodic(1.0, 9.0, 0.5, 0.5), -1.0, 33, 3);
    std::mt19937_64 rng(5);
    OddSequence z = OddSequence::zeros(33);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int k : spec3.support) z.set(k, u(rng));
    const auto el = el_residual(spec3, z);
    CHECK(el.sup_off == 0.0);  // three lattice indices sum to a lattice index
    for (double r : el.res_off) CHECK(r == 0.0);
}

TEST_CASE("scaling structure: quartic and quadratic parts recovered exactly") {
    std::mt19937_64 rng(31);
    const auto spec = canonical_spec(21);
    for (int trial = 0; trial < 50; ++trial) {
        const auto z = oracles::random_sequence(rng, 21);
        const double J1 = eval_J(spec, z);
        auto z2 = z;
        for (double& v : z2.positive_entries()) v *= 2.0;
        const double J2 = eval_J(spec, z2);
        // J(t z) = t^4 A + t^2 B.
        const double A = (J2 - 4.0 * J1) / 12.0;
        const double B = J1 - A;
        const double A_direct = 0.25 * seq::quad_norm4(z);
        CHECK(A == doctest::Approx(A_direct).epsilon(1e-10));
        auto z3 = z;
        for (double& v : z3.positive_entries()) v *= 3.0;
        CHECK(eval_J(spec, z3) == doctest::Approx(81.0 * A + 9.0 * B).epsilon(1e-10));
    }
}

TEST_CASE("coercivity lower bound") {
    std::mt19937_64 rng(13);
    const auto spec = canonical_spec(21);
    double sup_a = 0.0;
    for (double a : spec.coeff_a) sup_a = std::max(sup_a, std::fabs(a));
    for (int trial = 0; trial < 200; ++trial) {
        const auto z = oracles::random_sequence(rng, 21, 2.0);
        const double q4 = seq::quad_norm4(z);
        const double lower = 0.25 * q4 - sup_a * std::sqrt(q4);
        CHECK(eval_J(spec, z) >= lower - 1e-9 * std::max(1.0, std::fabs(lower)));
    }
}
