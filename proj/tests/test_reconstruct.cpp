#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "breather/reconstruct.hpp"
#include "breather/solver.hpp"

using namespace breather;
using namespace breather::reconstruct;
using seq::OddSequence;

namespace {

constexpr double kPi = std::numbers::pi;

struct StepSetup {
    media::Medium medium = media::make_step(1.0, 1.0, kPi / 2, 1.0);
    functional::FunctionalSpec spec;
    floquet::ProfileTable profiles;
    StepSetup(int N, double gamma = -1.0) {
        spec = functional::eta_table(medium, gamma, N, 1);
        profiles = floquet::ProfileTable::build(medium, N, 1);
    }
};

FieldGrid assemble_default(const StepSetup& s, const OddSequence& alpha) {
    const auto x = build_x_grid(s.medium, 0.5);
    const auto t = build_t_grid(s.spec.T, s.spec.N, 1);
    return assemble(alpha, s.profiles, x, t, s.spec.omega);
}

} // namespace

TEST_CASE("assemble: zero field, single-pair sinusoid, missing profile") {
    StepSetup s(9);
    const auto zero = assemble_default(s, OddSequence::zeros(9));
    CHECK(zero.sup_norm() == 0.0);

    // alpha = signed pair at k0: w(0, t) is a pure sinusoid of amplitude
    // 2 / (k0 sqrt(T)).
    for (int k0 : {1, 3}) {
        const auto f = assemble_default(s, OddSequence::pair(k0, 1.0, 9));
        const std::size_t i0 = (f.x.size() - 1) / 2;
        REQUIRE(f.x[i0] == 0.0);
        const double amp = 2.0 / (k0 * std::sqrt(f.T));
        double max_dev = 0.0;
        for (std::size_t j = 0; j < f.t.size(); ++j) {
            const double expected = amp * std::cos(f.omega * k0 * f.t[j]);
            max_dev = std::max(max_dev, std::fabs(f.w[i0][j] - expected));
        }
        CHECK(max_dev < 1e-14);
    }

    // A harmonic without a profile is an error.
    floquet::ProfileTable only_k1 = floquet::ProfileTable::build(s.medium, 1, 1);
    CHECK_THROWS_AS(assemble(OddSequence::pair(3, 1.0, 9), only_k1, {0.0, 1.0},
                             {0.0, 0.5}, 1.0),
                    MissingProfile);
}

TEST_CASE("assemble: evenness, realness, T-periodicity") {
    StepSetup s(9);
    OddSequence alpha = OddSequence::zeros(9);
    alpha.set(1, 1.3);
    alpha.set(3, -0.4);
    alpha.set(7, 0.02);
    const auto f = assemble_default(s, alpha);

    // Evenness is bitwise on the symmetric grid.
    const std::size_t n = f.x.size();
    for (std::size_t i = 0; i < n / 2; ++i) {
        REQUIRE(f.x[i] == -f.x[n - 1 - i]);
        for (std::size_t j = 0; j < f.t.size(); j += 7)
            CHECK(f.w[i][j] == f.w[n - 1 - i][j]);
    }

    // Realness: the complex-exponential synthesis has vanishing imaginary
    // part and reproduces the real field.
    const double T = f.T;
    for (double x : {0.0, 0.7, 2.5}) {
        for (double t : {0.1, 1.0, 4.4}) {
            std::complex<double> acc(0.0, 0.0);
            for (int k = 1; k <= 9; k += 2) {
                if (alpha.at(k) == 0.0) continue;
                const double phi = s.profiles.at(k).value(std::fabs(x));
                const std::complex<double> ek =
                    std::exp(std::complex<double>(0.0, f.omega * k * t)) / std::sqrt(T);
                acc += alpha.at(k) / static_cast<double>(k) * phi * ek;
                acc += alpha.at(k) / static_cast<double>(k) * phi * std::conj(ek);
            }
            CHECK(std::fabs(acc.imag()) < 1e-12);
            // Direct synthesis at the same point.
            double direct = 0.0;
            for (int k = 1; k <= 9; k += 2)
                direct += 2.0 / std::sqrt(T) * alpha.at(k) / k *
                          s.profiles.at(k).value(std::fabs(x)) * std::cos(f.omega * k * t);
            CHECK(std::fabs(acc.real() - direct) < 1e-12);
        }
    }

    // T-periodicity: re-assemble on a grid shifted by one full period.
    auto t_shift = f.t;
    for (double& t : t_shift) t += T;
    const auto g = assemble(alpha, s.profiles, f.x, t_shift, f.omega);
    double dev = 0.0;
    for (std::size_t i = 0; i < f.x.size(); i += 11)
        for (std::size_t j = 0; j < f.t.size(); ++j)
            dev = std::max(dev, std::fabs(f.w[i][j] - g.w[i][j]));
    CHECK(dev < 1e-12 * std::max(1.0, f.sup_norm()));
}

TEST_CASE("antiperiodicity: odd-harmonic fields and planted violations") {
    StepSetup s(9);
    OddSequence alpha = OddSequence::zeros(9);
    alpha.set(1, 1.0);
    alpha.set(5, 0.3);
    const auto f = assemble_default(s, alpha);
    // Every odd-harmonic field is T/2-antiperiodic.
    CHECK(check_antiperiodicity(f, 1) < 1e-10 * f.sup_norm());

    // r = 3 lattice field.
    StepSetup s3(21);
    OddSequence on_lattice = OddSequence::zeros(21);
    on_lattice.set(3, 1.0);
    on_lattice.set(9, -0.2);
    const auto x = build_x_grid(s3.medium, 0.5);
    const auto t = build_t_grid(s3.spec.T, 21, 3);
    const auto f3 = assemble(on_lattice, s3.profiles, x, t, s3.spec.omega);
    CHECK(check_antiperiodicity(f3, 3) < 1e-10 * f3.sup_norm());

    // Planting mass off the lattice is detected at O(field) size.
    OddSequence off_lattice = on_lattice;
    off_lattice.set(5, 0.5);
    const auto fbad = assemble(off_lattice, s3.profiles, x, t, s3.spec.omega);
    CHECK(check_antiperiodicity(fbad, 3) > 0.1 * fbad.sup_norm());
}

TEST_CASE("decay fit: converged breather and underflow") {
    StepSetup s(21);
    solver::SolveConfig cfg;
    cfg.N = 21;
    const auto res = solver::minimize(s.spec, cfg);
    const auto f = assemble_default(s, res.alpha);
    const auto fit = fit_decay(f, 0.5);
    // The slowest mode decays at k omega sqrt(a) = 1, well above the
    // certificate rate 0.5; the gate is rho_fit >= 0.45.
    CHECK(fit.rho_fit >= 0.45);
    CHECK(fit.rho_fit == doctest::Approx(1.0).epsilon(0.05));
    CHECK(fit.C_fit > 0.0);

    // The fitted envelope bounds the field on a finer grid than the one it
    // was calibrated on (up to a 10% prefactor allowance).
    std::vector<double> x_fine;
    for (double x = -20.0; x <= 20.0; x += 0.037) x_fine.push_back(x);
    const auto t = build_t_grid(s.spec.T, 21, 1);
    const auto fine = assemble(res.alpha, s.profiles, x_fine, t, s.spec.omega);
    for (std::size_t i = 0; i < fine.x.size(); ++i)
        for (std::size_t j = 0; j < fine.t.size(); j += 5)
            CHECK(std::fabs(fine.w[i][j]) <=
                  1.1 * fit.C_fit * std::exp(-fit.rho_fit * std::fabs(fine.x[i])));

    CHECK_THROWS_AS(fit_decay(assemble_default(s, OddSequence::zeros(21)), 0.5),
                    TailUnderflow);
}

TEST_CASE("weak residual: zero field") {
    StepSetup s(9);
    const auto rep = weak_residual(OddSequence::zeros(9), s.profiles, s.spec, s.medium);
    CHECK(rep.max_rel_direct == 0.0);
    for (const auto& e : rep.entries) {
        CHECK(e.H1 == 0.0);
        CHECK(e.H2 == 0.0);
        CHECK(e.H3 == 0.0);
    }
}

TEST_CASE("weak residual at the seed matches the gradient pairing") {
    StepSetup s(9);
    const auto seed = solver::seed_point(s.spec, 1);
    const auto g = functional::grad_J(s.spec, seed.alpha0);
    WeakOptions opt;
    opt.x_max = 40.0;
    const auto rep = weak_residual(seed.alpha0, s.profiles, s.spec, s.medium, opt);

    const double w4 = std::pow(s.spec.omega, 4);
    for (const auto& e : rep.entries) {
        if (!e.in_band) continue;
        // -H1 + H2 - gamma H3 = -(gamma w^4 / T) J'(alpha)[psi0 * pair(k0)].
        const double pairing = 2.0 * g.at(e.k0);  // per unit Psi(0)
        double psi0 = 1.0;
        const double expected = -(s.spec.gamma * w4 / s.spec.T) * pairing * psi0;
        // Psi(0) = 1 for both the gaussian and the mode shapes here.
        CHECK(std::fabs(e.direct - expected) <= 1e-8 * std::max(e.scale, 1.0));
        CHECK(std::fabs(e.direct - e.reduced) <= 1e-8 * std::max(e.scale, 1.0));
    }
    // The seed is not critical: some in-band residual is O(scale).
    double worst = 0.0;
    for (const auto& e : rep.entries)
        if (e.in_band && e.scale > 0) worst = std::max(worst, std::fabs(e.direct) / e.scale);
    CHECK(worst > 1e-3);
}

TEST_CASE("weak residual vanishes at a converged breather") {
    StepSetup s(21);
    solver::SolveConfig cfg;
    cfg.N = 21;
    const auto res = solver::minimize(s.spec, cfg);
    WeakOptions opt;
    opt.x_max = 40.0;
    const auto rep = weak_residual(res.alpha, s.profiles, s.spec, s.medium, opt);
    CHECK(rep.max_rel_direct <= 1e-6);
    CHECK(rep.max_route_gap <= 1e-6);

    // Out-of-band entries report the truncation residual: both routes agree
    // but do not vanish.
    bool saw_oob = false;
    for (const auto& e : rep.entries) {
        if (e.in_band) continue;
        saw_oob = true;
        CHECK(std::fabs(e.direct - e.reduced) <= 1e-6 * std::max(e.scale, 1e-300));
        if (e.k0 <= 3 * 21) CHECK(std::fabs(e.reduced) > 0.0);
    }
    CHECK(saw_oob);
}

TEST_CASE("weak residual on a symmetry lattice reports off-lattice entries") {
    const media::Medium med = media::make_periodic(1.0, 9.0, 0.5, 0.5);
    const auto spec = functional::eta_table(med, -1.0, 27, 3);
    const auto profiles = floquet::ProfileTable::build(med, 27, 3);
    solver::SolveConfig cfg;
    cfg.N = 27;
    cfg.r = 3;
    const auto res = solver::minimize(spec, cfg);
    WeakOptions opt;
    opt.x_max = 80.0;
    const auto rep = weak_residual(res.alpha, profiles, spec, med, opt);
    CHECK(rep.max_rel_direct <= 1e-6);
    CHECK(rep.max_route_gap <= 1e-6);
}

TEST_CASE("full space-time quadrature agrees with the collapsed functionals") {
    // The weak-form pipeline collapses the time integrals of H1 and H2 by
    // orthogonality. Here both are recomputed as honest two-dimensional
    // quadratures of the full products w_t psi_t and w_x psi_x, with every
    // harmonic of w present.
    StepSetup s(21);
    solver::SolveConfig cfg;
    cfg.N = 21;
    const auto res = solver::minimize(s.spec, cfg);
    const auto seed = solver::seed_point(s.spec, 1);

    const double omega = s.spec.omega, T = s.spec.T;
    const int Mt = 1024;
    std::vector<double> ts(Mt);
    for (int j = 0; j < Mt; ++j) ts[j] = T * j / Mt;

    for (const auto* alpha : {&res.alpha, &seed.alpha0}) {
        WeakOptions opt;
        opt.x_max = 40.0;
        opt.out_of_band = 0;
        const auto rep = weak_residual(*alpha, s.profiles, s.spec, s.medium, opt);

        // Bank layout: per support harmonic, three gaussians with sigma =
        // {0.5, 1, 2} times the decay length (here 1/rho = 2), then the
        // matching mode shape.
        const double Lref = 2.0;
        const std::vector<double> sigma_factors{0.5, 1.0, 2.0};
        for (std::size_t pick : {std::size_t{0}, std::size_t{2}, std::size_t{3},
                                 std::size_t{17}}) {
            REQUIRE(pick < rep.entries.size());
            const auto& entry = rep.entries[pick];
            const int k0 = entry.k0;
            REQUIRE(entry.k0 == s.spec.support[pick / 4]);
            const std::size_t within = pick % 4;
            const double sigma = within < 3 ? sigma_factors[within] * Lref : 0.0;
            REQUIRE(entry.shape == (within < 3 ? "gauss" : "mode"));

            // Rebuild the same spatial profile the bank used.
            std::function<double(double)> psi, dpsi;
            if (within < 3) {
                psi = [sigma](double x) { return std::exp(-(x / sigma) * (x / sigma)); };
                dpsi = [sigma](double x) {
                    return -2.0 * x / (sigma * sigma) * std::exp(-(x / sigma) * (x / sigma));
                };
            } else {
                const auto& prof = s.profiles.at(k0);
                psi = [&prof](double x) { return prof.value(x); };
                dpsi = [&prof](double x) { return prof.deriv(x); };
            }

            const double X = within < 3 ? std::min(8.5 * sigma, 40.0) : 40.0;
            const auto panels = quad::build_panels(0.0, X, media::interfaces_on(s.medium, X),
                                                   2.0 / (21.0 * omega));

            const double scale2 = 2.0 / std::sqrt(T);
            const auto wt_at = [&](double x, double t) {
                double acc = 0.0;
                for (int k = 1; k <= 21; k += 2) {
                    if (alpha->at(k) == 0.0) continue;
                    acc -= omega * scale2 * alpha->at(k) * s.profiles.at(k).value(x) *
                           std::sin(omega * k * t);
                }
                return acc;
            };
            const auto wx_at = [&](double x, double t) {
                double acc = 0.0;
                for (int k = 1; k <= 21; k += 2) {
                    if (alpha->at(k) == 0.0) continue;
                    acc += scale2 * alpha->at(k) / k * s.profiles.at(k).deriv(x) *
                           std::cos(omega * k * t);
                }
                return acc;
            };

            const double h1_2d = 2.0 * quad::integrate(
                [&](double x) {
                    double tint = 0.0;
                    for (int j = 0; j < Mt; ++j)
                        tint += wt_at(x, ts[j]) *
                                (-(2.0 * omega / std::sqrt(T)) * psi(x) *
                                 std::sin(omega * k0 * ts[j]));
                    return media::g_at(s.medium, x) * tint * T / Mt;
                },
                panels);
            const double h2_2d = 2.0 * quad::integrate(
                [&](double x) {
                    double tint = 0.0;
                    for (int j = 0; j < Mt; ++j)
                        tint += wx_at(x, ts[j]) * (scale2 * dpsi(x) / k0) *
                                std::cos(omega * k0 * ts[j]);
                    return tint * T / Mt;
                },
                panels);

            const double ref =
                std::max({std::fabs(entry.H1), std::fabs(entry.H2), entry.scale, 1e-6});
            CHECK(std::fabs(h1_2d - entry.H1) <= 1e-8 * ref);
            CHECK(std::fabs(h2_2d - entry.H2) <= 1e-8 * ref);
        }
    }
}

TEST_CASE("trace derivative pairs with the sequence-side time signal") {
    StepSetup s(9);
    seq::OddSequence alpha = seq::OddSequence::zeros(9);
    alpha.set(1, 0.8);
    alpha.set(5, -0.21);
    const auto x = build_x_grid(s.medium, 0.5);
    const auto t = build_t_grid(s.spec.T, 9, 1);
    const auto f = assemble(alpha, s.profiles, x, t, s.spec.omega);
    const std::size_t i0 = (f.x.size() - 1) / 2;  // x = 0 row

    const auto sig = seq::time_signal(alpha, f.t, s.spec.omega);
    // w_t(0, t) = -omega * time_signal(alpha)(t): finite difference in t.
    const double h = 1e-6;
    for (std::size_t j = 0; j < f.t.size(); j += 13) {
        std::vector<double> stencil{f.t[j] - h, f.t[j], f.t[j] + h};
        const auto probe = assemble(alpha, s.profiles, {0.0}, stencil, s.spec.omega);
        const double wt = (probe.w[0][2] - probe.w[0][0]) / (2.0 * h);
        CHECK(wt == doctest::Approx(-s.spec.omega * sig[j]).epsilon(1e-7));
        CHECK(f.w[i0][j] == probe.w[0][1]);  // grid and pointwise synthesis agree
    }
}

TEST_CASE("parseval bridge for the time direction") {
    const media::Medium med = media::make_step(1.0, 1.0, kPi / 2, 1.0);
    for (double sigma : {1.0, 2.0, 4.0}) {
        const auto shape = reconstruct::detail::gaussian_shape(med, sigma);
        for (int k0 : {1, 5, 21})
            CHECK(parseval_time_gap(shape, k0, 1.0, med, 40.0, 4096) < 1e-6);
    }
}

TEST_CASE("regularity diagnostic") {
    OddSequence pair = OddSequence::pair(5, 0.7, 9);
    const auto rep = regularity_diagnostic(pair, {0.0, 0.2, 0.45});
    REQUIRE(rep.nu.size() == 3);
    CHECK(rep.h_norm[0] == doctest::Approx(seq::l2_norm(pair)).epsilon(1e-14));
    CHECK(rep.h_norm[1] ==
          doctest::Approx(std::numbers::sqrt2 * std::pow(26.0, 0.1) * 0.7).epsilon(1e-13));

    // Tail exponent of a power-law sequence is recovered.
    OddSequence poly = OddSequence::zeros(41);
    for (int k = 1; k <= 41; k += 2) poly.set(k, std::pow(k, -1.5));
    const auto rep2 = regularity_diagnostic(poly, {0.2});
    CHECK(rep2.tail_exponent == doctest::Approx(-1.5).epsilon(1e-10));
}

TEST_CASE("grid builders") {
    const media::Medium med = media::make_step(1.0, 1.0, kPi / 2, 1.0);
    const auto x = build_x_grid(med, 0.5);
    CHECK(x.front() == doctest::Approx(-40.0));
    CHECK(x.back() == doctest::Approx(40.0));
    CHECK(x[(x.size() - 1) / 2] == 0.0);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) CHECK(x[i] < x[i + 1]);

    const auto t = build_t_grid(2 * kPi, 21, 3);
    CHECK(t.size() % 6 == 0);
    CHECK(t.front() == 0.0);
    CHECK(t.back() < 2 * kPi);

    const auto dir_x = build_x_grid(media::make_dirichlet(3 * kPi / 8, 1.0), 1.0);
    CHECK(dir_x.front() == doctest::Approx(-3 * kPi / 8));
    CHECK(dir_x.back() == doctest::Approx(3 * kPi / 8));
}
