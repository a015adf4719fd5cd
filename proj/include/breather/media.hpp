#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "breather/exact.hpp"
#include "breather/rational.hpp"

namespace breather::media {

// ---------------------------------------------------------------------------
// Media
//
// Three closed-form families. Each carries the exact rational witness of its
// admissibility condition; the witness fixes the index lattice on which the
// decaying fundamental solutions exist.
// ---------------------------------------------------------------------------

/// g = b on |x| < c, g = -a outside. Admissible when
/// sqrt(b) * omega * c * 2/pi = p/q with p, q odd.
struct StepMedium {
    double a = 1.0;      // outer coefficient (enters as -a)
    double b = 1.0;      // inner coefficient
    double c = 1.0;      // half-width of the inner region
    double omega = 1.0;  // angular frequency
    OddRational ratio;   // sqrt(b) omega c 2/pi

    /// Base index: modes exist for k in q * Z_odd.
    std::int64_t base_index() const { return ratio.q; }
};

/// 2pi-periodic even g: a on |x| < theta*pi, b on theta*pi < |x| < pi.
/// Admissible when l = sqrt(b/a)(1-theta)/theta and 2m = 4 sqrt(a) theta omega
/// are both odd/odd rationals.
struct PeriodicStepMedium {
    double a = 1.0;
    double b = 1.0;
    double theta = 0.5;  // in (0,1)
    double omega = 1.0;
    OddRational l_ratio;      // l = sqrt(b/a)(1-theta)/theta = pt/qt
    OddRational two_m_ratio;  // 2m = 4 sqrt(a) theta omega = p/q
    std::int64_t r_base = 1;  // q * qt

    double l() const { return std::sqrt(b / a) * (1.0 - theta) / theta; }
    double m() const { return 2.0 * std::sqrt(a) * theta * omega; }
    std::int64_t base_index() const { return r_base; }
};

/// g = 1 on the interval (-l, l) with Dirichlet ends. Admissible when
/// omega*l/pi = p/q4 with p odd and q4 a multiple of 4.
struct DirichletMedium {
    double l = 1.0;
    double omega = 1.0;
    std::int64_t p = 1;   // odd numerator of omega*l/pi
    std::int64_t q4 = 4;  // denominator, multiple of 4

    std::int64_t base_index() const { return 1; }
    /// Half the sign-change stride of the slope sequence: slopes at k and
    /// k + 2q have opposite signs.
    std::int64_t sign_change_q() const { return q4 / 4; }
};

using Medium = std::variant<StepMedium, PeriodicStepMedium, DirichletMedium>;

/// Index of multiplicity subspaces: sequences supported on r * Z_odd.
struct SymmetryIndex {
    std::int64_t r = 1;

    static SymmetryIndex for_medium(const Medium& medium, std::int64_t r);
};

// ---------------------------------------------------------------------------
// Admissibility checks
// ---------------------------------------------------------------------------

inline OddRational check_step_admissible(double a, double b, double c, double omega,
                                         RationalDetect opts = {}) {
    if (!(a > 0.0 && b > 0.0 && c > 0.0 && omega > 0.0))
        throw ConfigError("step medium requires a, b, c, omega > 0");
    const double value = std::sqrt(b) * omega * c * 2.0 / std::numbers::pi;
    const auto r = detect_rational(value, opts);
    if (!r) throw NotAdmissible("sqrt(b)*omega*c*2/pi = " + std::to_string(value) +
                                " has no small rational reconstruction");
    return OddRational::from(*r, "sqrt(b)*omega*c*2/pi");
}

struct PeriodicAdmissibility {
    OddRational l_ratio;
    OddRational two_m_ratio;
    std::int64_t r_base;  // q * qt, odd
};

inline PeriodicAdmissibility check_periodic_admissible(double a, double b, double theta,
                                                       double omega,
                                                       RationalDetect opts = {}) {
    if (!(a > 0.0 && b > 0.0 && omega > 0.0))
        throw ConfigError("periodic medium requires a, b, omega > 0");
    if (a == b) throw ConfigError("periodic medium requires a != b");
    if (!(theta > 0.0 && theta < 1.0))
        throw ConfigError("periodic medium requires theta in (0,1)");

    const double l = std::sqrt(b / a) * (1.0 - theta) / theta;
    const auto lr = detect_rational(l, opts);
    if (!lr) throw NotAdmissible("sqrt(b/a)(1-theta)/theta has no small rational reconstruction");
    const auto l_odd = OddRational::from(*lr, "sqrt(b/a)(1-theta)/theta");

    const double two_m = 4.0 * std::sqrt(a) * theta * omega;
    const auto mr = detect_rational(two_m, opts);
    if (!mr) throw NotAdmissible("4*sqrt(a)*theta*omega has no small rational reconstruction");
    const auto m_odd = OddRational::from(*mr, "4*sqrt(a)*theta*omega");

    return PeriodicAdmissibility{l_odd, m_odd, m_odd.q * l_odd.q};
}

struct DirichletAdmissibility {
    std::int64_t p;   // odd
    std::int64_t q4;  // multiple of 4
};

inline DirichletAdmissibility check_dirichlet_admissible(double l, double omega,
                                                         RationalDetect opts = {}) {
    if (!(l > 0.0 && omega > 0.0))
        throw ConfigError("dirichlet medium requires l, omega > 0");
    const double value = omega * l / std::numbers::pi;
    const auto r = detect_rational(value, opts);
    if (!r) throw NotAdmissible("omega*l/pi has no small rational reconstruction");
    if (!(r->num > 0) || r->num % 2 == 0 || r->den % 4 != 0)
        throw NotAdmissible("omega*l/pi = " + r->str() +
                            " is not (odd)/(multiple of 4)");
    return DirichletAdmissibility{r->num, r->den};
}

// Exact-input variants: the admissibility rational is computed in integer
// arithmetic, bypassing floating detection entirely.

inline OddRational check_step_admissible(const ExactReal& a, const ExactReal& b,
                                         const ExactReal& c, const ExactReal& omega) {
    if (!(a.positive() && b.positive() && c.positive() && omega.positive()))
        throw ConfigError("step medium requires a, b, c, omega > 0");
    const auto sqrt_b = exact_sqrt(b);
    if (!sqrt_b) throw NotAdmissible("sqrt(b) is not an exact constructible value");
    ExactReal value = *sqrt_b * omega * c * ExactReal{Rational{2, 1}, 1, -1};
    if (!value.is_rational())
        throw NotAdmissible("sqrt(b)*omega*c*2/pi is irrational");
    return OddRational::from(value.rat, "sqrt(b)*omega*c*2/pi");
}

inline PeriodicAdmissibility check_periodic_admissible(const ExactReal& a, const ExactReal& b,
                                                       const ExactReal& theta,
                                                       const ExactReal& omega) {
    if (!(a.positive() && b.positive() && omega.positive()))
        throw ConfigError("periodic medium requires a, b, omega > 0");
    if (a.rat == b.rat && a.root == b.root && a.pi_pow == b.pi_pow)
        throw ConfigError("periodic medium requires a != b");
    if (!(theta.is_rational() && theta.positive() && theta.rat.num < theta.rat.den))
        throw ConfigError("periodic medium requires theta in (0,1)");

    const auto sqrt_ba = exact_sqrt(b / a);
    if (!sqrt_ba) throw NotAdmissible("sqrt(b/a) is not an exact constructible value");
    const ExactReal one_minus_theta{Rational::reduced(theta.rat.den - theta.rat.num, theta.rat.den), 1, 0};
    ExactReal l = *sqrt_ba * one_minus_theta / theta;
    if (!l.is_rational()) throw NotAdmissible("sqrt(b/a)(1-theta)/theta is irrational");
    const auto l_odd = OddRational::from(l.rat, "sqrt(b/a)(1-theta)/theta");

    const auto sqrt_a = exact_sqrt(a);
    if (!sqrt_a) throw NotAdmissible("sqrt(a) is not an exact constructible value");
    ExactReal two_m = ExactReal{Rational{4, 1}, 1, 0} * *sqrt_a * theta * omega;
    if (!two_m.is_rational()) throw NotAdmissible("4*sqrt(a)*theta*omega is irrational");
    const auto m_odd = OddRational::from(two_m.rat, "4*sqrt(a)*theta*omega");

    return PeriodicAdmissibility{l_odd, m_odd, m_odd.q * l_odd.q};
}

inline DirichletAdmissibility check_dirichlet_admissible(const ExactReal& l,
                                                         const ExactReal& omega) {
    if (!(l.positive() && omega.positive()))
        throw ConfigError("dirichlet medium requires l, omega > 0");
    ExactReal value = omega * l * ExactReal{Rational{1, 1}, 1, -1};
    if (!value.is_rational()) throw NotAdmissible("omega*l/pi is irrational");
    const Rational r = value.rat;
    if (!(r.num > 0) || r.num % 2 == 0 || r.den % 4 != 0)
        throw NotAdmissible("omega*l/pi = " + r.str() + " is not (odd)/(multiple of 4)");
    return DirichletAdmissibility{r.num, r.den};
}

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

inline StepMedium make_step(double a, double b, double c, double omega) {
    StepMedium m{a, b, c, omega, check_step_admissible(a, b, c, omega)};
    return m;
}

inline StepMedium make_step(const ExactReal& a, const ExactReal& b, const ExactReal& c,
                            const ExactReal& omega) {
    StepMedium m{a.value(), b.value(), c.value(), omega.value(),
                 check_step_admissible(a, b, c, omega)};
    return m;
}

inline PeriodicStepMedium make_periodic(double a, double b, double theta, double omega) {
    const auto adm = check_periodic_admissible(a, b, theta, omega);
    return PeriodicStepMedium{a, b, theta, omega, adm.l_ratio, adm.two_m_ratio, adm.r_base};
}

inline PeriodicStepMedium make_periodic(const ExactReal& a, const ExactReal& b,
                                        const ExactReal& theta, const ExactReal& omega) {
    const auto adm = check_periodic_admissible(a, b, theta, omega);
    return PeriodicStepMedium{a.value(), b.value(), theta.value(), omega.value(),
                              adm.l_ratio, adm.two_m_ratio, adm.r_base};
}

inline DirichletMedium make_dirichlet(double l, double omega) {
    const auto adm = check_dirichlet_admissible(l, omega);
    return DirichletMedium{l, omega, adm.p, adm.q4};
}

inline DirichletMedium make_dirichlet(const ExactReal& l, const ExactReal& omega) {
    const auto adm = check_dirichlet_admissible(l, omega);
    return DirichletMedium{l.value(), omega.value(), adm.p, adm.q4};
}

// ---------------------------------------------------------------------------
// Shared views over the variant
// ---------------------------------------------------------------------------

inline double omega_of(const Medium& medium) {
    return std::visit([](const auto& m) { return m.omega; }, medium);
}

inline std::int64_t base_index(const Medium& medium) {
    return std::visit([](const auto& m) { return m.base_index(); }, medium);
}

/// Coefficient g(x). Even in x; jump points are measure zero and resolved
/// toward the inner value.
inline double g_at(const Medium& medium, double x) {
    const double ax = std::fabs(x);
    if (const auto* s = std::get_if<StepMedium>(&medium)) {
        return ax <= s->c ? s->b : -s->a;
    }
    if (const auto* p = std::get_if<PeriodicStepMedium>(&medium)) {
        const double period = 2.0 * std::numbers::pi;
        double u = std::fmod(ax, period);
        if (u > std::numbers::pi) u = period - u;  // evenness within one period
        return u <= p->theta * std::numbers::pi ? p->a : p->b;
    }
    return 1.0;  // dirichlet
}

/// Whether the medium lives on a bounded interval.
inline bool is_bounded(const Medium& medium) {
    return std::holds_alternative<DirichletMedium>(medium);
}

/// Half-width of the spatial domain (l for the bounded medium, +inf otherwise).
inline double domain_halfwidth(const Medium& medium) {
    if (const auto* d = std::get_if<DirichletMedium>(&medium)) return d->l;
    return std::numeric_limits<double>::infinity();
}

/// Jump points of g on (0, xmax), sorted ascending. Quadrature panels and
/// finite-difference grids must not straddle these.
inline std::vector<double> interfaces_on(const Medium& medium, double xmax) {
    std::vector<double> pts;
    if (const auto* s = std::get_if<StepMedium>(&medium)) {
        if (s->c < xmax) pts.push_back(s->c);
    } else if (const auto* p = std::get_if<PeriodicStepMedium>(&medium)) {
        const double period = 2.0 * std::numbers::pi;
        const double t = p->theta * std::numbers::pi;
        for (double base = 0.0; base < xmax; base += period) {
            if (base + t < xmax && base + t > 0.0) pts.push_back(base + t);
            if (base + period - t < xmax) pts.push_back(base + period - t);
        }
    }
    return pts;
}

inline SymmetryIndex SymmetryIndex::for_medium(const Medium& medium, std::int64_t r) {
    const std::int64_t base = media::base_index(medium);
    if (r <= 0 || r % 2 == 0)
        throw ConfigError("symmetry index r must be odd and positive");
    if (r % base != 0)
        throw ConfigError("symmetry index r = " + std::to_string(r) +
                          " must be an odd multiple of the base index " + std::to_string(base));
    if ((r / base) % 2 == 0)
        throw ConfigError("symmetry index r / base must be odd");
    return SymmetryIndex{r};
}

} // namespace breather::media
