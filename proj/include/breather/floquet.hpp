#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "breather/media.hpp"

namespace breather::floquet {

// ---------------------------------------------------------------------------
// Transfer-matrix machinery for the piecewise-constant operators
// L_k = -d^2/dx^2 - k^2 omega^2 g(x), and the decaying fundamental solutions
// Phi_k normalized by Phi_k(0) = 1.
// ---------------------------------------------------------------------------

struct Mat2 {
    double a11 = 1.0, a12 = 0.0, a21 = 0.0, a22 = 1.0;

    double det() const { return a11 * a22 - a12 * a21; }
    double trace() const { return a11 + a22; }

    Mat2 operator*(const Mat2& o) const {
        return Mat2{a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                    a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }
};

/// Position-slope transfer over an interval of length s where g = cconst:
/// (phi, phi') at x0+s = T * (phi, phi') at x0. Rotation-like, det = 1.
struct PropagationMatrix {
    Mat2 m;
    double s = 0.0;
    double cconst = 1.0;
};

inline PropagationMatrix propagation(double s, double cconst, int k, double omega) {
    if (s < 0.0) throw Error("propagation: negative interval length");
    if (cconst <= 0.0) throw Error("propagation: medium constant must be positive");
    const double w = k * omega * std::sqrt(cconst);
    const double cs = std::cos(w * s);
    const double sn = std::sin(w * s);
    return PropagationMatrix{Mat2{cs, sn / w, -w * sn, cs}, s, cconst};
}

/// Transfer over one full 2pi cell of the periodic medium, in the cell frame
/// that starts at the a-interval: A_k = T_k(2pi(1-theta), b) T_k(2 theta pi, a).
struct MonodromyMatrix {
    Mat2 m;
    int k = 1;
    double trace_closed_form = 0.0;  // 2 cos cos - (sqrt(a/b)+sqrt(b/a)) sin sin
};

inline MonodromyMatrix monodromy(const media::PeriodicStepMedium& med, int k) {
    const double theta_len = 2.0 * med.theta * std::numbers::pi;
    const PropagationMatrix ta = propagation(theta_len, med.a, k, med.omega);
    const PropagationMatrix tb = propagation(2.0 * std::numbers::pi - theta_len, med.b, k, med.omega);
    const double ml = med.m() * med.l();
    const double cb = std::cos(k * ml * std::numbers::pi);
    const double sb = std::sin(k * ml * std::numbers::pi);
    const double ca = std::cos(k * med.m() * std::numbers::pi);
    const double sa = std::sin(k * med.m() * std::numbers::pi);
    const double ratio = std::sqrt(med.a / med.b) + std::sqrt(med.b / med.a);
    return MonodromyMatrix{tb.m * ta.m, k, 2.0 * cb * ca - ratio * sb * sa};
}

struct FloquetMultipliers {
    double small = 0.0;  // |small| < 1
    double large = 0.0;  // |large| > 1, small * large = 1
};

/// Eigenvalues of the monodromy matrix, 0.5 (tr +- sqrt(tr^2 - 4)).
/// Requires |tr| > 2, i.e. zero inside a spectral gap.
inline FloquetMultipliers floquet_multipliers(const MonodromyMatrix& A) {
    const double tr = A.m.trace();
    if (std::fabs(tr) <= 2.0)
        throw NoSpectralGap("|tr A_k| = " + std::to_string(std::fabs(tr)) +
                            " <= 2 at k = " + std::to_string(A.k));
    const double sign = tr > 0.0 ? 1.0 : -1.0;
    const double large = 0.5 * (tr + sign * std::sqrt(tr * tr - 4.0));
    return FloquetMultipliers{1.0 / large, large};
}

// ---------------------------------------------------------------------------
// Mode profiles: piecewise closed-form descriptors, evaluated lazily.
// ---------------------------------------------------------------------------

namespace detail {

/// c_cos cos(freq (x-x0)) + c_sin sin(freq (x-x0)).
struct TrigForm {
    double freq = 1.0;
    double c_cos = 0.0;
    double c_sin = 0.0;
    double x0 = 0.0;

    double value(double x) const {
        const double u = freq * (x - x0);
        return c_cos * std::cos(u) + c_sin * std::sin(u);
    }
    double deriv(double x) const {
        const double u = freq * (x - x0);
        return freq * (-c_cos * std::sin(u) + c_sin * std::cos(u));
    }
};

struct StepData {
    TrigForm inner;     // on [0, c]
    double c = 1.0;
    double out_amp = 0.0;   // value at c, carried over exactly
    double out_rate = 1.0;  // k omega sqrt(a)
};

struct PeriodicData {
    TrigForm p1, p2;        // cell pieces on [0, split) and [split, period)
    double split = 1.0;     // 2 theta pi
    double period = 2.0 * std::numbers::pi;
    double shift = 0.0;     // theta pi; profile(x) = cell(x + shift)
    double mult = 0.0;      // Floquet multiplier of the decaying mode
};

struct DirichletData {
    TrigForm f;  // on [0, l]
    double l = 1.0;
};

} // namespace detail

/// Decaying fundamental solution Phi_k for x >= 0, Phi_k(0) = 1.
class ModeProfile {
public:
    int k = 1;
    double slope0 = 0.0;                 // Phi_k'(0)
    std::optional<double> floquet_mult;  // periodic media only
    std::optional<double> decay_rate;    // uniform rate; nullopt on bounded media
    double sup_bound = 1.0;              // certified sup-norm bound
    double envelope_prefactor = 1.0;     // M with |Phi_k(x)| <= M e^{-decay_rate x}

    double value(double x) const {
        if (const auto* s = std::get_if<detail::StepData>(&data_)) {
            if (x <= s->c) return s->inner.value(x);
            return s->out_amp * std::exp(-s->out_rate * (x - s->c));
        }
        if (const auto* p = std::get_if<detail::PeriodicData>(&data_)) {
            double y = x + p->shift;
            const double n = std::floor(y / p->period);
            y -= n * p->period;
            const double cell = (y < p->split ? p->p1 : p->p2).value(y);
            return powi(p->mult, static_cast<long>(n)) * cell;
        }
        return std::get<detail::DirichletData>(data_).f.value(x);
    }

    double deriv(double x) const {
        if (const auto* s = std::get_if<detail::StepData>(&data_)) {
            if (x <= s->c) return s->inner.deriv(x);
            return -s->out_rate * s->out_amp * std::exp(-s->out_rate * (x - s->c));
        }
        if (const auto* p = std::get_if<detail::PeriodicData>(&data_)) {
            double y = x + p->shift;
            const double n = std::floor(y / p->period);
            y -= n * p->period;
            const double cell = (y < p->split ? p->p1 : p->p2).deriv(y);
            return powi(p->mult, static_cast<long>(n)) * cell;
        }
        return std::get<detail::DirichletData>(data_).f.deriv(x);
    }

    /// Largest oscillation or decay rate of the descriptor (panel sizing).
    double max_freq() const {
        if (const auto* s = std::get_if<detail::StepData>(&data_))
            return std::max(s->inner.freq, s->out_rate);
        if (const auto* p = std::get_if<detail::PeriodicData>(&data_))
            return std::max(p->p1.freq, p->p2.freq);
        return std::get<detail::DirichletData>(data_).f.freq;
    }

    static ModeProfile step(const media::StepMedium& med, int k);
    static ModeProfile periodic(const media::PeriodicStepMedium& med, int k);
    static ModeProfile dirichlet(const media::DirichletMedium& med, int k);

private:
    std::variant<detail::StepData, detail::PeriodicData, detail::DirichletData> data_;

    static double powi(double base, long n) {
        double out = 1.0;
        for (long i = 0; i < n; ++i) out *= base;
        return out;
    }
};

namespace detail {

inline void require_lattice(int k, std::int64_t base, const char* what) {
    if (k < 1 || k % 2 == 0)
        throw BadIndex(std::string(what) + ": k must be a positive odd integer");
    if (k % base != 0 || ((k / base) % 2) == 0)
        throw BadIndex(std::string(what) + ": k = " + std::to_string(k) +
                       " is not in " + std::to_string(base) + " * Z_odd");
}

} // namespace detail

inline ModeProfile ModeProfile::step(const media::StepMedium& med, int k) {
    detail::require_lattice(k, med.base_index(), "step_mode");
    const double freq_in = k * med.omega * std::sqrt(med.b);
    const double amp_ratio = std::sqrt(med.b / med.a);  // sine coefficient
    detail::StepData d;
    d.inner = detail::TrigForm{freq_in, 1.0, amp_ratio, 0.0};
    d.c = med.c;
    d.out_amp = d.inner.value(med.c);  // = +-amp_ratio up to roundoff
    d.out_rate = k * med.omega * std::sqrt(med.a);

    ModeProfile p;
    p.k = k;
    p.slope0 = med.b * k * med.omega / std::sqrt(med.a);
    p.decay_rate = 0.5 * med.omega * std::sqrt(med.a);
    p.sup_bound = amp_ratio + 1.0;  // A + B
    // The e^{-rho x} envelope with the bound rate rho = omega sqrt(a)/2 needs
    // the inner-region growth of e^{rho x} absorbed into the prefactor.
    p.envelope_prefactor = std::sqrt(amp_ratio * amp_ratio + 1.0) *
                           std::exp(0.5 * med.omega * std::sqrt(med.a) * med.c);
    p.data_ = d;
    return p;
}

inline ModeProfile ModeProfile::periodic(const media::PeriodicStepMedium& med, int k) {
    detail::require_lattice(k, med.base_index(), "periodic_mode");
    const double freq_a = k * med.omega * std::sqrt(med.a);
    const double freq_b = k * med.omega * std::sqrt(med.b);
    const double split = 2.0 * med.theta * std::numbers::pi;
    const double shift = med.theta * std::numbers::pi;

    const double ml = med.m() * med.l();
    const double sb = std::sin(k * ml * std::numbers::pi);
    const double sa = std::sin(k * med.m() * std::numbers::pi);

    detail::PeriodicData d;
    d.split = split;
    d.shift = shift;

    double slope0 = 0.0;
    // The decaying Bloch mode is the eigenvector of the (diagonal) monodromy
    // whose multiplier has modulus < 1: cosine-type for a < b, sine-type
    // for a > b.
    if (med.a < med.b) {
        d.p1 = detail::TrigForm{freq_a, 1.0, 0.0, 0.0};
        d.mult = -std::sqrt(med.a / med.b) * sb * sa;
        slope0 = -freq_a * std::tan(freq_a * shift);
    } else {
        d.p1 = detail::TrigForm{freq_a, 0.0, 1.0 / freq_a, 0.0};
        d.mult = -std::sqrt(med.b / med.a) * sb * sa;
        slope0 = freq_a / std::tan(freq_a * shift);
    }
    // Continue the cell solution across the interior interface.
    const double v_split = d.p1.value(split);
    const double s_split = d.p1.deriv(split);
    d.p2 = detail::TrigForm{freq_b, v_split, s_split / freq_b, split};
    // Normalize to 1 at the evaluation origin x = 0 (cell coordinate shift).
    const double norm = d.p1.value(shift);
    d.p1.c_cos /= norm; d.p1.c_sin /= norm;
    d.p2.c_cos /= norm; d.p2.c_sin /= norm;

    ModeProfile p;
    p.k = k;
    p.slope0 = slope0;
    p.floquet_mult = d.mult;
    p.decay_rate = std::fabs(std::log(med.b) - std::log(med.a)) / (4.0 * std::numbers::pi);
    p.sup_bound = std::numbers::sqrt2 * (1.0 + std::sqrt(med.a / med.b));
    // Within one period e^{rho x} grows by (max/min)^{1/2}.
    p.envelope_prefactor = p.sup_bound *
        std::sqrt(std::sqrt(std::max(med.a / med.b, med.b / med.a)));
    p.data_ = d;
    return p;
}

inline ModeProfile ModeProfile::dirichlet(const media::DirichletMedium& med, int k) {
    if (k < 1 || k % 2 == 0) throw BadIndex("dirichlet_mode: k must be a positive odd integer");
    const double freq = med.omega * k;
    const double s = std::sin(freq * med.l);
    // sin(omega k (l-x))/sin(omega k l) = cos(omega k x) - cot(omega k l) sin(omega k x)
    detail::DirichletData d;
    d.f = detail::TrigForm{freq, 1.0, -std::cos(freq * med.l) / s, 0.0};
    d.l = med.l;

    ModeProfile p;
    p.k = k;
    p.slope0 = -freq * std::cos(freq * med.l) / s;
    p.sup_bound = 1.0 / std::fabs(s);
    p.envelope_prefactor = p.sup_bound;
    p.data_ = d;
    return p;
}

/// Dispatch over the medium variant.
inline ModeProfile mode_for(const media::Medium& medium, int k) {
    if (const auto* s = std::get_if<media::StepMedium>(&medium)) return ModeProfile::step(*s, k);
    if (const auto* p = std::get_if<media::PeriodicStepMedium>(&medium))
        return ModeProfile::periodic(*p, k);
    return ModeProfile::dirichlet(std::get<media::DirichletMedium>(medium), k);
}

/// Profiles for all lattice harmonics r, 3r, ..., <= N.
class ProfileTable {
public:
    ProfileTable() = default;

    static ProfileTable build(const media::Medium& medium, int N, std::int64_t r) {
        ProfileTable t;
        for (std::int64_t k = r; k <= N; k += 2 * r)
            t.table_.emplace(static_cast<int>(k), mode_for(medium, static_cast<int>(k)));
        return t;
    }

    const ModeProfile& at(int k) const {
        const auto it = table_.find(k);
        if (it == table_.end())
            throw MissingProfile("no mode profile for k = " + std::to_string(k));
        return it->second;
    }

    bool contains(int k) const { return table_.count(k) != 0; }
    const std::map<int, ModeProfile>& all() const { return table_; }

private:
    std::map<int, ModeProfile> table_;
};

// ---------------------------------------------------------------------------
// Certificates
// ---------------------------------------------------------------------------

struct DecayCertificate {
    double M = 1.0;         // documented sup-norm constant
    double rho = 0.0;       // uniform decay rate
    double envelope_M = 1.0;  // prefactor valid in |Phi_k(x)| <= M_env e^{-rho x}
};

/// Verifies the uniform exponential envelope for a family of profiles by
/// sampling |Phi_k(x)| e^{rho x} on a grid. Throws DecayViolation with the
/// offending (k, x) on failure. Not applicable to bounded media.
inline DecayCertificate verify_C2(const media::Medium& medium,
                                  const std::vector<ModeProfile>& profiles,
                                  int samples_per_unit = 64) {
    if (media::is_bounded(medium))
        throw ConfigError("verify_C2: bounded media carry no decay certificate");

    DecayCertificate cert;
    if (const auto* s = std::get_if<media::StepMedium>(&medium)) {
        cert.M = std::sqrt(s->b / s->a) + 1.0;
        cert.rho = 0.5 * s->omega * std::sqrt(s->a);
    } else {
        const auto& p = std::get<media::PeriodicStepMedium>(medium);
        cert.M = std::numbers::sqrt2 * (1.0 + std::sqrt(p.a / p.b));
        cert.rho = std::fabs(std::log(p.b) - std::log(p.a)) / (4.0 * std::numbers::pi);
    }
    cert.envelope_M = cert.M;
    for (const auto& prof : profiles)
        cert.envelope_M = std::max(cert.envelope_M, prof.envelope_prefactor);

    const double xmax = 20.0 / cert.rho;
    const int n = static_cast<int>(xmax * samples_per_unit);
    for (const auto& prof : profiles) {
        for (int i = 0; i <= n; ++i) {
            // Irrational stride keeps samples off interface points.
            const double x = xmax * (static_cast<double>(i) + 0.382) / (n + 1);
            const double v = std::fabs(prof.value(x));
            if (v > cert.M * (1.0 + 1e-8))
                throw DecayViolation("sup bound violated at k = " + std::to_string(prof.k) +
                                     ", x = " + std::to_string(x));
            if (v * std::exp(cert.rho * x) > cert.envelope_M * (1.0 + 1e-8))
                throw DecayViolation("envelope violated at k = " + std::to_string(prof.k) +
                                     ", x = " + std::to_string(x));
        }
    }
    return cert;
}

/// Pointwise residual of L_k Phi = 0 via a five-point second-difference.
/// x and the stencil must stay inside one smooth panel of the profile.
inline double ode_residual_at(const ModeProfile& prof, const media::Medium& medium,
                              double x, double h) {
    const double f0 = prof.value(x - 2.0 * h), f1 = prof.value(x - h), f2 = prof.value(x),
                 f3 = prof.value(x + h), f4 = prof.value(x + 2.0 * h);
    const double second = (-f0 + 16.0 * f1 - 30.0 * f2 + 16.0 * f3 - f4) / (12.0 * h * h);
    const double k2w2 = static_cast<double>(prof.k) * prof.k * media::omega_of(medium) *
                        media::omega_of(medium);
    return -second - k2w2 * media::g_at(medium, x) * prof.value(x);
}

} // namespace breather::floquet
