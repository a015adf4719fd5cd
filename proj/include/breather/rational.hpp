#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>

#include "breather/errors.hpp"

namespace breather {

/// Reduced fraction num/den with den > 0; the sign lives in num.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static Rational reduced(std::int64_t p, std::int64_t q) {
        if (q == 0) throw Error("Rational: zero denominator");
        if (q < 0) { p = -p; q = -q; }
        const std::int64_t g = std::gcd(p < 0 ? -p : p, q);
        if (g > 1) { p /= g; q /= g; }
        return Rational{p, q};
    }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    bool positive() const { return num > 0; }

    /// Numerator and denominator both odd (the membership test for
    /// (2N+1)/(2N+1) once the value is known positive).
    bool odd_over_odd() const {
        return num > 0 && (num % 2 != 0) && (den % 2 != 0);
    }

    Rational operator*(const Rational& o) const {
        return reduced(num * o.num, den * o.den);
    }
    Rational operator/(const Rational& o) const {
        if (o.num == 0) throw Error("Rational: division by zero");
        return reduced(num * o.den, den * o.num);
    }
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }

    std::string str() const {
        return std::to_string(num) + "/" + std::to_string(den);
    }
};

struct RationalDetect {
    double tolerance = 1e-10;         // relative acceptance threshold
    double termination = 1e-14;       // relative machine-exhaustion threshold
    std::int64_t max_den = 1000000;   // reject reconstructions beyond this
};

/// Continued-fraction reconstruction of x as a reduced fraction.
///
/// Accepts a convergent p/q with q <= max_den only when the expansion
/// terminates there, i.e. |x - p/q| reaches the machine-exhaustion floor.
/// Inputs here are user-chosen constructible numbers, so a terminating
/// expansion is the expected case; near-misses such as the convergents of
/// an irrational stay well above the floor for q <= max_den and are
/// rejected rather than loosely matched.
inline std::optional<Rational> detect_rational(double x, RationalDetect opts = {}) {
    if (!std::isfinite(x)) return std::nullopt;
    const double tol =
        std::min(opts.tolerance, opts.termination) * std::max(1.0, std::fabs(x));

    // Convergent recurrence h_n = a_n h_{n-1} + h_{n-2}, seeded with
    // (h_{-2}, h_{-1}) = (0, 1) and (k_{-2}, k_{-1}) = (1, 0).
    std::int64_t h_prev = 0, h_curr = 1;   // numerators
    std::int64_t k_prev = 1, k_curr = 0;   // denominators
    double frac = x;
    for (int iter = 0; iter < 64; ++iter) {
        const double fl = std::floor(frac);
        if (fl > 9.0e15 || fl < -9.0e15) return std::nullopt;
        const auto a = static_cast<std::int64_t>(fl);
        const __int128 h_wide = static_cast<__int128>(a) * h_curr + h_prev;
        const __int128 k_wide = static_cast<__int128>(a) * k_curr + k_prev;
        if (h_wide > 9000000000000000000LL || h_wide < -9000000000000000000LL)
            return std::nullopt;
        const auto h_next = static_cast<std::int64_t>(h_wide);
        const auto k_next = static_cast<std::int64_t>(k_wide);
        if (k_next > opts.max_den) return std::nullopt;
        h_prev = h_curr; h_curr = h_next;
        k_prev = k_curr; k_curr = k_next;
        const double approx = static_cast<double>(h_curr) / static_cast<double>(k_curr);
        if (std::fabs(x - approx) <= tol) return Rational::reduced(h_curr, k_curr);
        const double rem = frac - fl;
        if (rem <= 0.0) break;
        frac = 1.0 / rem;
        if (!std::isfinite(frac)) break;
    }
    return std::nullopt;
}

/// Positive fraction p/q with p, q odd, stored in lowest terms.
struct OddRational {
    std::int64_t p = 1;
    std::int64_t q = 1;

    /// Validates oddness of a reduced positive fraction.
    static OddRational from(const Rational& r, const std::string& what) {
        if (!r.odd_over_odd()) {
            throw NotAdmissible(what + " = " + r.str() +
                                " is not an odd/odd rational");
        }
        return OddRational{r.num, r.den};
    }

    double value() const { return static_cast<double>(p) / static_cast<double>(q); }
    std::string str() const { return std::to_string(p) + "/" + std::to_string(q); }
};

} // namespace breather
