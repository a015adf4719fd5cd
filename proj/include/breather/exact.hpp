#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>

#include "breather/rational.hpp"

namespace breather {

/// Exact constructible value (p/q) * sqrt(root) * pi^pi_pow.
///
/// This is the alternative input form for medium parameters: it removes all
/// floating ambiguity from the admissibility checks, which then run in
/// integer arithmetic. root is kept squarefree, the rational part reduced.
struct ExactReal {
    Rational rat{0, 1};
    std::int64_t root = 1;  // squarefree radicand
    int pi_pow = 0;

    static ExactReal from_rational(Rational r) { return ExactReal{r, 1, 0}; }

    double value() const {
        double v = rat.value();
        if (root != 1) v *= std::sqrt(static_cast<double>(root));
        for (int i = 0; i < pi_pow; ++i) v *= std::numbers::pi;
        for (int i = 0; i > pi_pow; --i) v /= std::numbers::pi;
        return v;
    }

    bool is_rational() const { return root == 1 && pi_pow == 0; }
    bool positive() const { return rat.num > 0; }
};

namespace detail {

/// Splits n = square * free with free squarefree, by trial division.
inline void extract_square(std::int64_t n, std::int64_t& sq, std::int64_t& free_part) {
    sq = 1;
    free_part = 1;
    for (std::int64_t d = 2; d * d <= n; ++d) {
        while (n % (d * d) == 0) { n /= d * d; sq *= d; }
        if (n % d == 0) { n /= d; free_part *= d; }
    }
    free_part *= n;
}

} // namespace detail

inline ExactReal operator*(const ExactReal& x, const ExactReal& y) {
    ExactReal out;
    out.rat = x.rat * y.rat;
    out.pi_pow = x.pi_pow + y.pi_pow;
    // sqrt(s1) * sqrt(s2) = g * sqrt(u v) with s1 = g u, s2 = g v coprime.
    const std::int64_t g = std::gcd(x.root, y.root);
    out.root = (x.root / g) * (y.root / g);
    out.rat = out.rat * Rational{g, 1};
    return out;
}

inline ExactReal operator/(const ExactReal& x, const ExactReal& y) {
    if (y.rat.num == 0) throw Error("ExactReal: division by zero");
    ExactReal inv;
    // 1 / (p/q sqrt(s) pi^e) = q/(p s) sqrt(s) pi^-e
    inv.rat = Rational::reduced(y.rat.den, y.rat.num * y.root);
    inv.root = y.root;
    inv.pi_pow = -y.pi_pow;
    return x * inv;
}

/// Exact square root, available when the operand is a positive rational.
inline std::optional<ExactReal> exact_sqrt(const ExactReal& x) {
    if (!x.is_rational() || x.rat.num <= 0) return std::nullopt;
    // sqrt(p/q) = sqrt(p q) / q
    const std::int64_t pq = x.rat.num * x.rat.den;
    if (pq > 4000000000000LL) return std::nullopt;  // keep trial division cheap
    std::int64_t sq = 1, fr = 1;
    detail::extract_square(pq, sq, fr);
    ExactReal out;
    out.rat = Rational::reduced(sq, x.rat.den);
    out.root = fr;
    out.pi_pow = 0;
    return out;
}

/// Parses "[-]P[/Q][sqrt(S)][pi]" with optional whitespace, e.g. "1/2 pi",
/// "3", "sqrt(2)", "3/4 sqrt(2) pi". Returns nullopt when the text does not
/// match the grammar (callers then fall back to floating-point parsing).
inline std::optional<ExactReal> parse_exact(const std::string& text) {
    std::size_t i = 0;
    const auto skip_ws = [&] { while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i; };
    const auto read_int = [&](std::int64_t& out) -> bool {
        skip_ws();
        std::size_t start = i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        if (i == start) return false;
        out = std::stoll(text.substr(start, i - start));
        return true;
    };

    ExactReal out;
    out.rat = Rational{1, 1};
    bool have_any = false;

    skip_ws();
    bool negative = false;
    if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
        negative = (text[i] == '-');
        ++i;
    }

    std::int64_t p = 1;
    skip_ws();
    if (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        if (!read_int(p)) return std::nullopt;
        have_any = true;
        std::int64_t q = 1;
        skip_ws();
        if (i < text.size() && text[i] == '/') {
            ++i;
            if (!read_int(q) || q == 0) return std::nullopt;
        }
        out.rat = Rational::reduced(p, q);
    }

    skip_ws();
    if (text.compare(i, 5, "sqrt(") == 0) {
        i += 5;
        std::int64_t s = 0;
        if (!read_int(s) || s <= 0) return std::nullopt;
        skip_ws();
        if (i >= text.size() || text[i] != ')') return std::nullopt;
        ++i;
        std::int64_t sq = 1, fr = 1;
        detail::extract_square(s, sq, fr);
        out.rat = out.rat * Rational{sq, 1};
        out.root = fr;
        have_any = true;
    }

    skip_ws();
    if (text.compare(i, 2, "pi") == 0) {
        i += 2;
        out.pi_pow = 1;
        have_any = true;
    }

    skip_ws();
    if (i != text.size() || !have_any) return std::nullopt;
    if (negative) out.rat.num = -out.rat.num;
    return out;
}

} // namespace breather
