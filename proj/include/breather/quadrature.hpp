#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace breather::quad {

// Composite Gauss-Legendre quadrature on interface-aligned panels, sized so
// that oscillatory integrands stay resolved, plus a periodic trapezoid rule
// for time integrals (spectrally exact on trigonometric polynomials).

inline constexpr std::array<double, 4> kGL8Nodes = {
    0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363};
inline constexpr std::array<double, 4> kGL8Weights = {
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

struct Panel {
    double lo = 0.0;
    double hi = 1.0;
};

/// Splits [lo, hi] at the given interior breakpoints and then caps panel
/// length at max_len. Breakpoints outside (lo, hi) are ignored.
inline std::vector<Panel> build_panels(double lo, double hi, std::vector<double> breakpoints,
                                       double max_len) {
    if (!(max_len > 0.0)) max_len = hi - lo;
    std::sort(breakpoints.begin(), breakpoints.end());
    std::vector<double> edges{lo};
    for (double b : breakpoints)
        if (b > lo + 1e-14 && b < hi - 1e-14) edges.push_back(b);
    edges.push_back(hi);

    std::vector<Panel> panels;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double a = edges[i], b = edges[i + 1];
        const int parts = std::max(1, static_cast<int>(std::ceil((b - a) / max_len)));
        for (int p = 0; p < parts; ++p) {
            panels.push_back(Panel{a + (b - a) * p / parts, a + (b - a) * (p + 1) / parts});
        }
    }
    return panels;
}

template <class F>
double gl8(const F& f, double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double s = 0.0;
    for (int i = 0; i < 4; ++i)
        s += kGL8Weights[i] * (f(mid - half * kGL8Nodes[i]) + f(mid + half * kGL8Nodes[i]));
    return s * half;
}

template <class F>
double integrate(const F& f, const std::vector<Panel>& panels) {
    double s = 0.0;
    for (const Panel& p : panels) s += gl8(f, p.lo, p.hi);
    return s;
}

/// Uniform trapezoid rule over one period [0, T) with n points; exact for
/// trigonometric polynomials of degree < n.
template <class F>
double trapezoid_period(const F& f, double T, int n) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += f(T * j / n);
    return s * T / n;
}

} // namespace breather::quad
