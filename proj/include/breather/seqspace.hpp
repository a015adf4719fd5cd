#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "breather/errors.hpp"

namespace breather::seq {

// ---------------------------------------------------------------------------
// Finitely supported antisymmetric sequences over the odd integers.
//
// Only positive-index entries are stored; z_{-k} = -z_k is structural and can
// never be violated. Entries beyond the truncation bound are zero.
// ---------------------------------------------------------------------------

class OddSequence {
public:
    OddSequence() : max_index_(1), pos_(1, 0.0) {}

    /// Zero sequence truncated at odd bound n.
    static OddSequence zeros(int n) {
        if (n < 1 || n % 2 == 0) throw Error("OddSequence: truncation must be odd and >= 1");
        OddSequence z;
        z.max_index_ = n;
        z.pos_.assign(static_cast<std::size_t>((n + 1) / 2), 0.0);
        return z;
    }

    /// Signed unit pair: +t at k0, -t at -k0.
    static OddSequence pair(int k0, double t, int n) {
        OddSequence z = zeros(n);
        z.set(k0, t);
        return z;
    }

    int max_index() const { return max_index_; }
    std::size_t half_size() const { return pos_.size(); }

    /// Entry at any integer index; antisymmetry and truncation applied.
    double at(int k) const {
        const int a = k < 0 ? -k : k;
        if (a % 2 == 0 || a > max_index_) return 0.0;
        const double v = pos_[static_cast<std::size_t>((a - 1) / 2)];
        return k < 0 ? -v : v;
    }

    void set(int k, double v) {
        if (k < 1 || k % 2 == 0 || k > max_index_)
            throw Error("OddSequence::set: index must be positive odd within bound");
        pos_[static_cast<std::size_t>((k - 1) / 2)] = v;
    }

    std::span<const double> positive_entries() const { return pos_; }
    std::span<double> positive_entries() { return pos_; }

    /// Positive odd index of the i-th stored entry.
    static int index_of(std::size_t i) { return static_cast<int>(2 * i + 1); }

    bool operator==(const OddSequence& o) const {
        return max_index_ == o.max_index_ && pos_ == o.pos_;
    }

private:
    int max_index_;
    std::vector<double> pos_;
};

/// Convolution of two odd antisymmetric sequences: supported on even indices
/// and symmetric, (z*y)_{-m} = (z*y)_m. Stores m = 0, 2, ..., max_index.
class EvenSequence {
public:
    EvenSequence() : max_index_(0), coef_(1, 0.0) {}

    static EvenSequence zeros(int n_even) {
        EvenSequence e;
        e.max_index_ = n_even;
        e.coef_.assign(static_cast<std::size_t>(n_even / 2 + 1), 0.0);
        return e;
    }

    int max_index() const { return max_index_; }

    double at(int m) const {
        const int a = m < 0 ? -m : m;
        if (a % 2 != 0 || a > max_index_) return 0.0;
        return coef_[static_cast<std::size_t>(a / 2)];
    }

    void set(int m, double v) { coef_[static_cast<std::size_t>(m / 2)] = v; }

    /// l2 over the full (signed) support.
    double l2_norm() const {
        double s = coef_[0] * coef_[0];
        for (std::size_t i = 1; i < coef_.size(); ++i) s += 2.0 * coef_[i] * coef_[i];
        return std::sqrt(s);
    }

private:
    int max_index_;
    std::vector<double> coef_;
};

/// (z*y)_m = sum_l z_l y_{m-l}, exact finite sum over the support overlap.
inline EvenSequence convolve(const OddSequence& z, const OddSequence& y) {
    const int n = z.max_index() + y.max_index();
    EvenSequence out = EvenSequence::zeros(n);
    for (int m = 0; m <= n; m += 2) {
        double s = 0.0;
        // Pair l with -l: z_{-l} y_{m+l} = -z_l y_{m+l}.
        for (int l = 1; l <= z.max_index(); l += 2)
            s += z.at(l) * (y.at(m - l) - y.at(m + l));
        out.set(m, s);
    }
    return out;
}

/// Triple convolution (x*y*w): odd support, antisymmetric again.
inline OddSequence convolve3(const OddSequence& x, const OddSequence& y,
                             const OddSequence& w) {
    const EvenSequence xy = convolve(x, y);
    const int n = xy.max_index() + w.max_index();
    OddSequence out = OddSequence::zeros(n);
    for (int j = 1; j <= n; j += 2) {
        double s = xy.at(0) * w.at(j);
        for (int m = 2; m <= xy.max_index(); m += 2)
            s += xy.at(m) * (w.at(j - m) + w.at(j + m));
        out.set(j, s);
    }
    return out;
}

/// Zero-lag quadruple pairing (u*v*w*z)_0 via the triple-convolution route.
inline double quad_pairing(const OddSequence& u, const OddSequence& v,
                           const OddSequence& w, const OddSequence& z) {
    const OddSequence uvw = convolve3(u, v, w);
    double s = 0.0;
    for (int j = 1; j <= std::min(uvw.max_index(), z.max_index()); j += 2)
        s += uvw.at(j) * z.at(j);
    return -2.0 * s;  // (t * z)_0 = sum_j t_j z_{-j} over both signs
}

/// Fourth power of the quartic norm, computed as ||z*z||_l2^2. Agrees with
/// quad_pairing(z,z,z,z) to roundoff; the two routes are kept independent.
inline double quad_norm4(const OddSequence& z) {
    return [](const EvenSequence& c) {
        double s = c.at(0) * c.at(0);
        for (int m = 2; m <= c.max_index(); m += 2) s += 2.0 * c.at(m) * c.at(m);
        return s;
    }(convolve(z, z));
}

/// Quartic norm itself.
inline double quad_norm(const OddSequence& z) {
    return std::sqrt(std::sqrt(quad_norm4(z)));
}

/// l2 norm over the full signed support (sqrt(2) times the half-vector norm).
inline double l2_norm(const OddSequence& z) {
    double s = 0.0;
    for (double v : z.positive_entries()) s += v * v;
    return std::sqrt(2.0 * s);
}

/// Weighted norm ||z||_{h^nu}^2 = sum_k (1+k^2)^nu z_k^2 over full support.
inline double h_norm(const OddSequence& z, double nu) {
    if (nu == 0.0) return l2_norm(z);
    double s = 0.0;
    const auto vals = z.positive_entries();
    for (std::size_t i = 0; i < vals.size(); ++i) {
        const double k = static_cast<double>(OddSequence::index_of(i));
        s += std::pow(1.0 + k * k, nu) * vals[i] * vals[i];
    }
    return std::sqrt(2.0 * s);
}

/// Real time signal (2/sqrt(T)) sum_{k>0} z_k sin(omega k t) with T = 2 pi/omega.
/// One period of it carries the L2/L4 bridges to the sequence-side norms.
inline std::vector<double> time_signal(const OddSequence& z, std::span<const double> t_grid,
                                       double omega) {
    const double T = 2.0 * std::numbers::pi / omega;
    const double scale = 2.0 / std::sqrt(T);
    std::vector<double> out(t_grid.size(), 0.0);
    const auto vals = z.positive_entries();
    for (std::size_t j = 0; j < t_grid.size(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < vals.size(); ++i) {
            if (vals[i] == 0.0) continue;
            s += vals[i] * std::sin(omega * OddSequence::index_of(i) * t_grid[j]);
        }
        out[j] = scale * s;
    }
    return out;
}

} // namespace breather::seq
