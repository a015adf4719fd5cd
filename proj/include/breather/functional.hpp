#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "breather/floquet.hpp"
#include "breather/media.hpp"
#include "breather/seqspace.hpp"

namespace breather::functional {

// ---------------------------------------------------------------------------
// The quartic objective
//
//   J(z) = 1/4 (z*z*z*z)_0 + sum_k a_k z_k^2,   a_k = T Phi_k'(0)/(gamma w^4 k^2)
//
// over antisymmetric odd sequences truncated at N, optionally restricted to
// the lattice r * Z_odd. Critical points solve (z*z*z)_k = eta_k z_k with
// eta_k = 2 a_k.
// ---------------------------------------------------------------------------

struct FunctionalSpec {
    double omega = 1.0;
    double T = 2.0 * std::numbers::pi;
    double gamma = -1.0;
    int N = 1;            // odd truncation bound
    std::int64_t r = 1;   // support lattice stride (odd multiple of the medium base)

    std::vector<int> support;       // lattice indices r, 3r, ..., <= N
    std::vector<double> slope0;     // Phi_k'(0) per support entry
    std::vector<double> coeff_a;    // a_k per support entry
    std::vector<double> coeff_eta;  // eta_k = 2 a_k per support entry

    bool on_lattice(int k) const {
        return k >= 1 && k % 2 != 0 && k % r == 0 && ((k / r) % 2) != 0;
    }

    /// eta_k for a lattice index; coefficients off the lattice are never
    /// materialized.
    double eta(int k) const {
        for (std::size_t i = 0; i < support.size(); ++i)
            if (support[i] == k) return coeff_eta[i];
        throw SupportViolation("eta_k not materialized for k = " + std::to_string(k));
    }
};

/// Builds the coefficient tables from the medium's mode slopes and checks the
/// existence sign condition: gamma < 0 needs a positive slope somewhere on the
/// lattice, gamma > 0 a negative one.
inline FunctionalSpec eta_table(const media::Medium& medium, double gamma, int N,
                                std::int64_t r) {
    if (gamma == 0.0) throw ConfigError("gamma must be nonzero");
    if (N < 1 || N % 2 == 0) throw ConfigError("N must be odd and >= 1");
    media::SymmetryIndex::for_medium(medium, r);  // validates r

    FunctionalSpec spec;
    spec.omega = media::omega_of(medium);
    spec.T = 2.0 * std::numbers::pi / spec.omega;
    spec.gamma = gamma;
    spec.N = N;
    spec.r = r;

    const double w4 = std::pow(spec.omega, 4);
    bool sign_ok = false;
    for (std::int64_t k = r; k <= N; k += 2 * r) {
        const auto profile = floquet::mode_for(medium, static_cast<int>(k));
        const double a_k = spec.T * profile.slope0 / (gamma * w4 * static_cast<double>(k * k));
        spec.support.push_back(static_cast<int>(k));
        spec.slope0.push_back(profile.slope0);
        spec.coeff_a.push_back(a_k);
        spec.coeff_eta.push_back(2.0 * a_k);
        if ((gamma < 0.0 && profile.slope0 > 0.0) || (gamma > 0.0 && profile.slope0 < 0.0))
            sign_ok = true;
    }
    if (!sign_ok)
        throw SignConditionFailed(
            "no slope of the required sign on the lattice: gamma = " + std::to_string(gamma));
    return spec;
}

namespace detail {

inline void require_supported(const FunctionalSpec& spec, const seq::OddSequence& z) {
    for (int k = 1; k <= z.max_index(); k += 2) {
        if (z.at(k) != 0.0 && (k > spec.N || !spec.on_lattice(k)))
            throw SupportViolation("sequence entry at k = " + std::to_string(k) +
                                   " escapes the spec support");
    }
}

} // namespace detail

/// J(z). Coercive from below: J >= 1/4 |||z|||^4 - sup|a_k| |||z|||^2.
inline double eval_J(const FunctionalSpec& spec, const seq::OddSequence& z) {
    detail::require_supported(spec, z);
    double quad = 0.0;
    for (std::size_t i = 0; i < spec.support.size(); ++i) {
        const double v = z.at(spec.support[i]);
        quad += spec.coeff_a[i] * v * v;
    }
    return 0.25 * seq::quad_norm4(z) + 2.0 * quad;
}

/// Gradient against the signed-pair test directions: for every test sequence
/// y, the derivative of J at z along y equals sum_{k>0} 2 g_k y_k. Vanishes
/// exactly when the Euler-Lagrange equation (z*z*z)_k = eta_k z_k holds.
inline seq::OddSequence grad_J(const FunctionalSpec& spec, const seq::OddSequence& z) {
    detail::require_supported(spec, z);
    const seq::OddSequence cube = seq::convolve3(z, z, z);
    seq::OddSequence g = seq::OddSequence::zeros(spec.N);
    for (std::size_t i = 0; i < spec.support.size(); ++i) {
        const int k = spec.support[i];
        g.set(k, spec.coeff_eta[i] * z.at(k) - cube.at(k));
    }
    return g;
}

struct ELResidual {
    std::vector<int> k_on;          // lattice indices <= N
    std::vector<double> res_on;     // (z*z*z)_k - eta_k z_k
    std::vector<int> k_off;         // off-lattice odd indices <= N (when r > 1)
    std::vector<double> res_off;    // (z*z*z)_k, no eta term materialized
    double sup = 0.0;               // over lattice residuals
    double l2 = 0.0;
    double sup_off = 0.0;
};

/// Per-index Euler-Lagrange residuals. On the lattice these vanish at a
/// critical point; off the lattice the cube term vanishes identically because
/// three lattice indices can only sum to a lattice index.
inline ELResidual el_residual(const FunctionalSpec& spec, const seq::OddSequence& z) {
    detail::require_supported(spec, z);
    const seq::OddSequence cube = seq::convolve3(z, z, z);
    ELResidual out;
    double sq = 0.0;
    for (std::size_t i = 0; i < spec.support.size(); ++i) {
        const int k = spec.support[i];
        const double res = cube.at(k) - spec.coeff_eta[i] * z.at(k);
        out.k_on.push_back(k);
        out.res_on.push_back(res);
        out.sup = std::max(out.sup, std::fabs(res));
        sq += res * res;
    }
    out.l2 = std::sqrt(2.0 * sq);
    if (spec.r > 1) {
        for (int k = 1; k <= spec.N; k += 2) {
            if (spec.on_lattice(k)) continue;
            out.k_off.push_back(k);
            out.res_off.push_back(cube.at(k));
            out.sup_off = std::max(out.sup_off, std::fabs(cube.at(k)));
        }
    }
    return out;
}

/// l2 norm (full signed support) of the gradient sequence.
inline double grad_norm(const FunctionalSpec& spec, const seq::OddSequence& z) {
    return seq::l2_norm(grad_J(spec, z));
}

} // namespace breather::functional
