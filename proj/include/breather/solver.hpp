#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "breather/functional.hpp"

namespace breather::solver {

struct SolveConfig {
    int N = 41;                    // odd truncation (per-lattice factor for scans)
    std::int64_t r = 0;            // symmetry stride; 0 = medium base index
    int k0 = 0;                    // seed harmonic; 0 = smallest with the right sign
    double grad_tol = 1e-10;
    long max_iters = 100000;
    std::vector<int> N_schedule;   // strictly increasing odd list (continuation)
    std::uint64_t rng_seed = 1;
    int max_restarts = 3;          // saddle-escape attempts after convergence
};

struct IterationRecord {
    int stage_N = 0;
    char phase = 'g';   // 'g' line-search descent, 'n' Newton refinement
    long iter = 0;
    double J = 0.0;
    double grad_norm = 0.0;
};

struct SeedPoint {
    double t_star = 0.0;
    double J_seed = 0.0;
    seq::OddSequence alpha0;
};

struct BreatherResult {
    seq::OddSequence alpha;
    double J_value = 0.0;
    double grad_norm = 0.0;
    double el_sup = 0.0;
    double el_l2 = 0.0;
    double el_sup_off = 0.0;
    std::int64_t r = 1;
    int N = 1;
    int k0 = 1;
    long iterations = 0;
    bool converged = false;
    int restarts = 0;
    double seed_t = 0.0;
    double seed_J = 0.0;
    std::vector<IterationRecord> history;
};

/// Smallest lattice harmonic whose slope sign makes the quadratic coefficient
/// negative (slope0/gamma < 0).
inline int pick_seed_harmonic(const functional::FunctionalSpec& spec) {
    for (std::size_t i = 0; i < spec.support.size(); ++i)
        if (spec.slope0[i] / spec.gamma < 0.0) return spec.support[i];
    throw SignConditionFailed("no admissible seed harmonic on the lattice");
}

/// Analytic warm start: minimize J restricted to the ray t * (pair at k0),
/// J(t y) = (3/2) t^4 + eta_{k0} t^2, which dips negative exactly when
/// eta_{k0} < 0.
inline SeedPoint seed_point(const functional::FunctionalSpec& spec, int k0) {
    if (!spec.on_lattice(k0) || k0 > spec.N)
        throw SupportViolation("seed harmonic k0 = " + std::to_string(k0) +
                               " outside the supported lattice");
    const double c2 = spec.eta(k0);
    if (c2 >= 0.0)
        throw WrongSign("slope0/gamma >= 0 at k0 = " + std::to_string(k0) +
                        "; the single-harmonic energy has no negative dip");
    const double c1 = 1.5;  // quartic norm^4 of the signed unit pair is 6
    SeedPoint s;
    s.t_star = std::sqrt(-c2 / (2.0 * c1));
    s.J_seed = -c2 * c2 / (4.0 * c1);
    s.alpha0 = seq::OddSequence::pair(k0, s.t_star, spec.N);
    return s;
}

namespace detail {

struct Workspace {
    const functional::FunctionalSpec* spec;

    seq::OddSequence to_seq(const std::vector<double>& x) const {
        seq::OddSequence z = seq::OddSequence::zeros(spec->N);
        for (std::size_t i = 0; i < x.size(); ++i) z.set(spec->support[i], x[i]);
        return z;
    }

    double f(const std::vector<double>& x) const {
        return functional::eval_J(*spec, to_seq(x));
    }

    /// Coordinate gradient dJ/dx_i = 2 g_{k_i}.
    std::vector<double> grad(const std::vector<double>& x) const {
        const seq::OddSequence g = functional::grad_J(*spec, to_seq(x));
        std::vector<double> out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = 2.0 * g.at(spec->support[i]);
        return out;
    }

    /// Full-support l2 norm of the gradient sequence (the convergence metric).
    static double gnorm(const std::vector<double>& gx) {
        double s = 0.0;
        for (double v : gx) s += 0.25 * v * v;  // g_k = gx/2, doubled support
        return std::sqrt(2.0 * s);
    }

    /// Exact Hessian: H_ij = 2 eta_i d_ij - 6 [(z*z)_{ki-kj} - (z*z)_{ki+kj}].
    std::vector<double> hessian(const std::vector<double>& x) const {
        const seq::OddSequence z = to_seq(x);
        const seq::EvenSequence sq = seq::convolve(z, z);
        const std::size_t d = x.size();
        std::vector<double> H(d * d, 0.0);
        for (std::size_t i = 0; i < d; ++i) {
            const int ki = spec->support[i];
            for (std::size_t j = 0; j <= i; ++j) {
                const int kj = spec->support[j];
                double v = -6.0 * (sq.at(ki - kj) - sq.at(ki + kj));
                if (i == j) v += 2.0 * spec->coeff_eta[i];
                H[i * d + j] = v;
                H[j * d + i] = v;
            }
        }
        return H;
    }
};

/// In-place Cholesky; returns false when the matrix is not positive definite.
inline bool cholesky(std::vector<double>& A, std::size_t d) {
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = A[i * d + j];
            for (std::size_t k = 0; k < j; ++k) s -= A[i * d + k] * A[j * d + k];
            if (i == j) {
                if (s <= 0.0) return false;
                A[i * d + i] = std::sqrt(s);
            } else {
                A[i * d + j] = s / A[j * d + j];
            }
        }
    }
    return true;
}

inline std::vector<double> cholesky_solve(const std::vector<double>& L, std::size_t d,
                                          std::vector<double> b) {
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t k = 0; k < i; ++k) b[i] -= L[i * d + k] * b[k];
        b[i] /= L[i * d + i];
    }
    for (std::size_t i = d; i-- > 0;) {
        for (std::size_t k = i + 1; k < d; ++k) b[i] -= L[k * d + i] * b[k];
        b[i] /= L[i * d + i];
    }
    return b;
}

} // namespace detail

/// Minimizes J over the truncated lattice space, warm-started from the
/// analytic seed (or a caller-provided iterate). Line-search gradient descent
/// carries the iterate into the basin; a damped-Newton refinement then drives
/// the gradient to the stopping tolerance. One small random perturbation
/// probes for saddle escapes after convergence.
inline BreatherResult minimize(const functional::FunctionalSpec& spec, const SolveConfig& config,
                               std::optional<seq::OddSequence> warm_start = std::nullopt) {
    detail::Workspace ws{&spec};
    BreatherResult res;
    res.r = spec.r;
    res.N = spec.N;

    const int k0 = config.k0 > 0 ? config.k0 : pick_seed_harmonic(spec);
    const SeedPoint seed = seed_point(spec, k0);
    res.k0 = k0;
    res.seed_t = seed.t_star;
    res.seed_J = seed.J_seed;

    const std::size_t d = spec.support.size();
    std::vector<double> x(d, 0.0);
    {
        const seq::OddSequence& z0 = warm_start ? *warm_start : seed.alpha0;
        for (std::size_t i = 0; i < d; ++i) x[i] = z0.at(spec.support[i]);
    }

    std::mt19937_64 rng(config.rng_seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    double fx = ws.f(x);
    std::vector<double> gx = ws.grad(x);
    double gn = detail::Workspace::gnorm(gx);
    long iter = 0;
    const double switch_tol = std::max(1e-4, config.grad_tol);

    const auto record = [&](char phase) {
        res.history.push_back(IterationRecord{spec.N, phase, iter, fx, gn});
    };
    record('g');

    int restarts = 0;
    bool done = false;
    while (!done && iter < config.max_iters) {
        // --- line-search descent phase ---
        while (gn > switch_tol && iter < config.max_iters) {
            double t = 1.0;
            double dirderiv = 0.0;
            for (double v : gx) dirderiv -= v * v;
            bool accepted = false;
            for (int bt = 0; bt < 80; ++bt) {
                std::vector<double> xt(d);
                for (std::size_t i = 0; i < d; ++i) xt[i] = x[i] - t * gx[i];
                const double ft = ws.f(xt);
                if (ft <= fx + 1e-4 * t * dirderiv) {
                    x = std::move(xt);
                    fx = ft;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            ++iter;
            if (!accepted) break;  // machine-level stall; hand to refinement
            gx = ws.grad(x);
            gn = detail::Workspace::gnorm(gx);
            record('g');
        }

        // --- damped Newton refinement ---
        double lambda = 0.0;
        for (int nres = 0; nres < 200 && gn > config.grad_tol && iter < config.max_iters; ++nres) {
            std::vector<double> H = ws.hessian(x);
            if (lambda > 0.0)
                for (std::size_t i = 0; i < d; ++i) H[i * d + i] += lambda;
            std::vector<double> L = H;
            if (!detail::cholesky(L, d)) {
                lambda = lambda == 0.0 ? 1e-8 * (1.0 + std::fabs(fx)) : lambda * 10.0;
                if (lambda > 1e12) break;
                continue;
            }
            std::vector<double> p = detail::cholesky_solve(L, d, gx);
            bool accepted = false;
            for (int halve = 0; halve < 12; ++halve) {
                std::vector<double> xt(d);
                for (std::size_t i = 0; i < d; ++i) xt[i] = x[i] - p[i];
                const std::vector<double> gt = ws.grad(xt);
                const double gnt = detail::Workspace::gnorm(gt);
                if (gnt < gn) {
                    x = std::move(xt);
                    gx = gt;
                    gn = gnt;
                    fx = ws.f(x);
                    accepted = true;
                    break;
                }
                for (double& v : p) v *= 0.5;
            }
            ++iter;
            if (!accepted) {
                lambda = lambda == 0.0 ? 1e-8 * (1.0 + std::fabs(fx)) : lambda * 10.0;
                if (lambda > 1e12) break;
                continue;
            }
            lambda *= 0.1;
            record('n');
        }

        if (gn > config.grad_tol) break;  // out of budget or stalled

        // --- saddle probe: resume only if a small perturbation lowers J ---
        if (restarts >= config.max_restarts) { done = true; break; }
        std::vector<double> xp(d);
        double pn = 0.0;
        for (std::size_t i = 0; i < d; ++i) { xp[i] = gauss(rng); pn += xp[i] * xp[i]; }
        pn = std::sqrt(pn);
        const double scale = 1e-3 * seq::quad_norm(ws.to_seq(x)) / (pn > 0.0 ? pn : 1.0);
        for (std::size_t i = 0; i < d; ++i) xp[i] = x[i] + scale * xp[i];
        const double fp = ws.f(xp);
        if (fp < fx) {
            x = std::move(xp);
            fx = fp;
            gx = ws.grad(x);
            gn = detail::Workspace::gnorm(gx);
            ++restarts;
        } else {
            done = true;
        }
    }

    res.alpha = ws.to_seq(x);
    res.J_value = fx;
    res.grad_norm = gn;
    res.iterations = iter;
    res.converged = gn <= config.grad_tol;
    res.restarts = restarts;
    const functional::ELResidual el = functional::el_residual(spec, res.alpha);
    res.el_sup = el.sup;
    res.el_l2 = el.l2;
    res.el_sup_off = el.sup_off;
    return res;
}

/// Warm-started continuation over an increasing truncation schedule. Each
/// stage starts from the previous minimizer zero-padded, so the J values are
/// nonincreasing along the schedule.
inline std::vector<BreatherResult> continue_in_N(const media::Medium& medium, double gamma,
                                                 const SolveConfig& config) {
    if (config.N_schedule.empty()) throw ConfigError("continuation needs a nonempty N schedule");
    for (std::size_t i = 0; i + 1 < config.N_schedule.size(); ++i)
        if (config.N_schedule[i] >= config.N_schedule[i + 1])
            throw ConfigError("N schedule must be strictly increasing");

    const std::int64_t r = config.r > 0 ? config.r : media::base_index(medium);
    std::vector<BreatherResult> stages;
    std::optional<seq::OddSequence> warm;
    for (int N : config.N_schedule) {
        const functional::FunctionalSpec spec = functional::eta_table(medium, gamma, N, r);
        SolveConfig stage_cfg = config;
        stage_cfg.N = N;
        std::optional<seq::OddSequence> padded;
        if (warm) {
            padded = seq::OddSequence::zeros(N);
            for (int k = 1; k <= warm->max_index(); k += 2) {
                if (warm->at(k) != 0.0) padded->set(k, warm->at(k));
            }
        }
        BreatherResult res = minimize(spec, stage_cfg, padded);
        warm = res.alpha;
        stages.push_back(std::move(res));
    }
    return stages;
}

struct ScanStage {
    int j = 1;
    std::int64_t r = 1;
    int N = 1;
    std::optional<BreatherResult> result;
    std::string error;  // nonempty when this stage failed
};

/// One solve per nested symmetry lattice r0^j, j = 1..j_max, where r0 is the
/// medium base index (or 3 when the base is trivial). Stage truncations scale
/// with the lattice so every stage carries the same number of harmonics.
/// Sign-condition failures are recorded and the scan continues.
inline std::vector<ScanStage> multiplicity_scan(const media::Medium& medium, double gamma,
                                                int j_max, const SolveConfig& config) {
    if (j_max < 1) throw ConfigError("j_max must be >= 1");
    const std::int64_t base = media::base_index(medium);
    const std::int64_t r0 = base == 1 ? 3 : base;

    std::vector<ScanStage> out;
    std::int64_t r = 1;
    for (int j = 1; j <= j_max; ++j) {
        r *= r0;
        ScanStage stage;
        stage.j = j;
        stage.r = r;
        stage.N = static_cast<int>(r) * config.N;
        try {
            const auto spec = functional::eta_table(medium, gamma, stage.N, r);
            SolveConfig stage_cfg = config;
            stage_cfg.N = stage.N;
            stage_cfg.r = r;
            stage_cfg.k0 = 0;
            stage.result = minimize(spec, stage_cfg);
        } catch (const SignConditionFailed& e) {
            stage.error = e.what();
        }
        out.push_back(std::move(stage));
    }
    return out;
}

} // namespace breather::solver
