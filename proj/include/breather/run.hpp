#pragma once

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "breather/config.hpp"
#include "breather/reconstruct.hpp"
#include "breather/solver.hpp"

namespace breather::cli {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Exit codes
// ---------------------------------------------------------------------------

enum ExitCode : int {
    exit_ok = 0,
    exit_config = 1,
    exit_not_admissible = 2,
    exit_no_spectral_gap = 3,
    exit_sign_condition = 4,
    exit_max_iters = 5,
    exit_gate_failure = 6,
};

// ---------------------------------------------------------------------------
// Logging (BREATHER_LOG in {error, info, debug}, stderr only)
// ---------------------------------------------------------------------------

inline int log_level() {
    static const int level = [] {
        const char* env = std::getenv("BREATHER_LOG");
        if (!env) return 1;
        const std::string v(env);
        if (v == "error") return 0;
        if (v == "debug") return 2;
        return 1;
    }();
    return level;
}

inline void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "[breather] " << msg << "\n";
}
inline void log_debug(const std::string& msg) {
    if (log_level() >= 2) std::cerr << "[breather:debug] " << msg << "\n";
}

// ---------------------------------------------------------------------------
// Shared report fragments
// ---------------------------------------------------------------------------

namespace detail {

inline json medium_json(const RunConfig& rc) {
    json m;
    m["kind"] = rc.medium_kind;
    for (const auto& [k, v] : rc.medium_params) m[k] = v;
    m["base_index"] = media::base_index(rc.medium);
    json adm;
    if (const auto* s = std::get_if<media::StepMedium>(&rc.medium)) {
        adm["ratio"] = s->ratio.str();
    } else if (const auto* p = std::get_if<media::PeriodicStepMedium>(&rc.medium)) {
        adm["l"] = p->l_ratio.str();
        adm["two_m"] = p->two_m_ratio.str();
        adm["r_base"] = p->r_base;
    } else if (const auto* d = std::get_if<media::DirichletMedium>(&rc.medium)) {
        adm["p"] = d->p;
        adm["q4"] = d->q4;
    }
    m["admissibility"] = adm;
    return m;
}

inline std::string csv_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace detail

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

struct AnalyzeOutcome {
    json report;
    std::string text;
    int exit_code = exit_ok;
};

inline AnalyzeOutcome run_analyze(const RunConfig& rc) {
    AnalyzeOutcome out;
    const std::int64_t r = rc.lattice_r();

    json rep;
    rep["schema"] = "breather-analyze-v1";
    rep["medium"] = detail::medium_json(rc);
    rep["gamma"] = rc.gamma;
    rep["N"] = rc.N;
    rep["r"] = r;

    std::ostringstream text;
    text << "medium: " << rc.medium_kind << ", base index " << media::base_index(rc.medium)
         << ", lattice stride r = " << r << "\n";

    // Per-harmonic table: slope signs, and for periodic media the gap data.
    json modes = json::array();
    const auto* periodic = std::get_if<media::PeriodicStepMedium>(&rc.medium);
    char line[160];
    text << (periodic ? "     k        slope0       tr(A_k)     rho_small     rho_large\n"
                      : "     k        slope0\n");
    for (std::int64_t k = r; k <= rc.N; k += 2 * r) {
        const auto prof = floquet::mode_for(rc.medium, static_cast<int>(k));
        json row;
        row["k"] = k;
        row["slope0"] = prof.slope0;
        if (periodic) {
            const auto A = floquet::monodromy(*periodic, static_cast<int>(k));
            const auto mults = floquet::floquet_multipliers(A);  // throws NoSpectralGap
            row["trace"] = A.m.trace();
            row["trace_closed_form"] = A.trace_closed_form;
            row["rho_small"] = mults.small;
            row["rho_large"] = mults.large;
            std::snprintf(line, sizeof line, "  %4lld  %12.6g  %12.6g  %12.6g  %12.6g\n",
                          static_cast<long long>(k), prof.slope0, A.m.trace(), mults.small,
                          mults.large);
        } else {
            std::snprintf(line, sizeof line, "  %4lld  %12.6g\n", static_cast<long long>(k),
                          prof.slope0);
        }
        text << line;
        modes.push_back(row);
    }
    rep["modes"] = modes;

    if (!media::is_bounded(rc.medium)) {
        std::vector<floquet::ModeProfile> profs;
        for (std::int64_t k = r; k <= rc.N; k += 2 * r)
            profs.push_back(floquet::mode_for(rc.medium, static_cast<int>(k)));
        const auto cert = floquet::verify_C2(rc.medium, profs);
        rep["C2"] = {{"M", cert.M}, {"rho", cert.rho}, {"envelope_M", cert.envelope_M}};
        text << "decay certificate: sup bound " << cert.M << ", rate " << cert.rho
             << ", envelope prefactor " << cert.envelope_M << "\n";
    }

    // Sign condition for the configured gamma (throws SignConditionFailed).
    const auto spec = functional::eta_table(rc.medium, rc.gamma, rc.N, r);
    const int k0 = solver::pick_seed_harmonic(spec);
    rep["sign_condition"] = {{"holds", true}, {"seed_k0", k0}};
    text << "sign condition holds for gamma = " << rc.gamma << "; seed harmonic k0 = " << k0
         << "\n";

    rep["checks"] = {{"admissible", true}, {"spectral_gap", true}, {"sign_condition", true}};
    out.report = rep;
    out.text = text.str();
    return out;
}

// ---------------------------------------------------------------------------
// solve (shared with scan stages)
// ---------------------------------------------------------------------------

struct StageVerification {
    json result;                      // result.json payload
    std::vector<std::string> convergence_csv;  // data rows
    reconstruct::FieldGrid field;
    bool converged = false;
    bool gates_ok = false;
    int exit_code = exit_ok;
};

namespace detail {

inline StageVerification verify_stages(const RunConfig& rc, std::int64_t r,
                                       const std::vector<solver::BreatherResult>& stages) {
    StageVerification v;
    const solver::BreatherResult& final = stages.back();
    const functional::FunctionalSpec spec =
        functional::eta_table(rc.medium, rc.gamma, final.N, r);
    const auto profiles = floquet::ProfileTable::build(rc.medium, final.N, r);

    const bool bounded = media::is_bounded(rc.medium);
    double rho_theory = 0.0;
    json c2_json;
    if (!bounded) {
        std::vector<floquet::ModeProfile> profs;
        for (const auto& [k, p] : profiles.all()) profs.push_back(p);
        const auto cert = floquet::verify_C2(rc.medium, profs);
        rho_theory = cert.rho;
        c2_json = {{"M", cert.M}, {"rho", cert.rho}, {"envelope_M", cert.envelope_M}};
    }

    const double T = spec.T;
    const auto x_grid = reconstruct::build_x_grid(rc.medium, bounded ? 1.0 : rho_theory);
    const auto t_grid = reconstruct::build_t_grid(T, final.N, r);
    v.field = reconstruct::assemble(final.alpha, profiles, x_grid, t_grid, spec.omega);
    const double field_sup = v.field.sup_norm();

    const double antiperiod_dev = reconstruct::check_antiperiodicity(v.field, r);

    json decay_json;
    bool decay_ok = true;
    if (!bounded && field_sup > 0.0) {
        const auto fit = reconstruct::fit_decay(v.field, rho_theory);
        decay_ok = fit.rho_fit >= (1.0 - rc.decay_margin) * rho_theory;
        decay_json = {{"applicable", true},
                      {"rho_theory", fit.rho_theory},
                      {"rho_fit", fit.rho_fit},
                      {"C_fit", fit.C_fit},
                      {"fit_residual", fit.residual}};
    } else {
        decay_json = {{"applicable", false}};
    }

    reconstruct::WeakOptions wopt;
    wopt.x_max = x_grid.back();
    wopt.out_of_band = rc.out_of_band;
    const auto weak = reconstruct::weak_residual(final.alpha, profiles, spec, rc.medium, wopt);

    const auto reg = reconstruct::regularity_diagnostic(final.alpha, {0.1, 0.2, 0.3, 0.45});

    // Gates.
    const bool g_negative = final.J_value < 0.0;
    const bool g_el = final.el_sup <= 10.0 * rc.grad_tol;
    const bool g_el_off = final.el_sup_off <= rc.el_off_tol;
    const bool g_weak =
        weak.max_rel_direct <= rc.weak_tol && weak.max_route_gap <= rc.weak_tol;
    const bool g_anti = antiperiod_dev <= rc.antiperiod_tol * std::max(field_sup, 1e-300);
    v.converged = final.converged;
    v.gates_ok = g_negative && g_el && g_el_off && g_weak && g_anti && decay_ok;
    v.exit_code = !v.converged ? exit_max_iters : (v.gates_ok ? exit_ok : exit_gate_failure);

    // result.json payload.
    json res;
    res["schema"] = "breather-result-v1";
    res["medium"] = medium_json(rc);
    res["gamma"] = rc.gamma;
    res["omega"] = spec.omega;
    res["T"] = T;
    res["N"] = final.N;
    res["r"] = r;
    res["k0"] = final.k0;
    res["seed"] = {{"t_star", final.seed_t}, {"J_seed", final.seed_J}};
    res["J"] = final.J_value;
    res["grad_norm"] = final.grad_norm;
    res["el_sup"] = final.el_sup;
    res["el_l2"] = final.el_l2;
    res["el_sup_off_lattice"] = final.el_sup_off;
    res["converged"] = final.converged;
    res["iterations"] = final.iterations;
    res["restarts"] = final.restarts;
    if (!c2_json.is_null()) res["C2"] = c2_json;

    json alpha = json::array();
    for (int k : spec.support) alpha.push_back({{"k", k}, {"value", final.alpha.at(k)}});
    res["alpha"] = alpha;

    res["decay"] = decay_json;
    res["antiperiodicity"] = {{"r", r},
                              {"max_deviation", antiperiod_dev},
                              {"field_sup", field_sup}};

    json weak_json;
    weak_json["max_rel_direct"] = weak.max_rel_direct;
    weak_json["max_route_gap"] = weak.max_route_gap;
    json entries = json::array();
    for (const auto& e : weak.entries)
        entries.push_back({{"k0", e.k0},
                           {"shape", e.shape},
                           {"H1", e.H1},
                           {"H2", e.H2},
                           {"H3", e.H3},
                           {"direct", e.direct},
                           {"reduced", e.reduced},
                           {"scale", e.scale},
                           {"in_band", e.in_band}});
    weak_json["entries"] = entries;
    res["weak_residual"] = weak_json;

    json reg_json;
    reg_json["nu"] = reg.nu;
    reg_json["h_norm"] = reg.h_norm;
    reg_json["tail_exponent"] = reg.tail_exponent;
    res["regularity"] = reg_json;

    json stages_json = json::array();
    for (std::size_t i = 0; i < stages.size(); ++i) {
        const auto& s = stages[i];
        json row = {{"N", s.N},
                    {"J", s.J_value},
                    {"grad_norm", s.grad_norm},
                    {"iterations", s.iterations},
                    {"converged", s.converged},
                    {"h02", seq::h_norm(s.alpha, 0.2)}};
        if (i > 0) row["J_increment"] = std::fabs(s.J_value - stages[i - 1].J_value);
        stages_json.push_back(row);
    }
    res["stages"] = stages_json;

    res["gates"] = {{"negative_J", g_negative}, {"el_residual", g_el},
                    {"el_off_lattice", g_el_off}, {"weak_residual", g_weak},
                    {"antiperiodicity", g_anti}, {"decay", decay_ok},
                    {"converged", final.converged}};

    v.result = res;

    v.convergence_csv.push_back("stage_N,phase,iter,J,grad_norm");
    for (const auto& s : stages)
        for (const auto& h : s.history)
            v.convergence_csv.push_back(std::to_string(h.stage_N) + "," + h.phase + "," +
                                        std::to_string(h.iter) + "," + csv_double(h.J) + "," +
                                        csv_double(h.grad_norm));
    return v;
}

inline void write_stage_artifacts(const std::filesystem::path& dir, const StageVerification& v) {
    std::filesystem::create_directories(dir);
    write_text(dir / "result.json", v.result.dump(2) + "\n");

    std::ostringstream conv;
    for (const auto& row : v.convergence_csv) conv << row << "\n";
    write_text(dir / "convergence.csv", conv.str());

    // Decimated plot-ready export.
    std::ostringstream csv;
    csv << "x,t,w\n";
    const std::size_t xs = std::max<std::size_t>(1, v.field.x.size() / 512);
    const std::size_t ts = std::max<std::size_t>(1, v.field.t.size() / 128);
    for (std::size_t i = 0; i < v.field.x.size(); i += xs)
        for (std::size_t j = 0; j < v.field.t.size(); j += ts)
            csv << csv_double(v.field.x[i]) << "," << csv_double(v.field.t[j]) << ","
                << csv_double(v.field.w[i][j]) << "\n";
    write_text(dir / "field.csv", csv.str());

    json meta;
    meta["schema"] = "breather-run-meta-v1";
    meta["timestamp_utc"] = utc_timestamp();
    write_text(dir / "run_meta.json", meta.dump(2) + "\n");
}

} // namespace detail

struct SolveOutcome {
    json result;
    int exit_code = exit_ok;
};

inline SolveOutcome run_solve(const RunConfig& rc) {
    const std::int64_t r = rc.lattice_r();
    solver::SolveConfig sc;
    sc.N = rc.N;
    sc.r = r;
    sc.k0 = rc.k0;
    sc.grad_tol = rc.grad_tol;
    sc.max_iters = rc.max_iters;
    sc.rng_seed = rc.rng_seed;

    std::vector<solver::BreatherResult> stages;
    if (!rc.N_schedule.empty()) {
        sc.N_schedule = rc.N_schedule;
        stages = solver::continue_in_N(rc.medium, rc.gamma, sc);
    } else {
        const auto spec = functional::eta_table(rc.medium, rc.gamma, rc.N, r);
        stages.push_back(solver::minimize(spec, sc));
    }

    StageVerification v = detail::verify_stages(rc, r, stages);
    detail::write_stage_artifacts(rc.out_dir, v);
    log_info("solve: J = " + std::to_string(v.result["J"].get<double>()) +
             ", exit " + std::to_string(v.exit_code));
    return SolveOutcome{v.result, v.exit_code};
}

struct ScanOutcome {
    json summary;
    int exit_code = exit_ok;
};

inline ScanOutcome run_scan(const RunConfig& rc) {
    if (rc.j_max < 1) throw ConfigError("scan requires problem.j_max >= 1");

    solver::SolveConfig sc;
    sc.N = rc.N;
    sc.grad_tol = rc.grad_tol;
    sc.max_iters = rc.max_iters;
    sc.rng_seed = rc.rng_seed;
    const auto stages = solver::multiplicity_scan(rc.medium, rc.gamma, rc.j_max, sc);

    struct StageOut {
        json row;
        int exit_code = exit_ok;
    };
    const auto process = [&](const solver::ScanStage& stage) -> StageOut {
        StageOut so;
        json row;
        row["j"] = stage.j;
        row["r"] = stage.r;
        row["N"] = stage.N;
        const std::string dir = rc.out_dir + "/j" + std::to_string(stage.j);
        row["dir"] = dir;
        if (!stage.result) {
            row["converged"] = false;
            row["error"] = stage.error;
            so.exit_code = exit_sign_condition;
            so.row = row;
            return so;
        }
        RunConfig stage_rc = rc;
        stage_rc.N = stage.N;
        stage_rc.r = stage.r;
        stage_rc.out_dir = dir;
        StageVerification v =
            detail::verify_stages(stage_rc, stage.r, {*stage.result});
        detail::write_stage_artifacts(dir, v);
        row["converged"] = stage.result->converged;
        row["gates_ok"] = v.gates_ok;
        row["J"] = stage.result->J_value;
        row["antiperiod"] = 2.0 * std::numbers::pi / media::omega_of(rc.medium) /
                            (2.0 * static_cast<double>(stage.r));
        json support = json::array();
        double amax = 0.0;
        for (int k = 1; k <= stage.result->alpha.max_index(); k += 2)
            amax = std::max(amax, std::fabs(stage.result->alpha.at(k)));
        std::int64_t r_eff = 0;
        for (int k = 1; k <= stage.result->alpha.max_index(); k += 2)
            if (std::fabs(stage.result->alpha.at(k)) > 1e-12 * amax) {
                support.push_back(k);
                r_eff = r_eff == 0 ? k : std::gcd(r_eff, static_cast<std::int64_t>(k));
            }
        row["support_k"] = support;
        // The minimizer may settle on a finer sublattice than requested; the
        // coarsest stride containing its support is reported alongside r.
        row["r_effective"] = r_eff;
        so.exit_code = v.exit_code;
        so.row = row;
        return so;
    };

    std::vector<StageOut> outs(stages.size());
    if (rc.jobs > 1) {
        std::vector<std::future<StageOut>> futs;
        for (const auto& stage : stages)
            futs.push_back(std::async(std::launch::async, process, std::cref(stage)));
        for (std::size_t i = 0; i < futs.size(); ++i) outs[i] = futs[i].get();
    } else {
        for (std::size_t i = 0; i < stages.size(); ++i) outs[i] = process(stages[i]);
    }

    json summary;
    summary["schema"] = "breather-scan-v1";
    json rows = json::array();
    bool any_success = false;
    int first_failure = exit_ok;
    for (const auto& so : outs) {
        rows.push_back(so.row);
        if (so.exit_code == exit_ok) any_success = true;
        else if (first_failure == exit_ok) first_failure = so.exit_code;
    }
    summary["stages"] = rows;

    std::filesystem::create_directories(rc.out_dir);
    detail::write_text(rc.out_dir + "/summary.json", summary.dump(2) + "\n");

    ScanOutcome out;
    out.summary = summary;
    out.exit_code = any_success ? exit_ok : first_failure;
    return out;
}

/// Maps library exceptions onto the documented CLI exit codes.
inline int exit_code_for_current_exception() {
    try {
        throw;
    } catch (const NotAdmissible&) {
        return exit_not_admissible;
    } catch (const NoSpectralGap&) {
        return exit_no_spectral_gap;
    } catch (const SignConditionFailed&) {
        return exit_sign_condition;
    } catch (const WrongSign&) {
        return exit_sign_condition;
    } catch (const ConfigError&) {
        return exit_config;
    } catch (const std::exception&) {
        return exit_config;
    }
}

} // namespace breather::cli
