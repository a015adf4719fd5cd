#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "breather/exact.hpp"
#include "breather/media.hpp"

namespace breather::cli {

// Flat TOML-style configuration: [section] headers, key = value lines,
// '#' comments. Values are numbers, quoted strings, booleans, or arrays of
// numbers. Keys are addressed as "section.key"; command-line overrides use
// the same dotted form.

class KeyValues {
public:
    void set(const std::string& key, const std::string& raw) { values_[key] = raw; }
    bool has(const std::string& key) const { return values_.count(key) != 0; }

    const std::map<std::string, std::string>& raw() const { return values_; }

    std::string get_string(const std::string& key) const {
        std::string v = fetch(key);
        if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
            return v.substr(1, v.size() - 2);
        return v;
    }

    double get_number(const std::string& key) const {
        const std::string v = fetch(key);
        try {
            std::size_t used = 0;
            const double x = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "' is not a number: " + v);
        }
    }

    long get_integer(const std::string& key) const {
        const double x = get_number(key);
        const long n = static_cast<long>(x);
        if (static_cast<double>(n) != x)
            throw ConfigError("config key '" + key + "' is not an integer");
        return n;
    }

    bool get_bool(const std::string& key) const {
        const std::string v = fetch(key);
        if (v == "true") return true;
        if (v == "false") return false;
        throw ConfigError("config key '" + key + "' is not a boolean: " + v);
    }

    std::vector<double> get_number_array(const std::string& key) const {
        std::string v = fetch(key);
        if (v.size() < 2 || v.front() != '[' || v.back() != ']')
            throw ConfigError("config key '" + key + "' is not an array: " + v);
        std::vector<double> out;
        std::string item;
        std::istringstream ss(v.substr(1, v.size() - 2));
        while (std::getline(ss, item, ',')) {
            const auto a = item.find_first_not_of(" \t");
            if (a == std::string::npos) continue;
            const auto b = item.find_last_not_of(" \t");
            try {
                out.push_back(std::stod(item.substr(a, b - a + 1)));
            } catch (const std::exception&) {
                throw ConfigError("config key '" + key + "' has a non-numeric element");
            }
        }
        return out;
    }

    template <class T>
    T get_or(const std::string& key, T fallback) const;

private:
    std::string fetch(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
        return it->second;
    }

    std::map<std::string, std::string> values_;
};

template <>
inline double KeyValues::get_or<double>(const std::string& key, double fallback) const {
    return has(key) ? get_number(key) : fallback;
}
template <>
inline long KeyValues::get_or<long>(const std::string& key, long fallback) const {
    return has(key) ? get_integer(key) : fallback;
}
template <>
inline std::string KeyValues::get_or<std::string>(const std::string& key,
                                                  std::string fallback) const {
    return has(key) ? get_string(key) : fallback;
}

inline KeyValues parse_config_text(const std::string& text) {
    KeyValues kv;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // Strip comments outside of quotes.
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') quoted = !quoted;
            if (line[i] == '#' && !quoted) { line.erase(i); break; }
        }
        const auto a = line.find_first_not_of(" \t\r");
        if (a == std::string::npos) continue;
        const auto b = line.find_last_not_of(" \t\r");
        line = line.substr(a, b - a + 1);

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            section = line.substr(1, line.size() - 2);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        const auto trim = [](std::string& s) {
            const auto x = s.find_first_not_of(" \t");
            const auto y = s.find_last_not_of(" \t");
            s = x == std::string::npos ? "" : s.substr(x, y - x + 1);
        };
        trim(key);
        trim(val);
        if (key.empty() || val.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
        kv.set(section.empty() ? key : section + "." + key, val);
    }
    return kv;
}

inline KeyValues parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

/// Applies "section.key=value" overrides on top of the parsed file.
inline void apply_overrides(KeyValues& kv, const std::vector<std::string>& sets) {
    for (const std::string& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("--set expects section.key=value, got: " + s);
        kv.set(s.substr(0, eq), s.substr(eq + 1));
    }
}

// ---------------------------------------------------------------------------
// RunConfig
// ---------------------------------------------------------------------------

struct RunConfig {
    media::Medium medium;
    std::string medium_kind;
    std::map<std::string, double> medium_params;   // numeric echo for reports

    double gamma = -1.0;
    int N = 41;
    std::vector<int> N_schedule;
    std::int64_t r = 0;   // 0 = medium base index
    int j_max = 0;        // scans only
    int k0 = 0;           // 0 = automatic seed choice

    double grad_tol = 1e-10;
    long max_iters = 100000;
    std::uint64_t rng_seed = 1;
    int jobs = 1;

    double weak_tol = 1e-6;
    double decay_margin = 0.10;
    double antiperiod_tol = 1e-10;
    double el_off_tol = 1e-12;
    int out_of_band = 3;

    std::string out_dir = "out";

    std::int64_t lattice_r() const { return r > 0 ? r : media::base_index(medium); }
};

namespace detail {

/// A medium parameter is either an exact "p/q sqrt(s) pi" string or a float.
struct ParamValue {
    double numeric = 0.0;
    std::optional<ExactReal> exact;
};

inline ParamValue read_param(const KeyValues& kv, const std::string& key) {
    ParamValue p;
    if (!kv.has(key)) throw ConfigError("missing medium parameter '" + key + "'");
    const std::string s = kv.get_string(key);
    if (const auto e = parse_exact(s)) {
        p.exact = *e;
        p.numeric = e->value();
        return p;
    }
    p.numeric = kv.get_number(key);
    return p;
}

} // namespace detail

inline RunConfig build_run_config(const KeyValues& kv) {
    RunConfig rc;
    rc.medium_kind = kv.get_string("medium.kind");

    const auto all_exact = [](std::initializer_list<const detail::ParamValue*> ps) {
        for (const auto* p : ps)
            if (!p->exact) return false;
        return true;
    };

    if (rc.medium_kind == "step") {
        const auto a = detail::read_param(kv, "medium.a");
        const auto b = detail::read_param(kv, "medium.b");
        const auto c = detail::read_param(kv, "medium.c");
        const auto w = detail::read_param(kv, "medium.omega");
        rc.medium = all_exact({&a, &b, &c, &w})
                        ? media::make_step(*a.exact, *b.exact, *c.exact, *w.exact)
                        : media::make_step(a.numeric, b.numeric, c.numeric, w.numeric);
        rc.medium_params = {{"a", a.numeric}, {"b", b.numeric}, {"c", c.numeric},
                            {"omega", w.numeric}};
    } else if (rc.medium_kind == "periodic") {
        const auto a = detail::read_param(kv, "medium.a");
        const auto b = detail::read_param(kv, "medium.b");
        const auto th = detail::read_param(kv, "medium.theta");
        const auto w = detail::read_param(kv, "medium.omega");
        rc.medium = all_exact({&a, &b, &th, &w})
                        ? media::make_periodic(*a.exact, *b.exact, *th.exact, *w.exact)
                        : media::make_periodic(a.numeric, b.numeric, th.numeric, w.numeric);
        rc.medium_params = {{"a", a.numeric}, {"b", b.numeric}, {"theta", th.numeric},
                            {"omega", w.numeric}};
    } else if (rc.medium_kind == "dirichlet") {
        const auto l = detail::read_param(kv, "medium.l");
        const auto w = detail::read_param(kv, "medium.omega");
        rc.medium = all_exact({&l, &w}) ? media::make_dirichlet(*l.exact, *w.exact)
                                        : media::make_dirichlet(l.numeric, w.numeric);
        rc.medium_params = {{"l", l.numeric}, {"omega", w.numeric}};
    } else {
        throw ConfigError("medium.kind must be step, periodic or dirichlet");
    }

    rc.gamma = kv.get_number("problem.gamma");
    if (rc.gamma == 0.0) throw ConfigError("problem.gamma must be nonzero");

    rc.N = static_cast<int>(kv.get_or<long>("problem.N", 41));
    if (rc.N < 1 || rc.N % 2 == 0) throw ConfigError("problem.N must be odd and positive");
    if (kv.has("problem.N_schedule")) {
        for (double v : kv.get_number_array("problem.N_schedule")) {
            const int n = static_cast<int>(v);
            if (static_cast<double>(n) != v || n < 1 || n % 2 == 0)
                throw ConfigError("problem.N_schedule entries must be odd integers");
            rc.N_schedule.push_back(n);
        }
        for (std::size_t i = 0; i + 1 < rc.N_schedule.size(); ++i)
            if (rc.N_schedule[i] >= rc.N_schedule[i + 1])
                throw ConfigError("problem.N_schedule must be strictly increasing");
        if (rc.N_schedule.empty()) throw ConfigError("problem.N_schedule must be nonempty");
    }
    rc.r = kv.get_or<long>("problem.r", 0);
    if (rc.r > 0) media::SymmetryIndex::for_medium(rc.medium, rc.r);
    else if (rc.r < 0) throw ConfigError("problem.r must be positive");
    rc.j_max = static_cast<int>(kv.get_or<long>("problem.j_max", 0));
    if (kv.has("problem.j_max") && rc.j_max < 1)
        throw ConfigError("problem.j_max must be >= 1");
    rc.k0 = static_cast<int>(kv.get_or<long>("problem.k0", 0));

    rc.grad_tol = kv.get_or<double>("solver.grad_tol", 1e-10);
    rc.max_iters = kv.get_or<long>("solver.max_iters", 100000);
    rc.rng_seed = static_cast<std::uint64_t>(kv.get_or<long>("solver.rng_seed", 1));

    rc.weak_tol = kv.get_or<double>("verify.weak_tol", 1e-6);
    rc.decay_margin = kv.get_or<double>("verify.decay_margin", 0.10);
    rc.antiperiod_tol = kv.get_or<double>("verify.antiperiod_tol", 1e-10);
    rc.el_off_tol = kv.get_or<double>("verify.el_off_tol", 1e-12);
    rc.out_of_band = static_cast<int>(kv.get_or<long>("verify.out_of_band", 3));

    rc.out_dir = kv.get_or<std::string>("output.dir", "out");

    for (double tol : {rc.grad_tol, rc.weak_tol, rc.decay_margin, rc.antiperiod_tol, rc.el_off_tol})
        if (!(tol > 0.0)) throw ConfigError("tolerances must be positive");
    return rc;
}

} // namespace breather::cli
