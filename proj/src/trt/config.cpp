#include "trt/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace trt {

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_vector(const std::vector<double>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += fmt_double(v[i]);
    }
    return s;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct Setter {
    std::function<bool(ExperimentConfig&, const std::string&)> apply;  // false on bad value
    std::string type_name;
};

bool parse_int_value(const std::string& s, long& out) {
    try {
        size_t pos = 0;
        out = std::stol(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

bool parse_double_value(const std::string& s, double& out) {
    try {
        size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size() && std::isfinite(out);
    } catch (...) {
        return false;
    }
}

bool parse_vector_value(const std::string& s, std::vector<double>& out) {
    out.clear();
    if (trim(s).empty()) return true;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        double v;
        if (!parse_double_value(trim(item), v)) return false;
        out.push_back(v);
    }
    return !out.empty();
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        auto add_int = [&](const std::string& key, int ExperimentConfig::* member) {
            t[key] = {[member](ExperimentConfig& c, const std::string& v) {
                          long x;
                          if (!parse_int_value(v, x)) return false;
                          c.*member = static_cast<int>(x);
                          return true;
                      },
                      "integer"};
        };
        auto add_double = [&](const std::string& key, double ExperimentConfig::* member) {
            t[key] = {[member](ExperimentConfig& c, const std::string& v) {
                          double x;
                          if (!parse_double_value(v, x)) return false;
                          c.*member = x;
                          return true;
                      },
                      "number"};
        };
        auto add_vec = [&](const std::string& key,
                           std::vector<double> ExperimentConfig::* member) {
            t[key] = {[member](ExperimentConfig& c, const std::string& v) {
                          return parse_vector_value(v, c.*member);
                      },
                      "comma-separated numbers"};
        };
        add_int("domain.n", &ExperimentConfig::n);
        add_double("domain.rho", &ExperimentConfig::rho);
        add_double("domain.rho_ext", &ExperimentConfig::rho_ext);
        t["metric.kind"] = {[](ExperimentConfig& c, const std::string& v) {
                                if (v != "euclidean" && v != "conformal") return false;
                                c.metric_kind = v;
                                return true;
                            },
                            "euclidean|conformal"};
        add_double("metric.conformal_a", &ExperimentConfig::conformal_a);
        add_double("ode.h", &ExperimentConfig::ode_h);
        add_double("ode.max_steps_factor", &ExperimentConfig::max_steps_factor);
        add_int("sampling.boundary_count", &ExperimentConfig::boundary_count);
        add_int("sampling.direction_count", &ExperimentConfig::direction_count);
        add_int("sampling.sphere_count", &ExperimentConfig::sphere_count);
        add_int("grid.resolution", &ExperimentConfig::grid_resolution);
        t["family.count"] = {[](ExperimentConfig& c, const std::string& v) {
                                 long x;
                                 if (!parse_int_value(v, x)) return false;
                                 c.family_count = static_cast<int>(x);
                                 c.family_count_explicit = true;
                                 return true;
                             },
                             "integer"};
        add_double("family.dir_cap", &ExperimentConfig::dir_cap);
        add_vec("family.avoid_center", &ExperimentConfig::avoid_center);
        add_double("family.avoid_radius", &ExperimentConfig::avoid_radius);
        add_double("family.aperture", &ExperimentConfig::aperture);
        add_int("family.deform_steps", &ExperimentConfig::deform_steps);
        add_vec("support.center", &ExperimentConfig::support_center);
        add_double("support.radius", &ExperimentConfig::support_radius);
        add_double("support.avoid_radius", &ExperimentConfig::support_avoid_radius);
        add_double("solver.lambda", &ExperimentConfig::lambda);
        add_int("solver.iters", &ExperimentConfig::iters);
        add_double("solver.tol", &ExperimentConfig::tol);
        t["seed"] = {[](ExperimentConfig& c, const std::string& v) {
                         long x;
                         if (!parse_int_value(v, x)) return false;
                         c.seed = x;
                         return true;
                     },
                     "integer"};
        t["io.field"] = {[](ExperimentConfig& c, const std::string& v) {
                             c.field_path = v;
                             return true;
                         },
                         "path"};
        return t;
    }();
    return table;
}

void validate(const ExperimentConfig& c, std::vector<ConfigError>& errs) {
    auto err = [&](const std::string& m) { errs.push_back({0, m}); };
    if (c.n < 2 || c.n > 6) err("domain.n must be between 2 and 6");
    if (!(c.rho > 0.0)) err("domain.rho must be positive");
    if (!(c.rho_ext > c.rho))
        err("domain.rho_ext must exceed domain.rho (rho_ext=" + fmt_double(c.rho_ext) +
            ", rho=" + fmt_double(c.rho) + ")");
    if (c.metric_kind == "conformal" && 1.0 + c.conformal_a * c.rho_ext * c.rho_ext <= 0.0)
        err("metric.conformal_a makes the conformal factor vanish on the outer ball");
    if (!(c.ode_h > 0.0)) err("ode.h must be positive");
    if (!(c.max_steps_factor > 0.0)) err("ode.max_steps_factor must be positive");
    if (c.boundary_count < 1) err("sampling.boundary_count must be >= 1");
    if (c.direction_count < 1) err("sampling.direction_count must be >= 1");
    if (c.sphere_count < 1) err("sampling.sphere_count must be >= 1");
    if (c.grid_resolution < 1) err("grid.resolution must be >= 1");
    if (c.family_count < 1) err("family.count must be >= 1");
    if (!(c.dir_cap > 0.0) || c.dir_cap >= 1.5707963267948966)
        err("family.dir_cap must lie in (0, pi/2)");
    if (!c.avoid_center.empty() && static_cast<int>(c.avoid_center.size()) != c.n)
        err("family.avoid_center must have domain.n components");
    if (c.avoid_radius < 0.0) err("family.avoid_radius must be >= 0");
    if (!(c.aperture > 0.0)) err("family.aperture must be positive");
    if (c.deform_steps < 1) err("family.deform_steps must be >= 1");
    if (!c.support_center.empty() && static_cast<int>(c.support_center.size()) != c.n)
        err("support.center must have domain.n components");
    if (!(c.support_radius > 0.0)) err("support.radius must be positive");
    if (!(c.support_avoid_radius > c.support_radius))
        err("support.avoid_radius must exceed support.radius");
    if (c.lambda < 0.0) err("solver.lambda must be >= 0");
    if (c.iters < 1) err("solver.iters must be >= 1");
    if (!(c.tol > 0.0)) err("solver.tol must be positive");
}

std::string errors_to_message(const std::vector<ConfigError>& errs) {
    std::string m = "configuration invalid:";
    for (const auto& e : errs) {
        m += "\n  ";
        if (e.line > 0) m += "line " + std::to_string(e.line) + ": ";
        m += e.message;
    }
    return m;
}

}  // namespace

ConfigParseFailure::ConfigParseFailure(std::vector<ConfigError> errs)
    : std::runtime_error(errors_to_message(errs)), errors(std::move(errs)) {}

std::vector<double> ExperimentConfig::support_center_or_default() const {
    if (!support_center.empty()) return support_center;
    std::vector<double> c(n, 0.0);
    c[0] = 0.55 * rho;
    return c;
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::vector<ConfigError> errs;
    std::map<std::string, int> seen;  // key -> first line
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const size_t eq = t.find('=');
        if (eq == std::string::npos) {
            errs.push_back({lineno, "expected `key = value`"});
            continue;
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) {
            errs.push_back({lineno, "unknown key `" + key + "`"});
            continue;
        }
        const auto prev = seen.find(key);
        if (prev != seen.end()) {
            errs.push_back({lineno, "duplicate key `" + key + "` (first set on line " +
                                        std::to_string(prev->second) + ")"});
            continue;
        }
        seen[key] = lineno;
        if (!it->second.apply(cfg, value))
            errs.push_back({lineno, "value for `" + key + "` is not a valid " +
                                        it->second.type_name + ": `" + value + "`"});
    }
    validate(cfg, errs);
    if (!errs.empty()) throw ConfigParseFailure(std::move(errs));
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    const auto it = setters().find(key);
    if (it == setters().end())
        throw ConfigParseFailure({{0, "unknown key `" + key + "`"}});
    if (!it->second.apply(cfg, value))
        throw ConfigParseFailure({{0, "value for `" + key + "` is not a valid " +
                                          it->second.type_name + ": `" + value + "`"}});
    std::vector<ConfigError> errs;
    validate(cfg, errs);
    if (!errs.empty()) throw ConfigParseFailure(std::move(errs));
}

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "domain.n = " << c.n << "\n";
    os << "domain.rho = " << fmt_double(c.rho) << "\n";
    os << "domain.rho_ext = " << fmt_double(c.rho_ext) << "\n";
    os << "metric.kind = " << c.metric_kind << "\n";
    os << "metric.conformal_a = " << fmt_double(c.conformal_a) << "\n";
    os << "ode.h = " << fmt_double(c.ode_h) << "\n";
    os << "ode.max_steps_factor = " << fmt_double(c.max_steps_factor) << "\n";
    os << "sampling.boundary_count = " << c.boundary_count << "\n";
    os << "sampling.direction_count = " << c.direction_count << "\n";
    os << "sampling.sphere_count = " << c.sphere_count << "\n";
    os << "grid.resolution = " << c.grid_resolution << "\n";
    if (c.family_count_explicit) os << "family.count = " << c.family_count << "\n";
    os << "family.dir_cap = " << fmt_double(c.dir_cap) << "\n";
    if (!c.avoid_center.empty())
        os << "family.avoid_center = " << fmt_vector(c.avoid_center) << "\n";
    os << "family.avoid_radius = " << fmt_double(c.avoid_radius) << "\n";
    os << "family.aperture = " << fmt_double(c.aperture) << "\n";
    os << "family.deform_steps = " << c.deform_steps << "\n";
    if (!c.support_center.empty())
        os << "support.center = " << fmt_vector(c.support_center) << "\n";
    os << "support.radius = " << fmt_double(c.support_radius) << "\n";
    os << "support.avoid_radius = " << fmt_double(c.support_avoid_radius) << "\n";
    os << "solver.lambda = " << fmt_double(c.lambda) << "\n";
    os << "solver.iters = " << c.iters << "\n";
    os << "solver.tol = " << fmt_double(c.tol) << "\n";
    os << "seed = " << c.seed << "\n";
    if (!c.field_path.empty()) os << "io.field = " << c.field_path << "\n";
    return os.str();
}

std::string config_hash(const ExperimentConfig& cfg) {
    const std::string s = serialize_config(cfg);
    uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    return serialize_config(a) == serialize_config(b);
}

}  // namespace trt
