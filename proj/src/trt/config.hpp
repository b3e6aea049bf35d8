#pragma once
// Experiment configuration: a line-oriented `key = value` format with dotted
// section keys, full validation, canonical serialization, and a stable hash.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace trt {

struct ConfigError {
    int line = 0;  // 0 when the error is not tied to a single line
    std::string message;
};

struct ConfigParseFailure : std::runtime_error {
    explicit ConfigParseFailure(std::vector<ConfigError> errs);
    std::vector<ConfigError> errors;
};

struct ExperimentConfig {
    // domain
    int n = 3;
    double rho = 1.0;
    double rho_ext = 1.2;
    // metric
    std::string metric_kind = "euclidean";  // euclidean | conformal
    double conformal_a = 0.05;
    // ode
    double ode_h = 1e-3;
    double max_steps_factor = 4.0;
    // sampling
    int boundary_count = 64;
    int direction_count = 16;
    int sphere_count = 128;
    // grid
    int grid_resolution = 6;
    // family
    int family_count = 512;
    bool family_count_explicit = false;
    double dir_cap = 1.1;
    std::vector<double> avoid_center;  // empty = no avoidance ball
    double avoid_radius = 0.0;
    double aperture = 0.15;
    int deform_steps = 12;
    // support experiment geometry
    std::vector<double> support_center;  // defaults to 0.55 e_1
    double support_radius = 0.2;
    double support_avoid_radius = 0.3;
    // solver
    double lambda = 1e-10;
    int iters = 2000;
    double tol = 1e-10;
    // misc
    long seed = 1;
    std::string field_path;  // io.field

    std::vector<double> support_center_or_default() const;
};

// Parses and validates; throws ConfigParseFailure carrying every error found
// (unknown keys, duplicates, type mismatches, constraint violations).
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// Applies a single key override (same validation as the file format).
void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value);

// Canonical serialization; parse(serialize(c)) == c.
std::string serialize_config(const ExperimentConfig& cfg);

// FNV-1a hash of the canonical serialization, as fixed-width hex.
std::string config_hash(const ExperimentConfig& cfg);

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace trt
