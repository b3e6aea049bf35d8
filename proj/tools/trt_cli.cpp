// Command-line front end. Talks to the core exclusively through the C API.

#include <trt/capi.h>

#include <CLI11.hpp>

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

namespace {

struct ConfigDeleter {
    void operator()(trt_config* c) const { trt_config_free(c); }
};
struct ReportDeleter {
    void operator()(trt_report* r) const { trt_report_free(r); }
};

int run(const std::string& command, const std::string& config_path, const std::string& out_dir,
        const std::vector<std::pair<std::string, std::string>>& overrides) {
    trt_config* raw = nullptr;
    int rc = config_path.empty() ? trt_config_default(&raw)
                                 : trt_config_parse_file(config_path.c_str(), &raw);
    if (rc != TRT_OK) {
        std::fprintf(stderr, "error: %s\n", trt_last_error());
        return 2;
    }
    std::unique_ptr<trt_config, ConfigDeleter> cfg(raw);
    for (const auto& [key, value] : overrides) {
        rc = trt_config_set(cfg.get(), key.c_str(), value.c_str());
        if (rc != TRT_OK) {
            std::fprintf(stderr, "error: %s\n", trt_last_error());
            return 2;
        }
    }

    trt_report* rep_raw = nullptr;
    rc = trt_run(cfg.get(), command.c_str(), out_dir.c_str(), &rep_raw);
    if (rc != TRT_OK) {
        std::fprintf(stderr, "error: %s\n", trt_last_error());
        return 2;
    }
    std::unique_ptr<trt_report, ReportDeleter> rep(rep_raw);

    std::printf("command: %s\n", trt_report_command(rep.get()));
    std::printf("config hash: %s\n", trt_report_config_hash(rep.get()));
    for (int i = 0; i < trt_report_metric_count(rep.get()); ++i)
        std::printf("  %-28s %.17g\n", trt_report_metric_name(rep.get(), i),
                    trt_report_metric_value(rep.get(), i));
    for (int i = 0; i < trt_report_check_count(rep.get()); ++i)
        std::printf("  %-28s %.17g  (threshold %.17g)  [%s]\n",
                    trt_report_check_name(rep.get(), i),
                    trt_report_check_measured(rep.get(), i),
                    trt_report_check_threshold(rep.get(), i),
                    trt_report_check_passed(rep.get(), i) ? "pass" : "FAIL");
    std::printf("wall seconds: %.3f\n", trt_report_wall_seconds(rep.get()));
    const bool ok = trt_report_passed(rep.get()) != 0;
    std::printf("%s\n", ok ? "PASS" : "FAIL");
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"transverse ray transform laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "trt_out";
    long seed = -1;
    bool seed_set = false;
    app.add_option("--config", config_path, "configuration file (key = value lines)");
    app.add_option("--out", out_dir, "output directory for CSV artifacts");
    app.add_option("--seed", seed, "override the configured seed")->each([&](const std::string&) {
        seed_set = true;
    });

    int spanning_n = 0;
    std::string field_path;
    auto* c_forward = app.add_subcommand("forward", "TRT data of a voxel field over a ray family");
    c_forward->add_option("--field", field_path, "voxel field CSV (overrides io.field)");
    app.add_subcommand("adjoint-test", "duality pairing of the transform and its adjoint");
    auto* c_span = app.add_subcommand("spanning", "transverse spanning set and its Gram spectrum");
    c_span->add_option("--n", spanning_n, "dimension override");
    app.add_subcommand("inject-probe", "singular-value probe of the discretized transform");
    app.add_subcommand("dim2-probe", "n = 2 kernel probe and ray-transform identity");
    app.add_subcommand("support-exp", "support-theorem experiments");
    app.add_subcommand("invert", "regularized least-squares inversion of synthetic data");

    CLI11_PARSE(app, argc, argv);

    std::vector<std::pair<std::string, std::string>> overrides;
    if (seed_set) overrides.emplace_back("seed", std::to_string(seed));
    if (spanning_n > 0) overrides.emplace_back("domain.n", std::to_string(spanning_n));
    if (!field_path.empty()) overrides.emplace_back("io.field", field_path);

    const std::string command = app.get_subcommands().front()->get_name();
    return run(command, config_path, out_dir, overrides);
}
