#include "trt/capi.h"

#include "trt/config.hpp"
#include "trt/runner.hpp"

#include <cstdlib>
#include <cstring>
#include <string>

struct trt_config {
    trt::ExperimentConfig impl;
};

struct trt_report {
    trt::RunReport impl;
};

namespace {

thread_local std::string g_last_error;

int fail(int code, const std::string& message) {
    g_last_error = message;
    return code;
}

template <class F>
int guarded(F&& f) {
    try {
        return f();
    } catch (const trt::ConfigParseFailure& e) {
        return fail(TRT_ERR_CONFIG, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(TRT_ERR_ARGUMENT, e.what());
    } catch (const std::domain_error& e) {
        return fail(TRT_ERR_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return fail(TRT_ERR_NUMERIC, e.what());
    }
}

}  // namespace

extern "C" {

const char* trt_version(void) { return "0.1.0"; }

const char* trt_last_error(void) { return g_last_error.c_str(); }

int trt_config_parse(const char* text, trt_config** out) {
    if (!text || !out) return fail(TRT_ERR_ARGUMENT, "null argument");
    return guarded([&]() {
        *out = new trt_config{trt::parse_config(text)};
        return TRT_OK;
    });
}

int trt_config_parse_file(const char* path, trt_config** out) {
    if (!path || !out) return fail(TRT_ERR_ARGUMENT, "null argument");
    return guarded([&]() {
        *out = new trt_config{trt::parse_config_file(path)};
        return TRT_OK;
    });
}

int trt_config_default(trt_config** out) {
    if (!out) return fail(TRT_ERR_ARGUMENT, "null argument");
    *out = new trt_config{};
    return TRT_OK;
}

int trt_config_set(trt_config* cfg, const char* key, const char* value) {
    if (!cfg || !key || !value) return fail(TRT_ERR_ARGUMENT, "null argument");
    return guarded([&]() {
        trt::apply_override(cfg->impl, key, value);
        return TRT_OK;
    });
}

char* trt_config_serialize(const trt_config* cfg) {
    if (!cfg) return nullptr;
    const std::string s = trt::serialize_config(cfg->impl);
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void trt_config_free(trt_config* cfg) { delete cfg; }

int trt_run(const trt_config* cfg, const char* command, const char* out_dir, trt_report** out) {
    if (!cfg || !command || !out_dir || !out) return fail(TRT_ERR_ARGUMENT, "null argument");
    if (!trt::is_known_command(command))
        return fail(TRT_ERR_COMMAND, std::string("unknown command: ") + command);
    return guarded([&]() {
        *out = new trt_report{trt::run_command(command, cfg->impl, out_dir)};
        return TRT_OK;
    });
}

int trt_report_metric_count(const trt_report* rep) {
    return rep ? static_cast<int>(rep->impl.metrics.size()) : 0;
}

const char* trt_report_metric_name(const trt_report* rep, int i) {
    if (!rep || i < 0 || i >= static_cast<int>(rep->impl.metrics.size())) return nullptr;
    return rep->impl.metrics[i].first.c_str();
}

double trt_report_metric_value(const trt_report* rep, int i) {
    if (!rep || i < 0 || i >= static_cast<int>(rep->impl.metrics.size())) return 0.0;
    return rep->impl.metrics[i].second;
}

int trt_report_check_count(const trt_report* rep) {
    return rep ? static_cast<int>(rep->impl.checks.size()) : 0;
}

const char* trt_report_check_name(const trt_report* rep, int i) {
    if (!rep || i < 0 || i >= static_cast<int>(rep->impl.checks.size())) return nullptr;
    return rep->impl.checks[i].name.c_str();
}

double trt_report_check_measured(const trt_report* rep, int i) {
    if (!rep || i < 0 || i >= static_cast<int>(rep->impl.checks.size())) return 0.0;
    return rep->impl.checks[i].measured;
}

double trt_report_check_threshold(const trt_report* rep, int i) {
    if (!rep || i < 0 || i >= static_cast<int>(rep->impl.checks.size())) return 0.0;
    return rep->impl.checks[i].threshold;
}

int trt_report_check_passed(const trt_report* rep, int i) {
    if (!rep || i < 0 || i >= static_cast<int>(rep->impl.checks.size())) return 0;
    return rep->impl.checks[i].pass ? 1 : 0;
}

int trt_report_passed(const trt_report* rep) { return rep && rep->impl.passed() ? 1 : 0; }

double trt_report_wall_seconds(const trt_report* rep) {
    return rep ? rep->impl.wall_seconds : 0.0;
}

const char* trt_report_config_hash(const trt_report* rep) {
    return rep ? rep->impl.hash.c_str() : nullptr;
}

const char* trt_report_command(const trt_report* rep) {
    return rep ? rep->impl.command.c_str() : nullptr;
}

void trt_report_free(trt_report* rep) { delete rep; }

void trt_string_free(char* s) { std::free(s); }

}  // extern "C"
