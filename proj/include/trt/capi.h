/* C API of the transverse ray transform laboratory.
 *
 * All objects are opaque handles created and destroyed here. Functions
 * return TRT_OK (0) on success; on failure they return a nonzero status and
 * leave a message retrievable with trt_last_error(). Threshold failures
 * inside a command are not errors: the command succeeds and the report's
 * pass flag is 0.
 */
#ifndef TRT_CAPI_H
#define TRT_CAPI_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#define TRT_OK 0
#define TRT_ERR_ARGUMENT 1
#define TRT_ERR_CONFIG 2
#define TRT_ERR_COMMAND 3
#define TRT_ERR_IO 4
#define TRT_ERR_NUMERIC 5

typedef struct trt_config trt_config;
typedef struct trt_report trt_report;

const char* trt_version(void);

/* Message describing the most recent failure on this thread. */
const char* trt_last_error(void);

/* Configuration -------------------------------------------------------- */

/* Parses the line-oriented `key = value` text. On success stores a handle
 * in *out. Unknown keys, duplicates and constraint violations are reported
 * with line numbers in trt_last_error(). */
int trt_config_parse(const char* text, trt_config** out);
int trt_config_parse_file(const char* path, trt_config** out);

/* Creates a configuration with every key at its documented default. */
int trt_config_default(trt_config** out);

/* Applies one `key`, `value` override with full validation. */
int trt_config_set(trt_config* cfg, const char* key, const char* value);

/* Canonical serialization; free the returned buffer with trt_string_free. */
char* trt_config_serialize(const trt_config* cfg);

void trt_config_free(trt_config* cfg);

/* Commands -------------------------------------------------------------- */

/* Runs one of: forward, adjoint-test, spanning, inject-probe, dim2-probe,
 * support-exp, invert. CSV artifacts are written into out_dir. On success
 * stores a report handle in *out. */
int trt_run(const trt_config* cfg, const char* command, const char* out_dir, trt_report** out);

/* Reports --------------------------------------------------------------- */

int trt_report_metric_count(const trt_report* rep);
const char* trt_report_metric_name(const trt_report* rep, int i);
double trt_report_metric_value(const trt_report* rep, int i);

int trt_report_check_count(const trt_report* rep);
const char* trt_report_check_name(const trt_report* rep, int i);
double trt_report_check_measured(const trt_report* rep, int i);
double trt_report_check_threshold(const trt_report* rep, int i);
int trt_report_check_passed(const trt_report* rep, int i);

/* 1 when every check passed. */
int trt_report_passed(const trt_report* rep);
double trt_report_wall_seconds(const trt_report* rep);
const char* trt_report_config_hash(const trt_report* rep);
const char* trt_report_command(const trt_report* rep);

void trt_report_free(trt_report* rep);

void trt_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* TRT_CAPI_H */
