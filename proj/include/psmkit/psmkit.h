/* psmkit - trace-driven protocol reverse engineering.
 *
 * All functions returning int give back a psmkit_status code; on failure
 * psmkit_last_error() holds a message until the next call on the same
 * context. Contexts are not thread-safe; use one per thread.
 */
#ifndef PSMKIT_H
#define PSMKIT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum psmkit_status {
  PSMKIT_OK = 0,
  PSMKIT_ERR_CONFIG = 1,          /* bad parameter or config file */
  PSMKIT_ERR_INGEST = 2,          /* unreadable or malformed trace */
  PSMKIT_ERR_MINING = 3,          /* frequent item extraction failed */
  PSMKIT_ERR_FORMAT_CLUSTER = 4,  /* format clustering failed */
  PSMKIT_ERR_SESSION_CLUSTER = 5, /* session clustering failed */
  PSMKIT_ERR_PSM = 6,             /* state machine inference failed */
  PSMKIT_ERR_METRICS = 7,         /* evaluation against ground truth failed */
  PSMKIT_ERR_SYNTH = 8,           /* corpus generation failed */
  PSMKIT_ERR_IO = 9,              /* file system failure */
  PSMKIT_ERR_USAGE = 10,          /* null handle or argument */
  PSMKIT_ERR_INTERNAL = 11
} psmkit_status;

typedef struct psmkit_ctx psmkit_ctx;

psmkit_ctx *psmkit_ctx_new(void);
void psmkit_ctx_free(psmkit_ctx *ctx);

const char *psmkit_version(void);
const char *psmkit_status_name(int status);
/* Message of the last failed call on this context; empty string if none. */
const char *psmkit_last_error(const psmkit_ctx *ctx);

/* Replaces the context's pipeline parameters with the JSON object in `path`.
 * Only known parameter names are accepted. */
int psmkit_load_config(psmkit_ctx *ctx, const char *path);
/* Sets a single pipeline parameter by its JSON name, e.g. ("eps_max", "1.5"). */
int psmkit_set_param(psmkit_ctx *ctx, const char *key, const char *value);

/* Writes trace.jsonl + truth.json into out_dir. Each spec is either the name
 * of a built-in protocol ("tlsish", "smtpish") or a path to a spec JSON. */
int psmkit_gen(psmkit_ctx *ctx, const char *const *specs, size_t spec_count,
               int sessions_per_spec, double noise_rate, uint64_t seed, const char *out_dir);

/* Full inference over a capture. trace_format: "auto", "pcap" or "jsonl".
 * known_models and truth may be NULL. Artifacts land in out_dir; with truth
 * given, report.json is written as well. */
int psmkit_infer(psmkit_ctx *ctx, const char *trace_path, const char *trace_format,
                 const char *known_models, const char *truth, const char *out_dir);

/* Scores artifacts in artifacts_dir against ground truth and writes
 * report.json (to report_path, or into artifacts_dir when NULL). */
int psmkit_eval(psmkit_ctx *ctx, const char *artifacts_dir, const char *truth,
                const char *report_path);

/* Renders a psm_<k>.json artifact as Graphviz DOT. */
int psmkit_export_dot(psmkit_ctx *ctx, const char *psm_json, const char *dot_path);

#ifdef __cplusplus
}
#endif

#endif /* PSMKIT_H */
