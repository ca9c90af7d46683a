#ifndef AUTHORSEP_H
#define AUTHORSEP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AsepStatus {
  ASEP_STATUS_OK = 0,
  ASEP_STATUS_NULL_POINTER = 1,
  ASEP_STATUS_INVALID_ARGUMENT = 2,
  ASEP_STATUS_IO = 3,
  ASEP_STATUS_PARSE = 4,
  ASEP_STATUS_MODEL = 5,
  ASEP_STATUS_UNKNOWN_CLUSTER = 6,
  ASEP_STATUS_NOTHING_ACCEPTED = 7,
  ASEP_STATUS_CORPUS_MISMATCH = 8,
  ASEP_STATUS_SESSION = 9,
  ASEP_STATUS_PANIC = 10,
} AsepStatus;

typedef enum AsepDecision {
  ASEP_DECISION_UNDECIDED = 0,
  ASEP_DECISION_ACCEPTED = 1,
  ASEP_DECISION_REJECTED = 2,
} AsepDecision;

typedef enum AsepVerdict {
  ASEP_VERDICT_ACCEPT = 0,
  ASEP_VERDICT_REJECT = 1,
} AsepVerdict;

typedef enum AsepMode {
  ASEP_MODE_BY_CITATIONS = 0,
  ASEP_MODE_BY_SIZE = 1,
  ASEP_MODE_BY_DISTANCE_TO_SELECTED = 2,
} AsepMode;

/**
 * A parsed, clustered corpus. Immutable; may be shared across threads.
 */
typedef struct AsepEngine AsepEngine;

/**
 * A review session over one engine's clusters. Not thread-safe.
 */
typedef struct AsepSession AsepSession;

/**
 * Summary of one cluster. Years are 0 when unknown.
 */
typedef struct AsepClusterInfo {
  size_t id;
  size_t papers;
  uint64_t citations;
  int32_t year_min;
  int32_t year_max;
  size_t representative;
} AsepClusterInfo;

/**
 * Merit indicators of an accepted selection. Years are 0 when unknown.
 */
typedef struct AsepMerit {
  size_t papers;
  uint64_t citations;
  double citations_per_paper;
  int32_t year_min;
  int32_t year_max;
  uint64_t h_index;
} AsepMerit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread, or null.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *asep_last_error(void);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` must be null or a string obtained from this library, not yet freed.
 */
void asep_string_free(char *s);

/**
 * log10 of the probability that two random subsets of sizes `n_i` and `n_j`
 * of `n` values share exactly `common` values.
 *
 * # Safety
 * `out` must point to writable memory for a `double`.
 */
enum AsepStatus asep_log_p_exact(uint64_t common,
                                 uint64_t n_i,
                                 uint64_t n_j,
                                 uint64_t n,
                                 double *out);

/**
 * As [`asep_log_p_exact`] for `common` or more shared values.
 *
 * # Safety
 * `out` must point to writable memory for a `double`.
 */
enum AsepStatus asep_log_p_tail(uint64_t common,
                                uint64_t n_i,
                                uint64_t n_j,
                                uint64_t n,
                                double *out);

/**
 * Parse and cluster export files.
 *
 * `query_name` (e.g. `"Soler, JM"`) and `config_path` (TOML) may be null.
 *
 * # Safety
 * `paths` must point to `n_paths` valid strings; `out` must be writable.
 */
enum AsepStatus asep_engine_open(const char *const *paths,
                                 size_t n_paths,
                                 const char *query_name,
                                 const char *config_path,
                                 struct AsepEngine **out);

/**
 * Parse and cluster an in-memory export with default settings.
 *
 * # Safety
 * `bytes` must point to `len` readable bytes; `out` must be writable.
 */
enum AsepStatus asep_engine_from_bytes(const uint8_t *bytes,
                                       size_t len,
                                       const char *query_name,
                                       struct AsepEngine **out);

/**
 * # Safety
 * `engine` must be null or a handle from this library, not yet freed.
 * Sessions opened on it stay valid.
 */
void asep_engine_free(struct AsepEngine *engine);

/**
 * Number of records, or 0 for a null handle.
 *
 * # Safety
 * `engine` must be null or a live handle.
 */
size_t asep_engine_record_count(const struct AsepEngine *engine);

/**
 * Number of clusters, or 0 for a null handle.
 *
 * # Safety
 * `engine` must be null or a live handle.
 */
size_t asep_engine_cluster_count(const struct AsepEngine *engine);

/**
 * Hex digest identifying the parsed input; free with [`asep_string_free`].
 *
 * # Safety
 * `engine` must be a live handle; `out` must be writable.
 */
enum AsepStatus asep_engine_corpus_hash(const struct AsepEngine *engine, char **out);

/**
 * # Safety
 * `engine` must be a live handle; `out` must be writable.
 */
enum AsepStatus asep_engine_cluster_info(const struct AsepEngine *engine,
                                         size_t id,
                                         struct AsepClusterInfo *out);

/**
 * Copy up to `capacity` member record ids of cluster `id` into `buffer`;
 * `len` receives the full member count, so a short buffer can be resized.
 *
 * # Safety
 * `buffer` must have room for `capacity` ids (may be null when 0);
 * `len` must be writable.
 */
enum AsepStatus asep_engine_cluster_members(const struct AsepEngine *engine,
                                            size_t id,
                                            size_t *buffer,
                                            size_t capacity,
                                            size_t *len);

/**
 * Closed (shortest-path) distance between records `i` and `j`.
 *
 * # Safety
 * `engine` must be a live handle; `out` must be writable.
 */
enum AsepStatus asep_engine_distance(const struct AsepEngine *engine,
                                     size_t i,
                                     size_t j,
                                     double *out);

/**
 * Start a review. A non-positive `cutoff` selects the default.
 *
 * # Safety
 * `engine` must be a live handle; `out` must be writable.
 */
enum AsepStatus asep_session_new(const struct AsepEngine *engine,
                                 double cutoff,
                                 struct AsepSession **out);

/**
 * Resume a saved session; fails unless it belongs to this engine's corpus
 * and its log replays to the stored decisions.
 *
 * # Safety
 * `engine` must be a live handle; `path` a valid string; `out` writable.
 */
enum AsepStatus asep_session_load(const struct AsepEngine *engine,
                                  const char *path,
                                  struct AsepSession **out);

/**
 * # Safety
 * `session` must be null or a handle from this library, not yet freed.
 */
void asep_session_free(struct AsepSession *session);

/**
 * Next undecided cluster in presentation order, or 0 when all are decided.
 *
 * # Safety
 * `session` must be a live handle; `out` must be writable.
 */
enum AsepStatus asep_session_next(const struct AsepSession *session, size_t *out);

/**
 * # Safety
 * `session` must be a live handle; `out` must be writable.
 */
enum AsepStatus asep_session_decision(const struct AsepSession *session,
                                      size_t id,
                                      enum AsepDecision *out);

/**
 * # Safety
 * `session` must be a live handle.
 */
enum AsepStatus asep_session_decide(struct AsepSession *session,
                                    size_t id,
                                    enum AsepVerdict verdict);

/**
 * # Safety
 * `session` must be a live handle.
 */
enum AsepStatus asep_session_undo(struct AsepSession *session, size_t id);

/**
 * # Safety
 * `session` must be a live handle.
 */
enum AsepStatus asep_session_set_mode(struct AsepSession *session, enum AsepMode mode);

/**
 * Distance from cluster `id` to the accepted clusters; fails with
 * `NothingAccepted` before the first acceptance.
 *
 * # Safety
 * `session` must be a live handle; `out` must be writable.
 */
enum AsepStatus asep_session_distance_to_selected(const struct AsepSession *session,
                                                  size_t id,
                                                  double *out);

/**
 * Reject every undecided cluster beyond the session cutoff.
 *
 * # Safety
 * `session` must be a live handle; `rejected` must be null or writable.
 */
enum AsepStatus asep_session_auto_reject(struct AsepSession *session, size_t *rejected);

/**
 * # Safety
 * `session` must be a live handle; `path` a valid string.
 */
enum AsepStatus asep_session_save(const struct AsepSession *session, const char *path);

/**
 * Write the accepted records as an export file and report their merit.
 * `path` may be null to only compute the merit.
 *
 * # Safety
 * `session` must be a live handle; `path` null or a valid string; `merit`
 * null or writable.
 */
enum AsepStatus asep_session_export(const struct AsepSession *session,
                                    const char *path,
                                    struct AsepMerit *merit);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AUTHORSEP_H */
