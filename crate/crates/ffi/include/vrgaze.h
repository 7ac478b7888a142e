#ifndef VRGAZE_H
#define VRGAZE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum VgStatus {
  VG_STATUS_OK = 0,
  VG_STATUS_NULL_POINTER = 1,
  VG_STATUS_PARSE = 2,
  VG_STATUS_VALIDATION = 3,
  VG_STATUS_CONFIG = 4,
  VG_STATUS_NOT_FOUND = 5,
  VG_STATUS_DOMAIN = 6,
  VG_STATUS_NO_DATA = 7,
  VG_STATUS_INTERNAL = 8,
} VgStatus;

typedef enum VgZone {
  VG_ZONE_TOP_LEFT = 0,
  VG_ZONE_TOP = 1,
  VG_ZONE_TOP_RIGHT = 2,
  VG_ZONE_LEFT = 3,
  VG_ZONE_CENTER = 4,
  VG_ZONE_RIGHT = 5,
  VG_ZONE_BOTTOM_LEFT = 6,
  VG_ZONE_BOTTOM = 7,
  VG_ZONE_BOTTOM_RIGHT = 8,
} VgZone;

/**
 * Analysis results with the overall evaluation.
 */
typedef struct VgResults VgResults;

/**
 * Parsed, validated test script.
 */
typedef struct VgScript VgScript;

/**
 * Parsed, validated session.
 */
typedef struct VgSession VgSession;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread, or an empty
 * string. Valid until the next call into this library on the same thread.
 */
const char *vg_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void vg_string_free(char *s);

/**
 * # Safety
 * `data` must point to `len` readable bytes; `out` must be writable.
 */
enum VgStatus vg_session_parse(const uint8_t *data, size_t len, struct VgSession **out);

/**
 * # Safety
 * `session` must be null or a handle from this library, not yet freed.
 */
void vg_session_free(struct VgSession *session);

/**
 * Number of frames in the session, or 0 for a null handle.
 *
 * # Safety
 * `session` must be null or a live handle.
 */
size_t vg_session_frame_count(const struct VgSession *session);

/**
 * Canonical session JSON.
 *
 * # Safety
 * `session` must be a live handle; `out` must be writable.
 */
enum VgStatus vg_session_to_json(const struct VgSession *session, char **out);

/**
 * # Safety
 * `data` must point to `len` readable bytes; `out` must be writable.
 */
enum VgStatus vg_script_parse(const uint8_t *data, size_t len, struct VgScript **out);

/**
 * # Safety
 * `script` must be null or a handle from this library, not yet freed.
 */
void vg_script_free(struct VgScript *script);

/**
 * Simulates a session. `model` is a model file (`{"gazer": ..., "sim": ...}`).
 *
 * # Safety
 * `script` must be a live handle, `model` must point to `model_len`
 * readable bytes and `out` must be writable.
 */
enum VgStatus vg_simulate(const struct VgScript *script,
                          const uint8_t *model,
                          size_t model_len,
                          uint64_t seed,
                          struct VgSession **out);

/**
 * # Safety
 * `session` and `script` must be live handles; `out` must be writable.
 */
enum VgStatus vg_analyze(const struct VgSession *session,
                         const struct VgScript *script,
                         struct VgResults **out);

/**
 * # Safety
 * `results` must be null or a handle from this library, not yet freed.
 */
void vg_results_free(struct VgResults *results);

/**
 * Canonical results JSON, as written by the `analyze` command.
 *
 * # Safety
 * `results` must be a live handle; `out` must be writable.
 */
enum VgStatus vg_results_to_json(const struct VgResults *results, char **out);

/**
 * Overall score in `[0, 100]`. Fails with `NoData` when nothing was tested.
 *
 * # Safety
 * `results` must be a live handle; `out` must be writable.
 */
enum VgStatus vg_results_total(const struct VgResults *results, double *out);

/**
 * Renders the HTML report and its summary JSON.
 *
 * # Safety
 * `session` and `results` must be live handles; both out-pointers must be
 * writable.
 */
enum VgStatus vg_report(const struct VgSession *session,
                        const struct VgResults *results,
                        char **html_out,
                        char **summary_out);

/**
 * Scores a responses file and returns the scores JSON.
 *
 * # Safety
 * `data` must point to `len` readable bytes; `out` must be writable.
 */
enum VgStatus vg_score_questionnaire(const uint8_t *data, size_t len, char **out);

/**
 * Angular speed in degrees per second.
 *
 * # Safety
 * `out` must be writable.
 */
enum VgStatus vg_angular_speed(double delta_deg, double delta_t_s, double *out);

/**
 * Zone of a normalized screen point. Fails with `Domain` outside `[0, 1]²`.
 *
 * # Safety
 * `out` must be writable.
 */
enum VgStatus vg_classify_zone(double u, double v, enum VgZone *out);

/**
 * Name of a zone, e.g. `"TopLeft"`. Static storage; do not free.
 */
const char *vg_zone_name(enum VgZone zone);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VRGAZE_H */
