#ifndef CDPIC_H
#define CDPIC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Values 0 to 5 match the command-line exit codes.
 */
typedef enum CdpicStatus {
  CDPIC_STATUS_OK = 0,
  CDPIC_STATUS_UNSATISFIED = 1,
  CDPIC_STATUS_INVALID_INPUT = 2,
  CDPIC_STATUS_NOT_CONSTRUCTIBLE = 3,
  CDPIC_STATUS_CONSTRAINT_VIOLATION = 4,
  CDPIC_STATUS_CAP_EXCEEDED = 5,
  CDPIC_STATUS_NULL_POINTER = 6,
  CDPIC_STATUS_BUFFER_TOO_SMALL = 7,
  CDPIC_STATUS_PANIC = 8,
} CdpicStatus;

/**
 * Opaque schedule handle.
 */
typedef struct CdpicSchedule CdpicSchedule;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL if it succeeded.
 * The pointer stays valid until the next call into this library from the
 * same thread.
 */
const char *cdpic_last_error(void);

/**
 * Builds and verifies the schedule for `(m, c, k, s)`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum CdpicStatus cdpic_construct(uintptr_t m,
                                 uintptr_t c,
                                 uintptr_t k,
                                 uintptr_t s,
                                 struct CdpicSchedule **out);

/**
 * Parses a schedule document. Only the structure is checked here; run
 * `cdpic_schedule_verify` to check the decentralized constraint.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer to
 * writable storage for one handle.
 */
enum CdpicStatus cdpic_schedule_from_json(const char *json, struct CdpicSchedule **out);

/**
 * Renders the schedule as a JSON document. Release the string with
 * `cdpic_string_free`.
 *
 * # Safety
 * `schedule` must be a live handle and `out` a valid pointer.
 */
enum CdpicStatus cdpic_schedule_to_json(const struct CdpicSchedule *schedule, char **out);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library and not yet freed.
 */
void cdpic_string_free(char *s);

/**
 * Number of transmissions; 0 for a NULL handle.
 *
 * # Safety
 * `schedule` must be NULL or a live handle.
 */
uintptr_t cdpic_schedule_len(const struct CdpicSchedule *schedule);

/**
 * Copies transmission `index` out of the schedule. The payload message
 * indices are written ascending to `payload`; `payload_len` always receives
 * the full count, so a call with `capacity` 0 can be used to size the
 * buffer.
 *
 * # Safety
 * `schedule` must be a live handle, `transmitter` and `payload_len` valid
 * pointers, and `payload` valid for `capacity` writes (or NULL when
 * `capacity` is 0).
 */
enum CdpicStatus cdpic_schedule_transmission(const struct CdpicSchedule *schedule,
                                             uintptr_t index,
                                             uintptr_t *transmitter,
                                             uintptr_t *payload,
                                             uintptr_t capacity,
                                             uintptr_t *payload_len);

/**
 * Decodes the schedule at every client. Returns `Ok` when each client gets
 * its demand, `Unsatisfied` when some do not, and `ConstraintViolation`
 * when a transmitter sends a message outside its window. `served_total`
 * may be NULL; otherwise it receives the number of messages decoded across
 * all clients.
 *
 * # Safety
 * `schedule` must be a live handle and `served_total` NULL or valid.
 */
enum CdpicStatus cdpic_schedule_verify(const struct CdpicSchedule *schedule,
                                       bool progressive,
                                       uintptr_t *served_total);

/**
 * Exhaustive minimum schedule length with the default search caps.
 *
 * # Safety
 * `n_min` must be a valid pointer.
 */
enum CdpicStatus cdpic_oracle_min(uintptr_t m,
                                  uintptr_t c,
                                  uintptr_t k,
                                  uintptr_t s,
                                  bool progressive,
                                  uintptr_t *n_min);

/**
 * Uncoded baseline length, constructed length and the percentage of
 * baseline broadcasts the construction removes.
 *
 * # Safety
 * The three output pointers must be valid.
 */
enum CdpicStatus cdpic_efficiency(uintptr_t m,
                                  uintptr_t c,
                                  uintptr_t k,
                                  uintptr_t s,
                                  uintptr_t *n_baseline,
                                  uintptr_t *n_achieved,
                                  double *efficiency_pct);

/**
 * # Safety
 * `schedule` must be NULL or a handle from this library not yet freed.
 */
void cdpic_schedule_free(struct CdpicSchedule *schedule);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CDPIC_H */
