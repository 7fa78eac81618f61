#ifndef QLOCAL_H
#define QLOCAL_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum QlFtMode {
  QL_FT_MODE_THREE_D = 0,
  QL_FT_MODE_QUASI2D = 1,
} QlFtMode;

typedef enum QlMode {
  QL_MODE_TWO_D = 0,
  QL_MODE_THREE_D = 1,
} QlMode;

typedef enum QlStatus {
  QL_STATUS_OK = 0,
  QL_STATUS_NULL_POINTER = 1,
  QL_STATUS_INVALID_UTF8 = 2,
  QL_STATUS_PARSE = 3,
  QL_STATUS_PRECONDITION = 4,
  QL_STATUS_INTERNAL = 5,
  QL_STATUS_BUFFER_TOO_SMALL = 6,
} QlStatus;

typedef struct QlCircuit QlCircuit;

typedef struct QlLocalized QlLocalized;

typedef struct QlRouting QlRouting;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *ql_version(void);

/**
 * Message of the last failed call on this thread ("" after a success).
 */
enum QlStatus ql_last_error(char *buf, size_t len, size_t *needed);

enum QlStatus ql_circuit_from_json(const char *json, struct QlCircuit **out);

void ql_circuit_free(struct QlCircuit *c);

enum QlStatus ql_circuit_num_qubits(const struct QlCircuit *c, size_t *out);

enum QlStatus ql_circuit_depth(const struct QlCircuit *c, size_t *out);

enum QlStatus ql_localize(const struct QlCircuit *c, enum QlMode mode, struct QlLocalized **out);

enum QlStatus ql_localized_from_json(const char *json, struct QlLocalized **out);

void ql_localized_free(struct QlLocalized *lc);

enum QlStatus ql_localized_num_qubits(const struct QlLocalized *lc, size_t *out);

enum QlStatus ql_localized_depth(const struct QlLocalized *lc, size_t *out);

/**
 * Writes the localized document as JSON. Call with a null buffer to learn the size.
 */
enum QlStatus ql_localized_to_json(const struct QlLocalized *lc,
                                   char *buf,
                                   size_t len,
                                   size_t *needed);

/**
 * Sets `*equivalent` when the localized circuit is local and reproduces the
 * source's outcome law and logical output state exactly.
 */
enum QlStatus ql_verify(const struct QlCircuit *src,
                        const struct QlLocalized *lc,
                        bool *equivalent);

/**
 * Routes `npairs` pairs given as `coords[6*i .. 6*i+6] = x0 y0 z0 x1 y1 z1`.
 */
enum QlStatus ql_route(enum QlMode mode,
                       uint32_t l,
                       const uint32_t *coords,
                       size_t npairs,
                       struct QlRouting **out);

void ql_routing_free(struct QlRouting *r);

size_t ql_routing_num_paths(const struct QlRouting *r);

/**
 * Number of edges on path `i`, or 0 if out of range.
 */
size_t ql_routing_path_length(const struct QlRouting *r, size_t i);

size_t ql_routing_max_length(const struct QlRouting *r);

bool ql_bus_condition_holds(uint64_t delta, uint64_t r);

/**
 * Closed-form fault-tolerant qubit total for n data qubits, side l, bus width m.
 */
enum QlStatus ql_ft_total_qubits(enum QlFtMode mode,
                                 uint64_t n,
                                 uint64_t l,
                                 uint64_t m,
                                 uint64_t *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* QLOCAL_H */
