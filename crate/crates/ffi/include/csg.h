#ifndef CSG_H
#define CSG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Solver selection, mirroring the command line `--mode` values.
typedef enum csg_mode {
  CSG_MODE_AUTO = 0,
  CSG_MODE_EXACT2 = 1,
  CSG_MODE_A1 = 2,
  CSG_MODE_A2 = 3,
  CSG_MODE_PAIRING = 4,
  CSG_MODE_DP = 5,
  CSG_MODE_ORACLE = 6,
} csg_mode;

// Result code of every fallible call.
typedef enum csg_status {
  CSG_STATUS_OK = 0,
  CSG_STATUS_NULL_POINTER = 1,
  CSG_STATUS_INVALID_UTF8 = 2,
  // Malformed JSON or a document that does not describe a valid instance.
  CSG_STATUS_INVALID_INPUT = 3,
  CSG_STATUS_INVALID_ARGUMENT = 4,
  // A solver declined the input because it exceeds a search limit.
  CSG_STATUS_LIMIT_EXCEEDED = 5,
  // The chosen mode does not apply to the instance.
  CSG_STATUS_NOT_APPLICABLE = 6,
  // Buffer too small for the requested output.
  CSG_STATUS_BUFFER_TOO_SMALL = 7,
  // A solver produced an output that failed validation.
  CSG_STATUS_INVARIANT = 8,
  CSG_STATUS_PANIC = 9,
} csg_status;

// Opaque point set.
typedef struct csg_instance csg_instance;

// Opaque solver output.
typedef struct csg_solution csg_solution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread. Valid until the next failing
// call on the same thread; empty if nothing has failed.
const char *csg_last_error(void);

// Parses an instance document (`{"k": .., "points": [{"x", "y", "colors"}]}`).
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum csg_status csg_instance_from_json(const char *json, struct csg_instance **out);

// # Safety
// `inst` must come from [`csg_instance_from_json`] and not be used afterwards.
void csg_instance_free(struct csg_instance *inst);

// Number of points, 0 for a null handle.
//
// # Safety
// `inst` must be null or a live instance handle.
size_t csg_instance_point_count(const struct csg_instance *inst);

// Number of colors `k`, 0 for a null handle.
//
// # Safety
// `inst` must be null or a live instance handle.
size_t csg_instance_color_count(const struct csg_instance *inst);

// Serializes the instance; free the result with [`csg_string_free`].
//
// # Safety
// `inst` must be null or a live instance handle.
char *csg_instance_to_json(const struct csg_instance *inst);

// Runs a solver with default limits. The result has been validated.
//
// # Safety
// `inst` must be a live instance handle and `out` a valid pointer.
enum csg_status csg_solve(const struct csg_instance *inst,
                          enum csg_mode mode,
                          struct csg_solution **out);

// # Safety
// `sol` must come from [`csg_solve`] and not be used afterwards.
void csg_solution_free(struct csg_solution *sol);

// Total edge length, NaN for a null handle.
//
// # Safety
// `sol` must be null or a live solution handle.
double csg_solution_cost(const struct csg_solution *sol);

// Certified approximation ratio, NaN when the algorithm has none.
//
// # Safety
// `sol` must be null or a live solution handle.
double csg_solution_ratio_bound(const struct csg_solution *sol);

// # Safety
// `sol` must be null or a live solution handle.
size_t csg_solution_edge_count(const struct csg_solution *sol);

// Copies the edges as index pairs `a0, b0, a1, b1, ...` into `buf`, which must
// hold `2 * csg_solution_edge_count(sol)` entries.
//
// # Safety
// `sol` must be a live solution handle and `buf` valid for `cap` writes.
enum csg_status csg_solution_edges(const struct csg_solution *sol, size_t *buf, size_t cap);

// Serializes the solution; free the result with [`csg_string_free`].
//
// # Safety
// `sol` must be null or a live solution handle.
char *csg_solution_to_json(const struct csg_solution *sol);

// # Safety
// `s` must be null or a string returned by this library.
void csg_string_free(char *s);

// Whether the `count` edges in `pairs` (`a0, b0, ...`) connect every color
// class: 1 if so, 0 if not, -1 on a bad argument.
//
// # Safety
// `inst` must be a live instance handle and `pairs` valid for `2 * count` reads.
int csg_is_csg(const struct csg_instance *inst, const size_t *pairs, size_t count);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CSG_H */
