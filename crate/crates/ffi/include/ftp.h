/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef FTP_H
#define FTP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FtpAlgorithm {
  FTP_ALGORITHM_AUTO = 0,
  FTP_ALGORITHM_BIPATH = 1,
  FTP_ALGORITHM_DAG = 2,
  FTP_ALGORITHM_SRP = 3,
  FTP_ALGORITHM_APPROX_K = 4,
  FTP_ALGORITHM_APPROX_K1 = 5,
  FTP_ALGORITHM_ORACLE = 6,
} FtpAlgorithm;

typedef enum FtpFormat {
  FTP_FORMAT_NATIVE = 0,
  FTP_FORMAT_DIMACS = 1,
} FtpFormat;

typedef enum FtpStatus {
  FTP_STATUS_OK = 0,
  FTP_STATUS_INFEASIBLE = 1,
  /**
   * Malformed input or an instance that fails validation.
   */
  FTP_STATUS_INVALID_INPUT = 2,
  /**
   * The instance is outside the class the algorithm handles.
   */
  FTP_STATUS_NOT_APPLICABLE = 3,
  FTP_STATUS_CAPS_EXCEEDED = 4,
  FTP_STATUS_NULL_POINTER = 5,
  FTP_STATUS_PANIC = 6,
} FtpStatus;

typedef struct FtpInstance FtpInstance;

typedef struct FtpSolution FtpSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. Valid until
 * the next library call on the same thread.
 */
const char *ftp_last_error(void);

struct FtpInstance *ftp_instance_new(bool directed,
                                     size_t vertex_count,
                                     size_t s,
                                     size_t t,
                                     size_t k);

/**
 * Appends an edge; its id is written to `out_id` when non-null.
 *
 * # Safety
 * `instance` must come from this library and not be freed.
 */
enum FtpStatus ftp_instance_add_edge(struct FtpInstance *instance,
                                     size_t u,
                                     size_t v,
                                     int64_t w,
                                     bool faulty,
                                     size_t *out_id);

/**
 * Parses a NUL-terminated document into a new instance.
 *
 * # Safety
 * `text` must be a valid C string and `out` writable.
 */
enum FtpStatus ftp_instance_parse(const char *text,
                                  enum FtpFormat format,
                                  struct FtpInstance **out);

/**
 * # Safety
 * `instance` must come from this library or be null.
 */
size_t ftp_instance_edge_count(const struct FtpInstance *instance);

/**
 * # Safety
 * `instance` must come from this library or be null; it is invalid afterwards.
 */
void ftp_instance_free(struct FtpInstance *instance);

/**
 * Solves with the chosen algorithm and default caps.
 *
 * # Safety
 * `instance` must come from this library and `out` be writable.
 */
enum FtpStatus ftp_solve(const struct FtpInstance *instance,
                         enum FtpAlgorithm algorithm,
                         struct FtpSolution **out);

/**
 * # Safety
 * `solution` must come from this library.
 */
int64_t ftp_solution_cost(const struct FtpSolution *solution);

/**
 * # Safety
 * `solution` must come from this library.
 */
size_t ftp_solution_edge_count(const struct FtpSolution *solution);

/**
 * Sorted edge ids, valid while the solution lives.
 *
 * # Safety
 * `solution` must come from this library.
 */
const size_t *ftp_solution_edges(const struct FtpSolution *solution);

/**
 * Name of the algorithm that produced the solution.
 *
 * # Safety
 * `solution` must come from this library.
 */
const char *ftp_solution_solver(const struct FtpSolution *solution);

/**
 * True for a proven optimum. Otherwise the guaranteed ratio is written to
 * `numerator`/`denominator` when the solution carries one (0/0 if not).
 *
 * # Safety
 * `solution` must come from this library; the out pointers may be null.
 */
bool ftp_solution_is_optimal(const struct FtpSolution *solution,
                             uint64_t *numerator,
                             uint64_t *denominator);

/**
 * # Safety
 * `solution` must come from this library or be null; it is invalid afterwards.
 */
void ftp_solution_free(struct FtpSolution *solution);

/**
 * Whether the edge ids survive every failure scenario.
 *
 * # Safety
 * `edges` must point to `len` ids (or be null with `len == 0`).
 */
enum FtpStatus ftp_is_feasible(const struct FtpInstance *instance,
                               const size_t *edges,
                               size_t len,
                               bool *out);

/**
 * Optimal value of the fractional relaxation as an exact rational string
 * such as `"4/3"`.
 *
 * # Safety
 * `instance` must come from this library and `out` be writable.
 */
enum FtpStatus ftp_frac_value(const struct FtpInstance *instance, char **out);

/**
 * Integral and fractional optimum of `d` parallel faulty unit edges with
 * budget `k`, and their ratio.
 *
 * # Safety
 * Out pointers must be writable.
 */
enum FtpStatus ftp_gap(size_t d, size_t k, int64_t *integral, char **fractional, char **ratio);

/**
 * # Safety
 * `s` must be a string returned by this library, or null.
 */
void ftp_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FTP_H */
