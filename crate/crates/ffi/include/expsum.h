#ifndef EXPSUM_H
#define EXPSUM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ExpsumStatus {
  EXPSUM_STATUS_OK = 0,
  EXPSUM_STATUS_NULL_POINTER = 1,
  EXPSUM_STATUS_INVALID_PARAMETER = 2,
  EXPSUM_STATUS_NOT_ADMISSIBLE = 3,
  EXPSUM_STATUS_DEGENERATE = 4,
  EXPSUM_STATUS_TOO_SHORT = 5,
  EXPSUM_STATUS_PARSE = 6,
  EXPSUM_STATUS_NO_COUNTEREXAMPLE = 7,
  EXPSUM_STATUS_BUFFER_TOO_SMALL = 8,
  EXPSUM_STATUS_INTERNAL = 99,
} ExpsumStatus;

// Opaque phase sequence.
typedef struct ExpsumSequence ExpsumSequence;

typedef struct ExpsumAdmissibility {
  bool admissible;
  bool monotone;
  double theta_star;
  // 1-based index of the first decreasing gap pair, 0 when none.
  size_t first_violation;
} ExpsumAdmissibility;

typedef struct ExpsumBoundLadder {
  double theta;
  double bound_landau;
  double bound_kuzmin;
  double bound_simple;
  double bound_two_over_pi_theta;
  double bound_false;
} ExpsumBoundLadder;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or NULL.
// The pointer stays valid until the next failing call on the same thread.
const char *expsum_last_error_message(void);

// # Safety
// `phases` must point to `n` readable doubles; `out` must be writable.
enum ExpsumStatus expsum_sequence_new(const double *phases, size_t n, struct ExpsumSequence **out);

// # Safety
// `seq` must come from this library and not have been freed. NULL is ignored.
void expsum_sequence_free(struct ExpsumSequence *seq);

// Number of phases, 0 for NULL.
//
// # Safety
// `seq` must be NULL or a live handle.
size_t expsum_sequence_len(const struct ExpsumSequence *seq);

// Copies the phases into `buf`. Fails with `BUFFER_TOO_SMALL` when `cap` is
// less than the length, which is always written to `len_out` when non-NULL.
//
// # Safety
// `buf` must have room for `cap` doubles.
enum ExpsumStatus expsum_sequence_phases(const struct ExpsumSequence *seq,
                                         double *buf,
                                         size_t cap,
                                         size_t *len_out);

// # Safety
// `re` and `im` must be writable.
enum ExpsumStatus expsum_exp_sum(const struct ExpsumSequence *seq, double *re, double *im);

// # Safety
// `out` must be writable.
enum ExpsumStatus expsum_check_admissible(const struct ExpsumSequence *seq,
                                          double theta,
                                          struct ExpsumAdmissibility *out);

// # Safety
// `out` must be writable.
enum ExpsumStatus expsum_bound_ladder(double theta, struct ExpsumBoundLadder *out);

// Bound report as a JSON string; release it with `expsum_string_free`.
//
// # Safety
// `out` must be writable.
enum ExpsumStatus expsum_bound_report_json(const struct ExpsumSequence *seq,
                                           double theta,
                                           char **out);

// # Safety
// `s` must be NULL or a string returned by this library.
void expsum_string_free(char *s);

// Attaining sequence for `theta = p/q` with `p`, `q` odd; `p = 1, q = 2`
// gives the half-turn witness.
//
// # Safety
// `out` must be writable.
enum ExpsumStatus expsum_extremal(uint64_t p, uint64_t q, struct ExpsumSequence **out);

// Like `expsum_extremal`, with the fraction given as text such as `"7/23"`.
//
// # Safety
// `text` must be a NUL-terminated string.
enum ExpsumStatus expsum_extremal_str(const char *text, struct ExpsumSequence **out);

// # Safety
// `out` must be writable.
enum ExpsumStatus expsum_refined_bound(const struct ExpsumSequence *seq, double *out);

// Sequence admissible for `theta` whose sum exceeds `1/(pi theta) + 1`.
// `search_below` also accepts witnesses built for a smaller theta.
//
// # Safety
// `witness` and `margin` must be writable.
enum ExpsumStatus expsum_refute(double theta,
                                bool search_below,
                                struct ExpsumSequence **witness,
                                double *margin);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EXPSUM_H */
