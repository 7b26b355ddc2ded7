#ifndef FIXPOINT_H
#define FIXPOINT_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FpStatus {
  FP_STATUS_OK = 0,
  FP_STATUS_NULL_ARGUMENT = 1,
  FP_STATUS_INVALID_UTF8 = 2,
  FP_STATUS_PARSE = 3,
  FP_STATUS_INVALID = 4,
  FP_STATUS_BOUND_NOT_FOUND = 5,
  FP_STATUS_VERIFY_FAILED = 6,
  FP_STATUS_PANIC = 7,
} FpStatus;

typedef enum FpRunTag {
  FP_RUN_TAG_ACCEPT = 0,
  FP_RUN_TAG_REJECT = 1,
  FP_RUN_TAG_OUT_OF_FUEL = 2,
} FpRunTag;

typedef enum FpVerdict {
  FP_VERDICT_SAT = 0,
  FP_VERDICT_UNSAT = 1,
} FpVerdict;

typedef struct FpCertificate FpCertificate;

typedef struct FpFormula FpFormula;

typedef struct FpProgram FpProgram;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *fp_last_error(void);

void fp_string_free(char *s);

enum FpStatus fp_program_parse_asm(const char *src, struct FpProgram **out);

void fp_program_free(struct FpProgram *p);

/**
 * Length in bytes of the program's serialized image.
 */
enum FpStatus fp_program_image_len(const struct FpProgram *p, size_t *out);

/**
 * Runs the program on `input[0..len]` for at most `fuel` steps.
 */
enum FpStatus fp_program_run(const struct FpProgram *p,
                             const uint8_t *input,
                             size_t len,
                             uint64_t fuel,
                             enum FpRunTag *tag,
                             uint64_t *steps);

enum FpStatus fp_formula_parse_dimacs(const char *src, struct FpFormula **out);

void fp_formula_free(struct FpFormula *f);

enum FpStatus fp_formula_counts(const struct FpFormula *f, uint32_t *num_vars, size_t *num_clauses);

enum FpStatus fp_formula_to_dimacs(const struct FpFormula *f, char **out);

/**
 * Decides the formula with the built-in DPLL solver.
 */
enum FpStatus fp_formula_solve(const struct FpFormula *f, enum FpVerdict *out);

/**
 * The formula satisfiable iff the program accepts within `t` steps.
 */
enum FpStatus fp_tableau_encode(const struct FpProgram *p, size_t t, struct FpFormula **out);

/**
 * Forges a certificate for `classifier`, searching bounds up to `t_cap`.
 * Returns [`FpStatus::BoundNotFound`] when no bound works.
 */
enum FpStatus fp_forge(const struct FpProgram *classifier,
                       size_t t_cap,
                       struct FpCertificate **out);

void fp_certificate_free(struct FpCertificate *c);

enum FpStatus fp_certificate_parse(const char *src, struct FpCertificate **out);

enum FpStatus fp_certificate_to_text(const struct FpCertificate *c, char **out);

/**
 * [`FpStatus::Ok`] if every check passes, else [`FpStatus::VerifyFailed`]
 * with the failing check in the error message.
 */
enum FpStatus fp_certificate_verify(const struct FpCertificate *c);

enum FpStatus fp_certificate_verdicts(const struct FpCertificate *c,
                                      enum FpVerdict *classifier,
                                      enum FpVerdict *oracle);

/**
 * Case analysis over the `k`-formula self-describing space. `all_fail`
 * receives 1 when every table misclassifies the fixed point.
 */
enum FpStatus fp_demo_minimal(uint32_t k, char **report, int32_t *all_fail);

/**
 * Diagonalizes `theta` (text syntax) and returns the certificate report.
 */
enum FpStatus fp_goedel_diagonalize(const char *theta, char **report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FIXPOINT_H */
