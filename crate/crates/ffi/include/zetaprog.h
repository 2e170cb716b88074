#ifndef ZETAPROG_H
#define ZETAPROG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ZpStatus {
  ZP_STATUS_OK = 0,
  ZP_STATUS_NULL_POINTER = 1,
  ZP_STATUS_INVALID_UTF8 = 2,
  ZP_STATUS_DOMAIN = 3,
  ZP_STATUS_OUT_OF_RANGE = 4,
  ZP_STATUS_RESOURCE = 5,
  ZP_STATUS_PRECISION = 6,
  ZP_STATUS_CONTRACT = 7,
  ZP_STATUS_PARSE = 8,
  ZP_STATUS_IO = 9,
  ZP_STATUS_PANIC = 10,
} ZpStatus;

/*
 Sieved divisor-count table.
 */
typedef struct ZpDivisorTable ZpDivisorTable;

typedef struct ZpComplex {
  double re;
  double im;
} ZpComplex;

/*
 Dirichlet approximant `p/q` with `|qα − p| ≤ 1/√M`.
 */
typedef struct ZpRationalApprox {
  int64_t p;
  int64_t q;
  double err;
  /*
   Nonzero when the fraction is an intermediate rather than a convergent.
   */
  int32_t intermediate;
} ZpRationalApprox;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *zp_version(void);

/*
 Copy the calling thread's last error message into `buf` (truncated to
 `len` bytes, NUL included). Returns the length needed including the NUL.

 # Safety
 `buf` must be null or valid for `len` bytes.
 */
uintptr_t zp_last_error(char *buf, uintptr_t len);

/*
 Sieve `d(n)` for `n ≤ limit`.

 # Safety
 `out` must be valid for writes.
 */
enum ZpStatus zp_divisor_table_new(uint64_t limit, struct ZpDivisorTable **out);

/*
 # Safety
 `path` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum ZpStatus zp_divisor_table_load(const char *path, struct ZpDivisorTable **out);

/*
 # Safety
 `table` must come from this library; `path` must be NUL-terminated.
 */
enum ZpStatus zp_divisor_table_save(const struct ZpDivisorTable *table_, const char *path);

/*
 Release a table. Null is ignored.

 # Safety
 `table` must come from this library and not be used afterwards.
 */
void zp_divisor_table_free(struct ZpDivisorTable *table);

/*
 # Safety
 Pointers must be valid.
 */
enum ZpStatus zp_divisor_table_limit(const struct ZpDivisorTable *table_, uint64_t *out);

/*
 `d(n)` for `1 ≤ n ≤ limit`.

 # Safety
 Pointers must be valid.
 */
enum ZpStatus zp_divisor_count(const struct ZpDivisorTable *table_, uint64_t n, uint32_t *out);

/*
 `D(x) = Σ_{n≤x} d(n)`.

 # Safety
 Pointers must be valid.
 */
enum ZpStatus zp_divisor_sum(const struct ZpDivisorTable *table_, double x, uint64_t *out);

/*
 `|ζ(½+it)|²`.

 # Safety
 `out` must be valid for writes.
 */
enum ZpStatus zp_zeta_abs_sq(double t, double *out);

/*
 `Σ_{m≤M} d(m) e(αm)` summed term by term from the table.

 # Safety
 Pointers must be valid.
 */
enum ZpStatus zp_expsum_direct(const struct ZpDivisorTable *table_,
                               uint64_t m,
                               double alpha,
                               struct ZpComplex *out);

/*
 Same sum by the hyperbola method; needs no table.

 # Safety
 `out` must be valid for writes.
 */
enum ZpStatus zp_expsum_hyperbola(uint64_t m, double alpha, struct ZpComplex *out);

/*
 `Σ_{m≤x} d(m) e(mr/s)` in closed form over residues mod `s`.

 # Safety
 Pointers must be valid.
 */
enum ZpStatus zp_expsum_rational(const struct ZpDivisorTable *table_,
                                 double x,
                                 int64_t r,
                                 uint64_t s,
                                 struct ZpComplex *out);

/*
 Dirichlet approximant of the real expression `alpha` (for example
 `"exp(2*pi)"`) with `q ≤ √M`. `bits = 0` uses the default precision.

 # Safety
 `alpha` must be NUL-terminated; `out` must be valid for writes.
 */
enum ZpStatus zp_dirichlet_approx(const char *alpha,
                                  uint64_t m,
                                  uintptr_t bits,
                                  struct ZpRationalApprox *out);

/*
 `Σ |ζ(½ + i(an+b))|²` over `0 < an+b ≤ T`.

 # Safety
 `out` must be valid for writes.
 */
enum ZpStatus zp_discrete_moment(double a, double b, double t_max, double *out);

/*
 The same moment for `a = 2πk0 / log(r/s)`.

 # Safety
 `out` must be valid for writes.
 */
enum ZpStatus zp_discrete_moment_rational(uint64_t r,
                                          uint64_t s,
                                          uint64_t k0,
                                          double b,
                                          double t_max,
                                          double *out);

/*
 Generic main term `(T/a)(log(T/2π) + 2γ − 1)`, or `(T/a) log T` when
 `leading_only` is nonzero.

 # Safety
 `out` must be valid for writes.
 */
enum ZpStatus zp_main_term_generic(double a, double t_max, int32_t leading_only, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ZETAPROG_H */
