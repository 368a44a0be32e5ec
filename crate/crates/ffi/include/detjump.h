#ifndef DETJUMP_H
#define DETJUMP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DjShape {
  DjShape_Gaussian = 0,
  DjShape_Sech = 1,
  DjShape_Lorentzian = 2,
} DjShape;

typedef enum DjStatus {
  DjStatus_Ok = 0,
  DjStatus_NullPointer = 1,
  DjStatus_InvalidArgument = 2,
  DjStatus_IntegrationFailed = 3,
  DjStatus_Panic = 4,
} DjStatus;

/**
 * Opaque drive handle.
 */
typedef struct DjDrive DjDrive;

/**
 * Integration window and tolerance. `initial_step` seeds the adaptive step size.
 */
typedef struct DjIntegration {
  double t_start;
  double t_end;
  double initial_step;
  double tolerance;
} DjIntegration;

typedef struct DjComplex {
  double re;
  double im;
} DjComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length excluding the NUL,
 * or 0 when there is no error.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
uintptr_t dj_last_error_message(char *buf, uintptr_t len);

/**
 * Default integration settings: window [-20, 20], tolerance 1e-10.
 */
struct DjIntegration dj_integration_default(void);

/**
 * Creates a drive with coupling `omega0 * f(t / width)` and detuning
 * `+delta0` before / `-delta0` after `t = 0` (a tanh ramp of time `tau_jump`
 * when `tau_jump > 0`).
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum DjStatus dj_drive_new(enum DjShape shape,
                           double width,
                           double omega0,
                           double delta0,
                           double tau_jump,
                           struct DjDrive **out);

/**
 * Releases a drive. Null is ignored.
 *
 * # Safety
 * `drive` must come from [`dj_drive_new`] and not be used afterwards.
 */
void dj_drive_free(struct DjDrive *drive);

/**
 * Final populations `[p1, p2]` starting from basis state `initial` (1 or 2).
 *
 * # Safety
 * `drive` and `spec` must be valid; `out` must hold 2 doubles.
 */
enum DjStatus dj_simulate_two_level(const struct DjDrive *drive,
                                    const struct DjIntegration *spec,
                                    uint32_t initial,
                                    double *out);

/**
 * Final populations `[p1, p2, p3]` of the three-state chain starting from
 * basis state `initial` (1 to 3).
 *
 * # Safety
 * `drive` and `spec` must be valid; `out` must hold 3 doubles.
 */
enum DjStatus dj_simulate_three_level(const struct DjDrive *drive,
                                      const struct DjIntegration *spec,
                                      uint32_t initial,
                                      double *out);

/**
 * `Omega0^2 / (Omega0^2 + Delta0^2)`.
 *
 * # Safety
 * `out` must be valid for one double.
 */
enum DjStatus dj_analytic_p2(double omega0, double delta0, double *out);

/**
 * Closed-form three-state table, row-major: `out[3*(i-1) + (j-1)] = P(i -> j)`.
 *
 * # Safety
 * `out` must hold 9 doubles.
 */
enum DjStatus dj_analytic_table(double omega0, double delta0, double *out);

/**
 * Cayley–Klein pair `(a, b)` of the integrated two-level propagator,
 * written to `out[0] = a`, `out[1] = b`.
 *
 * # Safety
 * `drive` and `spec` must be valid; `out` must hold 2 complex values.
 */
enum DjStatus dj_numeric_cayley_klein(const struct DjDrive *drive,
                                      const struct DjIntegration *spec,
                                      struct DjComplex *out);

/**
 * Three-state propagator built from `(a, b)`, row-major into 9 complex values.
 *
 * # Safety
 * `out` must hold 9 complex values.
 */
enum DjStatus dj_majorana_u3(struct DjComplex a, struct DjComplex b, struct DjComplex *out);

/**
 * Largest elementwise distance between the integrated three-state propagator
 * and the lift of the integrated two-level one.
 *
 * # Safety
 * `drive` and `spec` must be valid; `out` must be valid for one double.
 */
enum DjStatus dj_majorana_residual(const struct DjDrive *drive,
                                   const struct DjIntegration *spec,
                                   double *out);

/**
 * Library version as a static NUL-terminated string.
 */
const char *dj_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DETJUMP_H */
