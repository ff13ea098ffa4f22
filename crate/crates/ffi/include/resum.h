#ifndef RESUM_H
#define RESUM_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define RESUM_SIDE_OFF 0

#define RESUM_SIDE_UPPER 1

#define RESUM_SIDE_LOWER 2

#define RESUM_LATERAL_DIRECT 0

#define RESUM_LATERAL_UPPER 1

#define RESUM_LATERAL_LOWER 2

#define RESUM_LATERAL_MEDIAN 3

#define RESUM_KIND_FINITE_RADIUS 0

#define RESUM_KIND_ENTIRE 1

#define RESUM_KIND_BOREL 2

// Outcome of a call.
typedef enum ResumStatus {
  RESUM_STATUS_OK = 0,
  // A required pointer argument was null.
  RESUM_STATUS_NULL_POINTER = 1,
  // Bad argument value, including strings that are not UTF-8.
  RESUM_STATUS_INVALID_ARGUMENT = 2,
  // Malformed or inconsistent model.
  RESUM_STATUS_MODEL = 3,
  // Quadrature, convergence or tolerance failure.
  RESUM_STATUS_NUMERIC = 4,
  RESUM_STATUS_IO = 5,
  RESUM_STATUS_UNSUPPORTED = 6,
  // The point needs an explicit side, or is a branch point.
  RESUM_STATUS_BRANCH = 7,
  // Internal panic; the engine state is unaffected.
  RESUM_STATUS_PANIC = 8,
} ResumStatus;

// Opaque model handle.
typedef struct ResumModel ResumModel;

typedef struct ResumComplex {
  double re;
  double im;
} ResumComplex;

// A computed value with its absolute error estimate.
typedef struct ResumValue {
  struct ResumComplex value;
  double error_estimate;
} ResumValue;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failure on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *resum_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *resum_version(void);

// Creates a handle for one of the bundled models ("f1", "f2", "f3-stirling", "borel-sqrt").
//
// # Safety
// `name` must be null or a NUL-terminated string; `out` must be null or writable.
enum ResumStatus resum_model_bundled(const char *name, struct ResumModel **out);

// Loads a model file.
//
// # Safety
// As `resum_model_bundled`.
enum ResumStatus resum_model_load(const char *path, struct ResumModel **out);

// Parses a model from its JSON text.
//
// # Safety
// As `resum_model_bundled`.
enum ResumStatus resum_model_from_json(const char *json, struct ResumModel **out);

// Releases a handle. Null is accepted.
//
// # Safety
// `model` must be null or a handle from this library not yet freed.
void resum_model_free(struct ResumModel *model);

// Writes one of the `RESUM_KIND_*` constants.
//
// # Safety
// `model` must be a live handle or null; `out` writable or null.
enum ResumStatus resum_model_kind(const struct ResumModel *model, int32_t *out);

// Coefficient f_k, k >= 1.
//
// # Safety
// `model` must be a live handle or null; `out` writable or null.
enum ResumStatus resum_model_coefficient(const struct ResumModel *model,
                                         uint32_t k,
                                         struct ResumValue *out);

// Value of the function the model describes at z: the analytic continuation
// for finite-radius models, the entire function, or the Borel sum. `side`
// applies to points on a cut of a finite-radius model, `lateral` to Borel
// sums along a singular direction; each is ignored otherwise.
//
// # Safety
// `model` must be a live handle or null; `out` writable or null.
enum ResumStatus resum_eval(const struct ResumModel *model,
                            struct ResumComplex z,
                            int32_t side,
                            int32_t lateral,
                            struct ResumValue *out);

// Borel sum of a `RESUM_KIND_BOREL` model at z.
//
// # Safety
// As `resum_eval`.
enum ResumStatus resum_borel_sum(const struct ResumModel *model,
                                 struct ResumComplex z,
                                 int32_t lateral,
                                 struct ResumValue *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* RESUM_H */
