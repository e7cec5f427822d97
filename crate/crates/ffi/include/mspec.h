#ifndef MSPEC_H
#define MSPEC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes.
 */
typedef enum {
  MSPEC_STATUS_OK = 0,
  MSPEC_STATUS_NULL_POINTER = 1,
  MSPEC_STATUS_DOMAIN = 2,
  MSPEC_STATUS_INDEX = 3,
  MSPEC_STATUS_CONFIG = 4,
  MSPEC_STATUS_IO = 5,
  MSPEC_STATUS_VERIFICATION = 6,
  /*
   A Rust panic was caught at the boundary.
   */
  MSPEC_STATUS_INTERNAL = 7,
} MspecStatus;

/*
 Accumulated `key = value` assignments; opaque to C.
 */
typedef struct MspecConfig MspecConfig;

/*
 A computed spectrum; opaque to C.
 */
typedef struct MspecSpectrum MspecSpectrum;

/*
 A four-vector `(t, x, y, z)` in natural units.
 */
typedef struct {
  double t;
  double x;
  double y;
  double z;
} MspecFourVector;

/*
 Incoming `p1, p2` and outgoing `p1_out, p2_out` momenta.
 */
typedef struct {
  MspecFourVector p1;
  MspecFourVector p2;
  MspecFourVector p1_out;
  MspecFourVector p2_out;
} MspecKinematics;

/*
 A located spectrum peak.
 */
typedef struct {
  double mass;
  double height;
  double prominence;
  uintptr_t index;
} MspecPeak;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failure on this thread, or null. Valid until the
 next failing call on the same thread.
 */
const char *mspec_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *mspec_version(void);

/*
 Minkowski product with signature `(+,-,-,-)`.

 # Safety
 `a`, `b` and `out` must be valid pointers or null.
 */
MspecStatus mspec_minkowski_dot(const MspecFourVector *a, const MspecFourVector *b, double *out);

/*
 Invariant mass `(p·p)^½` of a forward timelike vector.

 # Safety
 `p` and `out` must be valid pointers or null.
 */
MspecStatus mspec_zeta(const MspecFourVector *p, double *out);

/*
 Spin-averaged squared amplitude of `e⁺e⁻ → γ → l⁺l⁻`.

 # Safety
 `k` and `out` must be valid pointers or null.
 */
MspecStatus mspec_phi_qed(double alpha,
                          double m,
                          double m_out,
                          const MspecKinematics *k,
                          double *out);

/*
 Spin-averaged squared amplitude of `e⁺e⁻ → Z⁰ → μ⁺μ⁻` for boson mass
 `mass`.

 # Safety
 `k` and `out` must be valid pointers or null.
 */
MspecStatus mspec_phi_z(double alpha_w,
                        double mass,
                        double m_e,
                        double m_mu,
                        const MspecKinematics *k,
                        double *out);

/*
 A new empty configuration; defaults follow the first lepton listing
 until keys say otherwise. Never null.
 */
MspecConfig *mspec_config_new(void);

/*
 Appends `key = value`; `value` may be an expression over earlier keys.
 Keys are checked when the spectrum is computed.

 # Safety
 `cfg` must come from [`mspec_config_new`]; strings must be
 NUL-terminated.
 */
MspecStatus mspec_config_set(MspecConfig *cfg, const char *key, const char *value);

/*
 Parses configuration text in the file format and appends its
 assignments.

 # Safety
 `cfg` must come from [`mspec_config_new`]; `text` must be
 NUL-terminated.
 */
MspecStatus mspec_config_parse(MspecConfig *cfg, const char *text);

/*
 # Safety
 `cfg` must come from [`mspec_config_new`] and not be used afterwards.
 */
void mspec_config_free(MspecConfig *cfg);

/*
 Computes the spectrum for `cfg` with `threads` workers (0 for one per
 core) and stores a new handle in `out`.

 # Safety
 `cfg` must come from [`mspec_config_new`]; `out` must be valid.
 */
MspecStatus mspec_spectrum_compute(const MspecConfig *cfg, uintptr_t threads, MspecSpectrum **out);

/*
 Number of bins, 0 for a null handle.

 # Safety
 `s` must come from [`mspec_spectrum_compute`] or be null.
 */
uintptr_t mspec_spectrum_len(const MspecSpectrum *s);

/*
 Bin center and density of bin `i`.

 # Safety
 `s` must come from [`mspec_spectrum_compute`]; outputs must be valid.
 */
MspecStatus mspec_spectrum_bin(const MspecSpectrum *s, uintptr_t i, double *mass, double *density);

/*
 Writes up to `capacity` peaks, tallest first, into `peaks` and the total
 number found into `count`. `peaks` may be null when `capacity` is 0.

 # Safety
 `s` must come from [`mspec_spectrum_compute`]; `peaks` must hold
 `capacity` elements.
 */
MspecStatus mspec_spectrum_peaks(const MspecSpectrum *s,
                                 double min_prominence,
                                 MspecPeak *peaks,
                                 uintptr_t capacity,
                                 uintptr_t *count);

/*
 # Safety
 `s` must come from [`mspec_spectrum_compute`] and not be used afterwards.
 */
void mspec_spectrum_free(MspecSpectrum *s);

/*
 Runs the seeded covariance checks. Stores the largest residual in
 `max_residual` (when non-null) and returns
 [`MspecStatus::Verification`] if any check fails.

 # Safety
 `max_residual` must be valid or null.
 */
MspecStatus mspec_verify(uint64_t seed, uintptr_t trials, double *max_residual);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MSPEC_H */
