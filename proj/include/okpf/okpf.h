#ifndef OKPF_OKPF_H
#define OKPF_OKPF_H

#include <stddef.h>
#include <stdint.h>

#if defined(OKPF_BUILDING)
#define OKPF_API __attribute__((visibility("default")))
#else
#define OKPF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum okpf_status {
  OKPF_OK = 0,
  OKPF_E_INVALID_ARGUMENT = 1,
  OKPF_E_INVALID_FIELD = 2,
  OKPF_E_GRID_MISMATCH = 3,
  OKPF_E_DIVERGENCE = 4,
  OKPF_E_INVALID_CANDIDATE = 5,
  OKPF_E_OPTIMIZER = 6,
  OKPF_E_OUT_OF_RANGE = 7,
  OKPF_E_IO = 8,
  OKPF_E_CORRUPT_FILE = 9,
  OKPF_E_UNSUPPORTED_VERSION = 10,
  OKPF_E_DEGENERATE = 11,
  OKPF_E_INTERNAL = 99
} okpf_status;

/* message of the last failure on this thread; empty after success */
OKPF_API const char* okpf_last_error(void);
OKPF_API const char* okpf_status_name(okpf_status s);
/* releases buffers handed out by this library */
OKPF_API void okpf_free(void* p);

typedef struct okpf_config okpf_config;
typedef struct okpf_state okpf_state;

typedef struct okpf_phys {
  double zeta, gamma, mass, epsilon, K1, K2, v_reg;
  int identity_interpolant;
} okpf_phys;

OKPF_API void okpf_phys_default(okpf_phys* out);

OKPF_API okpf_status okpf_config_load(const char* path, okpf_config** out);
OKPF_API okpf_status okpf_config_parse(const char* json, okpf_config** out);
OKPF_API okpf_status okpf_config_save(const okpf_config* c, const char* path);
OKPF_API okpf_status okpf_config_to_json(const okpf_config* c, char** out);
OKPF_API okpf_status okpf_config_physics(const okpf_config* c, okpf_phys* out);
OKPF_API void okpf_config_free(okpf_config* c);

typedef struct okpf_trace_row {
  uint64_t step;
  double time, E, P, N, C, Reg, mass_u, mass_v, residual;
} okpf_trace_row;

typedef void (*okpf_trace_fn)(const okpf_trace_row* row, void* user);

typedef struct okpf_run_info {
  int converged;
  uint64_t steps;
  double residual;
  /* step at which the run diverged when OKPF_E_DIVERGENCE is returned */
  uint64_t diverged_step;
} okpf_run_info;

/* final_state and info may be NULL */
OKPF_API okpf_status okpf_run(const okpf_config* c, okpf_trace_fn fn, void* user, okpf_state** final_state,
                              okpf_run_info* info);

OKPF_API okpf_status okpf_checkpoint_read(const char* path, okpf_state** out);
OKPF_API okpf_status okpf_checkpoint_write(const okpf_state* s, const char* path);
OKPF_API void okpf_state_free(okpf_state* s);

typedef struct okpf_state_info {
  int dim;
  int points[3];
  double lengths[3];
  double time;
  uint64_t step;
} okpf_state_info;

OKPF_API okpf_status okpf_state_info_get(const okpf_state* s, okpf_state_info* out);

typedef struct okpf_energy {
  double perimeter, nonlocal, constraint, v_regularization, total;
  double mass_u, mass_v;
} okpf_energy;

OKPF_API okpf_status okpf_state_energy(const okpf_state* s, const okpf_phys* p, okpf_energy* out);
/* OKPF_E_DEGENERATE when the exterior is empty or the potential vanishes */
OKPF_API okpf_status okpf_state_screening(const okpf_state* s, const okpf_phys* p, double threshold,
                                          double* ratio);
/* axis is ignored for 2-D states */
OKPF_API okpf_status okpf_state_render(const okpf_state* s, int axis, int index, const char* path);
/* shifts u and v so that f(u) - f(v)/zeta, mean removed, has zero dipole */
OKPF_API okpf_status okpf_state_dipole_shift(okpf_state* s, const okpf_phys* p, double shift[3]);

typedef struct okpf_radial_result {
  double r0, r1, r2, r3;
  double perimeter, nonlocal, total;
  double energy_per_mass;
  double residual[2];
} okpf_radial_result;

OKPF_API okpf_status okpf_radial_optimize(int n, double zeta, double gamma, double m, int equal_mass,
                                          okpf_radial_result* out);

typedef struct okpf_asymptotic {
  double energy_per_mass, leading, correction;
  double t01, t12, t23;
  double mid_radius, shell_mass_imbalance;
  double remainder_order;
} okpf_asymptotic;

OKPF_API okpf_status okpf_radial_asymptotic(int n, double zeta, double gamma, double m, int equal_mass,
                                            okpf_asymptotic* out);
OKPF_API okpf_status okpf_micelle_optimal(int n, double zeta, double gamma, double* m_star,
                                          double* energy_per_mass);

typedef struct okpf_thresholds {
  double zeta0, zeta1, zeta2;
} okpf_thresholds;

OKPF_API okpf_status okpf_thresholds_get(okpf_thresholds* out);
/* branch: 0 bilayer, 1 cylinder, 2 sphere */
OKPF_API okpf_status okpf_morphology(double zeta, double* c, int* branch, int* below_zeta0);
OKPF_API okpf_status okpf_branch_values(double zeta, double* bilayer, double* cylinder, double* sphere);
OKPF_API okpf_status okpf_helfrich(double zeta, double* lambda1, double* lambda2);

typedef struct okpf_fit_result {
  double a, b, p, rms_residual;
} okpf_fit_result;

/* fix_p may be NULL for a free exponent */
OKPF_API okpf_status okpf_fit(const double* m, const double* ratio, size_t n, const double* fix_p,
                              okpf_fit_result* out);
/* *m and *ratio are released with okpf_free */
OKPF_API okpf_status okpf_read_points(const char* path, double** m, double** ratio, size_t* n);

#ifdef __cplusplus
}
#endif

#endif
