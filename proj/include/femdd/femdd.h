/* femdd: C interface of the drift-diffusion simulator.
 *
 * Objects are opaque handles created and released by the library. Every
 * fallible call returns a femdd_status; on failure femdd_last_error() holds
 * a message for the calling thread until its next failing call.
 */
#ifndef FEMDD_FEMDD_H
#define FEMDD_FEMDD_H

#include <stddef.h>

#if defined(FEMDD_BUILDING_LIBRARY)
#define FEMDD_API __attribute__((visibility("default")))
#else
#define FEMDD_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum femdd_status {
  FEMDD_OK = 0,
  FEMDD_ERR_INVALID_ARGUMENT = 1,
  FEMDD_ERR_PARSE = 2,
  FEMDD_ERR_CONFIG = 3,
  FEMDD_ERR_IO = 4,
  FEMDD_ERR_SOLVER = 5,
  FEMDD_ERR_STALL = 6, /* sweep stopped early; partial results are kept */
  FEMDD_ERR_RANGE = 7,
  FEMDD_ERR_MESH = 8,
  FEMDD_ERR_INTERNAL = 99
} femdd_status;

typedef enum femdd_log_level {
  FEMDD_LOG_DEBUG = 0,
  FEMDD_LOG_INFO = 1,
  FEMDD_LOG_WARN = 2,
  FEMDD_LOG_ERROR = 3,
  FEMDD_LOG_OFF = 4
} femdd_log_level;

typedef struct femdd_config femdd_config;
typedef struct femdd_simulation femdd_simulation;

FEMDD_API const char* femdd_version(void);
FEMDD_API const char* femdd_status_name(femdd_status status);
/* Message of the last failure on this thread, "" if none. */
FEMDD_API const char* femdd_last_error(void);

/* Log lines are "key=value ..." bodies; the level comes separately. With
 * no callback they go to stderr as "LEVEL body". */
typedef void (*femdd_log_fn)(femdd_log_level level, const char* body, void* user);
FEMDD_API void femdd_set_log_callback(femdd_log_fn fn, void* user);
FEMDD_API void femdd_set_log_level(femdd_log_level level);
/* Accepts debug, info, warn, error, off. */
FEMDD_API femdd_status femdd_parse_log_level(const char* name, femdd_log_level* out);

/* ---- configuration ---- */
FEMDD_API femdd_status femdd_config_parse(const char* text, const char* base_dir, femdd_config** out);
FEMDD_API femdd_status femdd_config_load(const char* path, femdd_config** out);
FEMDD_API void femdd_config_free(femdd_config* config);
/* ddfe, method_a or method_b */
FEMDD_API femdd_status femdd_config_set_method(femdd_config* config, const char* method);
FEMDD_API const char* femdd_config_method(const femdd_config* config);
FEMDD_API femdd_status femdd_config_set_output_dir(femdd_config* config, const char* dir);
FEMDD_API const char* femdd_config_output_dir(const femdd_config* config);
FEMDD_API const char* femdd_config_name(const femdd_config* config);
FEMDD_API int femdd_config_has_sweep(const femdd_config* config);
/* Builds the mesh and device without solving; catches every semantic
 * problem the run would hit before the solver starts. */
FEMDD_API femdd_status femdd_config_validate(const femdd_config* config);

/* ---- simulation ---- */
FEMDD_API femdd_status femdd_simulation_create(const femdd_config* config, femdd_simulation** out);
FEMDD_API void femdd_simulation_free(femdd_simulation* sim);

FEMDD_API size_t femdd_simulation_num_vertices(const femdd_simulation* sim);
FEMDD_API size_t femdd_simulation_num_elements(const femdd_simulation* sim);
FEMDD_API size_t femdd_simulation_num_contacts(const femdd_simulation* sim);
/* NULL when out of range. */
FEMDD_API const char* femdd_simulation_contact_name(const femdd_simulation* sim, size_t index);

/* Equilibrium, then a ramp of every contact to its fixed bias. */
FEMDD_API femdd_status femdd_simulation_solve(femdd_simulation* sim);

typedef void (*femdd_point_fn)(double bias, const double* currents, size_t num_contacts, int iterations,
                               double step, void* user);
/* Runs the configured sweep. With write_fields != 0, VTK files are written
 * to the output directory following the configured dump schedule. Returns
 * FEMDD_ERR_STALL when the step fell below the minimum; the points reached
 * so far remain available. */
FEMDD_API femdd_status femdd_simulation_sweep(femdd_simulation* sim, int write_fields, femdd_point_fn on_point,
                                              void* user);
FEMDD_API size_t femdd_simulation_sweep_size(const femdd_simulation* sim);
FEMDD_API int femdd_simulation_step_reductions(const femdd_simulation* sim);

/* Terminal currents (A, outflow positive) of the current state. */
FEMDD_API femdd_status femdd_simulation_currents(const femdd_simulation* sim, double* out, size_t count);
/* Nodal field by name: phi, n, p, phi_n, phi_p, net_doping, ii_rate. */
FEMDD_API femdd_status femdd_simulation_field(const femdd_simulation* sim, const char* name, double* out,
                                              size_t count);

FEMDD_API femdd_status femdd_simulation_write_vtk(const femdd_simulation* sim, const char* path);
FEMDD_API femdd_status femdd_simulation_write_iv_csv(const femdd_simulation* sim, const char* path);

#ifdef __cplusplus
}
#endif

#endif
