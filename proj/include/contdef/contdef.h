/* Continuum deformation coordination engine - public C interface.
 *
 * All entry points return a cd_status code (CD_OK on success) and hand
 * results back through opaque handles or allocated strings. Strings returned
 * through char** parameters are owned by the caller and released with
 * cd_string_free; handles are released with their matching *_free call.
 * cd_last_error_message() describes the most recent failure on the calling
 * thread.
 */
#ifndef CONTDEF_CONTDEF_H
#define CONTDEF_CONTDEF_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cd_status {
  CD_OK = 0,
  CD_E_DEGENERATE_SIMPLEX = 1,
  CD_E_OFF_HYPERPLANE = 2,
  CD_E_INVALID_FEATURE = 3,
  CD_E_SINGULAR_TRANSFORM = 4,
  CD_E_ORIENTATION_REVERSING = 5,
  CD_E_NOT_POSITIVE_DEFINITE = 6,
  CD_E_CONTAINMENT_VIOLATED = 7,
  CD_E_UNREACHABLE = 8,
  CD_E_SINGULAR_WEIGHT_SYSTEM = 9,
  CD_E_MISSING_NEIGHBOR = 10,
  CD_E_SINGULAR_LINEARIZATION = 11,
  CD_E_GUARD_TRIPPED = 12,
  CD_E_INPUT_SATURATED = 13,
  CD_E_ANGLES_NOT_CONSTANT = 14,
  CD_E_TOO_DENSE = 15,
  CD_E_OUT_OF_SEGMENT = 16,
  CD_E_NO_PATH = 17,
  CD_E_INVALID_ENDPOINT = 18,
  CD_E_INFEASIBLE_SEGMENT = 19,
  CD_E_PARSE = 20,
  CD_E_SCHEMA = 21,
  CD_E_IO = 22,
  CD_E_INVALID_ARGUMENT = 30,
  CD_E_UNKNOWN = 99
} cd_status;

typedef struct cd_scenario cd_scenario;
typedef struct cd_weights cd_weights;
typedef struct cd_plan cd_plan;
typedef struct cd_trajectory cd_trajectory;
typedef struct cd_report cd_report;

const char* cd_version(void);
const char* cd_status_name(int status);
/* Message of the last failing call on this thread; empty string if none. */
const char* cd_last_error_message(void);
void cd_string_free(char* text);

/* ---- scenarios ---------------------------------------------------- */
int cd_scenario_load(const char* path, cd_scenario** out);
int cd_scenario_parse(const char* json_text, cd_scenario** out);
/* Bundled scenarios; currently "table2". */
int cd_scenario_builtin(const char* name, cd_scenario** out);
void cd_scenario_free(cd_scenario* scenario);
int cd_scenario_to_json(const cd_scenario* scenario, char** out_text);
/* Assumption checks; *pass is 1 when every check holds. */
int cd_scenario_validate(const cd_scenario* scenario, int* pass, char** report_text);
/* Minimum pairwise separation, boundary clearance (infinity when no
 * containment simplex is configured), admissible deviation cap, pinned
 * stretch angles and the closest pair. Null pointers are skipped. */
int cd_reference_metrics(const cd_scenario* scenario, double* min_separation,
                         double* boundary_clearance, double* max_deviation_bound,
                         double* theta_u0, double* psi_u0, int* pair_a, int* pair_b);

/* ---- communication weights ---------------------------------------- */
int cd_compute_weights(const cd_scenario* scenario, cd_weights** out);
void cd_weights_free(cd_weights* weights);
int cd_weights_text(const cd_weights* weights, char** out_text);
int cd_weights_follower_count(const cd_weights* weights, int* out_count);
int cd_weights_follower_id(const cd_weights* weights, int index, int* out_id);
/* Row of the follower-to-leader map; capacity must be at least n+1. */
int cd_weights_leader_map_row(const cd_weights* weights, int follower_id, double* out_row,
                              int capacity);
/* Reduced real weight between a follower and one of its real in-neighbors. */
int cd_weights_real_weight(const cd_weights* weights, int follower_id, int neighbor_id,
                           double* out_weight);
/* Largest real part over the eigenvalues of the follower weight block. */
int cd_weights_spectral_abscissa(const cd_weights* weights, double* out_value);

/* ---- planning ------------------------------------------------------ */
int cd_plan_build(const cd_scenario* scenario, cd_plan** out);
void cd_plan_free(cd_plan* plan);
int cd_plan_to_json(const cd_plan* plan, char** out_text);
int cd_plan_parse(const char* json_text, cd_plan** out);
int cd_plan_total_duration(const cd_plan* plan, double* out_duration);
int cd_plan_segment_count(const cd_plan* plan, int* out_count);
/* Features-over-time table for the plan, sampled every dt seconds. */
int cd_plan_features_csv(const cd_scenario* scenario, const cd_plan* plan, double dt,
                         char** out_csv);

/* ---- simulation ----------------------------------------------------- */
int cd_simulate(const cd_scenario* scenario, const cd_plan* plan, cd_trajectory** out);
void cd_trajectory_free(cd_trajectory* trajectory);
int cd_trajectory_csv(const cd_trajectory* trajectory, char** out_csv);
int cd_trajectory_stats(const cd_trajectory* trajectory, double* sup_deviation,
                        double* sup_deviation_time, int* sup_deviation_agent,
                        double* min_desired_separation);

/* ---- certification --------------------------------------------------- */
/* trajectory may be NULL; the certificate then simulates internally. */
int cd_certify(const cd_scenario* scenario, const cd_plan* plan,
               const cd_trajectory* trajectory, cd_report** out);
void cd_report_free(cd_report* report);
int cd_report_text(const cd_report* report, char** out_text);
int cd_report_pass(const cd_report* report, int* out_pass);

/* ---- misc ------------------------------------------------------------ */
/* Decompose a leader trajectory table (CSV: time, then x,y,z per leader in
 * leader order) into homogeneous-transform features over time. */
int cd_decompose_leader_csv(const cd_scenario* scenario, const char* leader_csv,
                            char** out_features_csv);
/* End-to-end reproduction of the bundled takeoff scenario with its published
 * constants; *pass is 1 when every gate holds. */
int cd_reproduce_table2(char** out_text, int* pass);

#ifdef __cplusplus
}
#endif

#endif /* CONTDEF_CONTDEF_H */
