/* quadjump — guided-RL quadruped jumping toolkit, C ABI.
 *
 * All functions are thread-safe unless they share a handle; handles are
 * immutable after creation. Errors return a non-OK status and leave a
 * message in qj_last_error() (thread-local).
 */
#ifndef QUADJUMP_H
#define QUADJUMP_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qj_status {
    QJ_OK = 0,
    QJ_ERROR = 1,    /* usage, config, IO or internal error */
    QJ_REJECTED = 2, /* planner safety filter rejected the action */
    QJ_DIVERGED = 3  /* training diverged */
} qj_status;

typedef struct qj_robot qj_robot;
typedef struct qj_reward qj_reward;
typedef struct qj_policy qj_policy;

const char* qj_version(void);

/* Message for the calling thread's most recent failure. */
const char* qj_last_error(void);

/* Robot description: built-in defaults or a plain-text config file. */
qj_robot* qj_robot_default(void);
qj_robot* qj_robot_load(const char* path);
void qj_robot_free(qj_robot* robot);

qj_reward* qj_reward_default(void);
qj_reward* qj_reward_load(const char* path);
void qj_reward_free(qj_reward* reward);

qj_policy* qj_policy_load(const char* path);
void qj_policy_free(qj_policy* policy);

/* Deterministic policy action (physical units) for a displacement command
 * (dx, dy, dz, droll, dpitch, dyaw). */
qj_status qj_policy_act(const qj_policy* policy, const double state[6], double action_out[13]);

/* Closed-form ballistic landing prediction for a lift-off state. Outputs are
 * optional (pass NULL to skip). Unreachable targets return QJ_REJECTED. */
qj_status qj_predict_landing(const double c_lo[3], const double cdot_lo[3], double z_target,
                             double c_td_out[3], double* flight_time_out, double* apex_z_out);

/* A-priori feasibility check of an action against a displacement target.
 * Returns QJ_OK (accepted) or QJ_REJECTED with the reason copied into
 * reason_out (>= 64 bytes). report_json, when non-NULL, receives a malloc'd
 * JSON report to release with qj_string_free. */
qj_status qj_check(const qj_robot* robot, const double target[6], const double action[13],
                   char* reason_out, double landing_out[3], char** report_json);

/* Thrust planning: writes the sampled reference trajectory CSV (optional)
 * and returns a JSON summary (boundary conditions, timing, prediction,
 * minimum height). Rejected actions return QJ_REJECTED without a CSV. */
qj_status qj_plan(const qj_robot* robot, const double target[6], const double action[13],
                  double sample_period, const char* trajectory_csv, char** summary_json);

/* One simulated jump episode. mode is "ideal" or "tracked"; trace_csv is
 * optional. outcome_json receives the full episode outcome. */
qj_status qj_simulate(const qj_robot* robot, const qj_reward* reward, const double command[6],
                      const double action[13], const char* mode, uint64_t seed,
                      const char* trace_csv, char** outcome_json);

/* Policy training from a train config file. Writes checkpoint.qjc,
 * metrics.csv and run metadata under out_dir; resumes from an existing
 * checkpoint. seed_set != 0 makes `seed` override the config; overrides
 * > 0 replace n_envs / iterations; mode may be NULL for the config value. */
qj_status qj_train(const qj_robot* robot, const qj_reward* reward, const char* train_cfg_path,
                   const char* mode, uint64_t seed, int seed_set, int n_envs_override,
                   int iterations_override, const char* out_dir);

/* Evaluation sweeps over a trained checkpoint. suite is one of
 * region | avt | height | yaw | robust; mode NULL picks the suite default
 * (ideal for planner-level sweeps, tracked for robustness). samples <= 0
 * and threshold <= 0 pick defaults. Writes suite CSVs plus metadata.json
 * under out_dir. */
qj_status qj_eval(const qj_robot* robot, const qj_reward* reward, const char* checkpoint_path,
                  const char* suite, const char* mode, uint64_t seed, int samples,
                  double threshold, double perturb_p, double d_max, const char* out_dir);

void qj_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* QUADJUMP_H */
