/*
 * wsgeo C API: weight-space geometry for feed-forward networks.
 *
 * The library treats a network's weight space as a manifold carrying the
 * pullback metric g = J^T J of the network outputs and finds high-performance
 * paths on it: geodesic walks onto sparse-weight hyperplanes (network
 * sparsification) and between two trained networks (merging two sequentially
 * trained tasks).
 *
 * Conventions:
 *   - every function returns a wsg_status; WSG_OK is 0
 *   - on error, wsg_last_error() returns a thread-local message
 *   - objects are opaque handles with matching *_free functions; out-params
 *     are written only on WSG_OK (except wsg_run, see below)
 *   - weight vectors are flat doubles in the documented layer-major order
 */
#ifndef WSGEO_H
#define WSGEO_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wsg_status {
  WSG_OK = 0,
  WSG_ERR_CONFIG = 2,         /* bad config/arguments, unknown keys, missing files */
  WSG_ERR_NOT_CONVERGED = 3,  /* walk exhausted max_steps without reaching the goal */
  WSG_ERR_NUMERIC = 4,        /* divergence, non-finite values, solver failure */
  WSG_ERR_IO = 5,             /* filesystem or malformed file */
  WSG_ERR_DIMENSION = 6,      /* size mismatch between spec/weights/datasets */
  WSG_ERR_INVALID = 7         /* null handle or out-of-range argument */
} wsg_status;

typedef struct wsg_spec wsg_spec;       /* network architecture */
typedef struct wsg_weights wsg_weights; /* flat weight vector bound to a spec */
typedef struct wsg_dataset wsg_dataset;
typedef struct wsg_metric wsg_metric;   /* pullback metric operator at a point */
typedef struct wsg_plane wsg_plane;     /* sparse-weight hyperplane */
typedef struct wsg_config wsg_config;   /* declarative run configuration */
typedef struct wsg_outcome wsg_outcome; /* artifacts and counters of a run */

const char* wsg_version(void);
/* Message for the most recent error on this thread; never NULL. */
const char* wsg_last_error(void);

/* ---- network spec ------------------------------------------------------ */

/* layer_sizes: at least 2 entries. activation: "tanh"|"relu"|"identity"
 * (hidden layers). output_activation: "identity"|"softmax_eval". */
wsg_status wsg_spec_create(const int32_t* layer_sizes, int32_t n_layers, const char* activation,
                           const char* output_activation, wsg_spec** out);
void wsg_spec_free(wsg_spec* spec);
int64_t wsg_spec_param_count(const wsg_spec* spec);
int32_t wsg_spec_input_dim(const wsg_spec* spec);
int32_t wsg_spec_output_dim(const wsg_spec* spec);

/* ---- weights ----------------------------------------------------------- */

/* values may be NULL for all-zero weights. */
wsg_status wsg_weights_create(const wsg_spec* spec, const double* values, wsg_weights** out);
/* Seeded init: weights ~ N(0, 1/fan_in), biases zero. */
wsg_status wsg_weights_random(const wsg_spec* spec, uint64_t seed, wsg_weights** out);
int64_t wsg_weights_len(const wsg_weights* w);
wsg_status wsg_weights_copy_data(const wsg_weights* w, double* out, int64_t len);
void wsg_weights_free(wsg_weights* w);

wsg_status wsg_checkpoint_save(const char* file, const wsg_spec* spec, const wsg_weights* w);
wsg_status wsg_checkpoint_load(const char* file, wsg_spec** spec_out, wsg_weights** w_out);

/* ---- datasets ----------------------------------------------------------- */

wsg_status wsg_dataset_two_moons(int32_t n, double noise, uint64_t seed, wsg_dataset** out);
wsg_status wsg_dataset_blobs(int32_t n, double noise, uint64_t seed, int32_t classes,
                             wsg_dataset** out);
/* IDX pair (big-endian, magic 0x803/0x801). downsample_to: target side length
 * (block averaging, center-cropping first when it does not divide). */
wsg_status wsg_dataset_load_idx(const char* images, const char* labels, int32_t downsample_to,
                                int32_t normalize, wsg_dataset** out);
int32_t wsg_dataset_size(const wsg_dataset* ds);
int32_t wsg_dataset_input_dim(const wsg_dataset* ds);
int32_t wsg_dataset_target_dim(const wsg_dataset* ds);
void wsg_dataset_free(wsg_dataset* ds);

/* ---- network operations -------------------------------------------------- */

wsg_status wsg_forward(const wsg_spec* spec, const wsg_weights* w, const double* x, int32_t x_len,
                       double* y_out, int32_t y_len);
wsg_status wsg_loss_accuracy(const wsg_spec* spec, const wsg_weights* w, const wsg_dataset* ds,
                             double* loss_out, double* accuracy_out);

typedef struct wsg_train_options {
  double lr;
  int32_t epochs;
  int32_t batch_size;
  uint64_t seed;
  const uint8_t* mask; /* NULL or length n; 0 pins a coordinate to zero */
} wsg_train_options;

wsg_status wsg_train(const wsg_spec* spec, const wsg_weights* w0, const wsg_dataset* train,
                     const wsg_train_options* options, wsg_weights** out);

/* ---- metric and tangent steps ------------------------------------------- */

/* Metric batch: batch_size rows drawn from ds by the given seed (the same
 * draw the walker uses for a fixed-batch run with that seed). */
wsg_status wsg_metric_create(const wsg_spec* spec, const wsg_weights* w, const wsg_dataset* ds,
                             int32_t batch_size, uint64_t seed, wsg_metric** out);
wsg_status wsg_metric_apply(const wsg_metric* g, const double* u, double* out);
wsg_status wsg_metric_inner(const wsg_metric* g, const double* u, const double* v, double* out);
void wsg_metric_free(wsg_metric* g);

/* Solves argmin <theta,theta>_g - beta theta.v subject to |theta| <= radius.
 * v_goal must be unit norm. theta_out has length n; lambda_out may be NULL. */
wsg_status wsg_tangent_step(const wsg_metric* g, const double* v_goal, double beta, double radius,
                            double* theta_out, double* lambda_out);

/* ---- sparsity planes ----------------------------------------------------- */

/* rule: "magnitude"|"by_unit". exempt_biases applies to the magnitude rule. */
wsg_status wsg_plane_create(const wsg_spec* spec, const wsg_weights* w, double p, const char* rule,
                            int32_t exempt_biases, wsg_plane** out);
int64_t wsg_plane_masked_count(const wsg_plane* plane);
/* mask_out: length n; 1 = free coordinate, 0 = pinned to zero. */
wsg_status wsg_plane_mask(const wsg_plane* plane, uint8_t* mask_out, int64_t len);
wsg_status wsg_plane_project(const wsg_plane* plane, const wsg_weights* w, wsg_weights** out);
void wsg_plane_free(wsg_plane* plane);

/* ---- configuration and runs ---------------------------------------------- */

wsg_status wsg_config_create(wsg_config** out);
wsg_status wsg_config_load(const char* file, wsg_config** out);
wsg_status wsg_config_set(wsg_config* cfg, const char* key, const char* value);
void wsg_config_free(wsg_config* cfg);

/* Runs the configured task (train|sparsify|merge|evaluate|emit-plot-data),
 * writing the resolved manifest and all outputs into out_dir. Returns WSG_OK
 * or WSG_ERR_NOT_CONVERGED with *out set in both cases (artifacts are valid
 * for non-converged walks); other statuses leave *out NULL. */
wsg_status wsg_run(const wsg_config* cfg, wsg_outcome** out);

int32_t wsg_outcome_exit_code(const wsg_outcome* o);
int32_t wsg_outcome_artifact_count(const wsg_outcome* o);
/* Borrowed pointer, valid until the outcome is freed. */
const char* wsg_outcome_artifact(const wsg_outcome* o, int32_t i);
int64_t wsg_outcome_steps(const wsg_outcome* o);
int64_t wsg_outcome_epochs(const wsg_outcome* o);
double wsg_outcome_wall_seconds(const wsg_outcome* o);
void wsg_outcome_free(wsg_outcome* o);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* WSGEO_H */
