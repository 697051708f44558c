#include "wsgeo.h"

#include <cstring>
#include <string>

#include "wsgeo/error.hpp"
#include "wsgeo/idx.hpp"
#include "wsgeo/io.hpp"
#include "wsgeo/metric.hpp"
#include "wsgeo/runconfig.hpp"
#include "wsgeo/runner.hpp"
#include "wsgeo/sparsity.hpp"
#include "wsgeo/trs.hpp"

using namespace wsgeo;

struct wsg_spec {
  NetworkSpec spec;
};
struct wsg_weights {
  Vector w;
};
struct wsg_dataset {
  Dataset ds;
};
struct wsg_metric {
  MetricOperator op;
};
struct wsg_plane {
  SparsityPlane plane;
};
struct wsg_config {
  RunConfig cfg;
};
struct wsg_outcome {
  CommandOutcome outcome;
};

namespace {

thread_local std::string g_last_error = "";

wsg_status status_of(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Config: return WSG_ERR_CONFIG;
    case ErrorKind::Io:
    case ErrorKind::Format: return WSG_ERR_IO;
    case ErrorKind::Dimension: return WSG_ERR_DIMENSION;
    case ErrorKind::Numeric:
    case ErrorKind::SolverFailure: return WSG_ERR_NUMERIC;
    case ErrorKind::NotConverged: return WSG_ERR_NOT_CONVERGED;
    case ErrorKind::SizeCap:
    case ErrorKind::Degenerate: return WSG_ERR_CONFIG;
  }
  return WSG_ERR_INVALID;
}

template <class Fn>
wsg_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return WSG_ERR_NUMERIC;
  } catch (...) {
    g_last_error = "unknown error";
    return WSG_ERR_NUMERIC;
  }
}

wsg_status invalid(const char* msg) {
  g_last_error = msg;
  return WSG_ERR_INVALID;
}

}  // namespace

extern "C" {

const char* wsg_version(void) { return "wsgeo 1.0.0"; }

const char* wsg_last_error(void) { return g_last_error.c_str(); }

/* ---- spec ---- */

wsg_status wsg_spec_create(const int32_t* layer_sizes, int32_t n_layers, const char* activation,
                           const char* output_activation, wsg_spec** out) {
  if (!layer_sizes || n_layers < 2 || !out) return invalid("wsg_spec_create: bad arguments");
  return guarded([&] {
    std::vector<int> sizes(layer_sizes, layer_sizes + n_layers);
    NetworkSpec spec = NetworkSpec::dense(
        std::move(sizes), activation_from_string(activation ? activation : "tanh"),
        output_activation_from_string(output_activation ? output_activation : "identity"));
    *out = new wsg_spec{std::move(spec)};
    return WSG_OK;
  });
}

void wsg_spec_free(wsg_spec* spec) { delete spec; }

int64_t wsg_spec_param_count(const wsg_spec* spec) { return spec ? spec->spec.param_count() : -1; }

int32_t wsg_spec_input_dim(const wsg_spec* spec) { return spec ? spec->spec.input_dim() : -1; }

int32_t wsg_spec_output_dim(const wsg_spec* spec) { return spec ? spec->spec.output_dim() : -1; }

/* ---- weights ---- */

wsg_status wsg_weights_create(const wsg_spec* spec, const double* values, wsg_weights** out) {
  if (!spec || !out) return invalid("wsg_weights_create: bad arguments");
  return guarded([&] {
    const Eigen::Index n = spec->spec.param_count();
    Vector w = Vector::Zero(n);
    if (values) std::memcpy(w.data(), values, sizeof(double) * static_cast<size_t>(n));
    check_weights(spec->spec, w);
    *out = new wsg_weights{std::move(w)};
    return WSG_OK;
  });
}

wsg_status wsg_weights_random(const wsg_spec* spec, uint64_t seed, wsg_weights** out) {
  if (!spec || !out) return invalid("wsg_weights_random: bad arguments");
  return guarded([&] {
    *out = new wsg_weights{random_init(spec->spec, seed)};
    return WSG_OK;
  });
}

int64_t wsg_weights_len(const wsg_weights* w) { return w ? w->w.size() : -1; }

wsg_status wsg_weights_copy_data(const wsg_weights* w, double* out, int64_t len) {
  if (!w || !out) return invalid("wsg_weights_copy_data: bad arguments");
  if (len < w->w.size()) return invalid("wsg_weights_copy_data: buffer too small");
  std::memcpy(out, w->w.data(), sizeof(double) * static_cast<size_t>(w->w.size()));
  return WSG_OK;
}

void wsg_weights_free(wsg_weights* w) { delete w; }

wsg_status wsg_checkpoint_save(const char* file, const wsg_spec* spec, const wsg_weights* w) {
  if (!file || !spec || !w) return invalid("wsg_checkpoint_save: bad arguments");
  return guarded([&] {
    save_checkpoint(file, spec->spec, w->w);
    return WSG_OK;
  });
}

wsg_status wsg_checkpoint_load(const char* file, wsg_spec** spec_out, wsg_weights** w_out) {
  if (!file || !spec_out || !w_out) return invalid("wsg_checkpoint_load: bad arguments");
  return guarded([&] {
    auto [spec, w] = load_checkpoint(file);
    *spec_out = new wsg_spec{std::move(spec)};
    *w_out = new wsg_weights{std::move(w)};
    return WSG_OK;
  });
}

/* ---- datasets ---- */

wsg_status wsg_dataset_two_moons(int32_t n, double noise, uint64_t seed, wsg_dataset** out) {
  if (!out) return invalid("wsg_dataset_two_moons: bad arguments");
  return guarded([&] {
    *out = new wsg_dataset{two_moons(n, noise, seed)};
    return WSG_OK;
  });
}

wsg_status wsg_dataset_blobs(int32_t n, double noise, uint64_t seed, int32_t classes,
                             wsg_dataset** out) {
  if (!out) return invalid("wsg_dataset_blobs: bad arguments");
  return guarded([&] {
    *out = new wsg_dataset{gaussian_blobs(n, noise, seed, classes)};
    return WSG_OK;
  });
}

wsg_status wsg_dataset_load_idx(const char* images, const char* labels, int32_t downsample_to,
                                int32_t normalize, wsg_dataset** out) {
  if (!images || !labels || !out) return invalid("wsg_dataset_load_idx: bad arguments");
  return guarded([&] {
    IdxOptions opts;
    opts.downsample_to = downsample_to;
    opts.normalize = normalize != 0;
    *out = new wsg_dataset{load_idx(images, labels, opts)};
    return WSG_OK;
  });
}

int32_t wsg_dataset_size(const wsg_dataset* ds) { return ds ? ds->ds.size() : -1; }

int32_t wsg_dataset_input_dim(const wsg_dataset* ds) { return ds ? ds->ds.input_dim() : -1; }

int32_t wsg_dataset_target_dim(const wsg_dataset* ds) { return ds ? ds->ds.target_dim() : -1; }

void wsg_dataset_free(wsg_dataset* ds) { delete ds; }

/* ---- network operations ---- */

wsg_status wsg_forward(const wsg_spec* spec, const wsg_weights* w, const double* x, int32_t x_len,
                       double* y_out, int32_t y_len) {
  if (!spec || !w || !x || !y_out) return invalid("wsg_forward: bad arguments");
  if (y_len < spec->spec.output_dim()) return invalid("wsg_forward: output buffer too small");
  return guarded([&] {
    const Vector xv = Eigen::Map<const Vector>(x, x_len);
    const Vector y = forward(spec->spec, w->w, xv);
    std::memcpy(y_out, y.data(), sizeof(double) * static_cast<size_t>(y.size()));
    return WSG_OK;
  });
}

wsg_status wsg_loss_accuracy(const wsg_spec* spec, const wsg_weights* w, const wsg_dataset* ds,
                             double* loss_out, double* accuracy_out) {
  if (!spec || !w || !ds) return invalid("wsg_loss_accuracy: bad arguments");
  return guarded([&] {
    const EvalResult r = loss_and_accuracy(spec->spec, w->w, ds->ds);
    if (loss_out) *loss_out = r.loss;
    if (accuracy_out) *accuracy_out = r.accuracy;
    return WSG_OK;
  });
}

wsg_status wsg_train(const wsg_spec* spec, const wsg_weights* w0, const wsg_dataset* train,
                     const wsg_train_options* options, wsg_weights** out) {
  if (!spec || !w0 || !train || !options || !out) return invalid("wsg_train: bad arguments");
  return guarded([&] {
    TrainConfig cfg;
    cfg.lr = options->lr;
    cfg.epochs = options->epochs;
    cfg.batch_size = options->batch_size;
    cfg.seed = options->seed;
    if (options->mask)
      cfg.mask.assign(options->mask,
                      options->mask + static_cast<size_t>(spec->spec.param_count()));
    TrainResult res = sgd_train(spec->spec, w0->w, train->ds, cfg);
    *out = new wsg_weights{std::move(res.weights)};
    return WSG_OK;
  });
}

/* ---- metric and tangent steps ---- */

wsg_status wsg_metric_create(const wsg_spec* spec, const wsg_weights* w, const wsg_dataset* ds,
                             int32_t batch_size, uint64_t seed, wsg_metric** out) {
  if (!spec || !w || !ds || !out) return invalid("wsg_metric_create: bad arguments");
  return guarded([&] {
    const BatchPolicy policy{batch_size, false, seed};
    const auto rows = metric_batch_rows(policy, ds->ds.size(), 0);
    *out = new wsg_metric{MetricOperator(spec->spec, w->w, ds->ds, rows)};
    return WSG_OK;
  });
}

wsg_status wsg_metric_apply(const wsg_metric* g, const double* u, double* out) {
  if (!g || !u || !out) return invalid("wsg_metric_apply: bad arguments");
  return guarded([&] {
    const Vector uv = Eigen::Map<const Vector>(u, g->op.dim());
    const Vector r = g->op.apply(uv);
    std::memcpy(out, r.data(), sizeof(double) * static_cast<size_t>(r.size()));
    return WSG_OK;
  });
}

wsg_status wsg_metric_inner(const wsg_metric* g, const double* u, const double* v, double* out) {
  if (!g || !u || !v || !out) return invalid("wsg_metric_inner: bad arguments");
  return guarded([&] {
    const Vector uv = Eigen::Map<const Vector>(u, g->op.dim());
    const Vector vv = Eigen::Map<const Vector>(v, g->op.dim());
    *out = g->op.inner(uv, vv);
    return WSG_OK;
  });
}

void wsg_metric_free(wsg_metric* g) { delete g; }

wsg_status wsg_tangent_step(const wsg_metric* g, const double* v_goal, double beta, double radius,
                            double* theta_out, double* lambda_out) {
  if (!g || !v_goal || !theta_out) return invalid("wsg_tangent_step: bad arguments");
  return guarded([&] {
    const Vector v = Eigen::Map<const Vector>(v_goal, g->op.dim());
    const TrsResult res = solve_tangent_step(g->op, v, beta, radius);
    std::memcpy(theta_out, res.theta.data(), sizeof(double) * static_cast<size_t>(res.theta.size()));
    if (lambda_out) *lambda_out = res.lambda;
    return WSG_OK;
  });
}

/* ---- sparsity planes ---- */

wsg_status wsg_plane_create(const wsg_spec* spec, const wsg_weights* w, double p, const char* rule,
                            int32_t exempt_biases, wsg_plane** out) {
  if (!spec || !w || !rule || !out) return invalid("wsg_plane_create: bad arguments");
  return guarded([&] {
    PlaneOptions opts;
    opts.exempt_biases = exempt_biases != 0;
    *out = new wsg_plane{
        make_sparsity_plane(spec->spec, w->w, p, sparsity_rule_from_string(rule), opts)};
    return WSG_OK;
  });
}

int64_t wsg_plane_masked_count(const wsg_plane* plane) {
  return plane ? plane->plane.masked_count() : -1;
}

wsg_status wsg_plane_mask(const wsg_plane* plane, uint8_t* mask_out, int64_t len) {
  if (!plane || !mask_out) return invalid("wsg_plane_mask: bad arguments");
  if (len < static_cast<int64_t>(plane->plane.mask.size()))
    return invalid("wsg_plane_mask: buffer too small");
  std::memcpy(mask_out, plane->plane.mask.data(), plane->plane.mask.size());
  return WSG_OK;
}

wsg_status wsg_plane_project(const wsg_plane* plane, const wsg_weights* w, wsg_weights** out) {
  if (!plane || !w || !out) return invalid("wsg_plane_project: bad arguments");
  return guarded([&] {
    *out = new wsg_weights{project_onto_plane(w->w, plane->plane)};
    return WSG_OK;
  });
}

void wsg_plane_free(wsg_plane* plane) { delete plane; }

/* ---- configuration and runs ---- */

wsg_status wsg_config_create(wsg_config** out) {
  if (!out) return invalid("wsg_config_create: bad arguments");
  *out = new wsg_config{};
  return WSG_OK;
}

wsg_status wsg_config_load(const char* file, wsg_config** out) {
  if (!file || !out) return invalid("wsg_config_load: bad arguments");
  return guarded([&] {
    *out = new wsg_config{RunConfig::load_file(file)};
    return WSG_OK;
  });
}

wsg_status wsg_config_set(wsg_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return invalid("wsg_config_set: bad arguments");
  cfg->cfg.set(key, value);
  return WSG_OK;
}

void wsg_config_free(wsg_config* cfg) { delete cfg; }

wsg_status wsg_run(const wsg_config* cfg, wsg_outcome** out) {
  if (!cfg || !out) return invalid("wsg_run: bad arguments");
  *out = nullptr;
  return guarded([&] {
    CommandOutcome outcome = run_command(cfg->cfg);
    const wsg_status st = outcome.exit_code == 3 ? WSG_ERR_NOT_CONVERGED : WSG_OK;
    if (st != WSG_OK) g_last_error = "walk did not reach the goal set within max_steps";
    *out = new wsg_outcome{std::move(outcome)};
    return st;
  });
}

int32_t wsg_outcome_exit_code(const wsg_outcome* o) { return o ? o->outcome.exit_code : -1; }

int32_t wsg_outcome_artifact_count(const wsg_outcome* o) {
  return o ? static_cast<int32_t>(o->outcome.artifacts.size()) : -1;
}

const char* wsg_outcome_artifact(const wsg_outcome* o, int32_t i) {
  if (!o || i < 0 || i >= static_cast<int32_t>(o->outcome.artifacts.size())) return nullptr;
  return o->outcome.artifacts[static_cast<size_t>(i)].c_str();
}

int64_t wsg_outcome_steps(const wsg_outcome* o) { return o ? o->outcome.steps : -1; }

int64_t wsg_outcome_epochs(const wsg_outcome* o) { return o ? o->outcome.epochs : -1; }

double wsg_outcome_wall_seconds(const wsg_outcome* o) { return o ? o->outcome.wall_seconds : -1; }

void wsg_outcome_free(wsg_outcome* o) { delete o; }

} /* extern "C" */
