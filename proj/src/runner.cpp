#include "wsgeo/runner.hpp"

#include <chrono>
#include <filesystem>
#include <json.hpp>
#include <sstream>

#include "wsgeo/error.hpp"
#include "wsgeo/forgetting.hpp"
#include "wsgeo/idx.hpp"
#include "wsgeo/io.hpp"
#include "wsgeo/rng.hpp"
#include "wsgeo/sparsity.hpp"
#include "wsgeo/walk.hpp"

namespace wsgeo {

namespace {

using nlohmann::json;

uint64_t fnv64(const std::string& bytes) {
  uint64_t h = 1469598103934665603ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

std::string file_hash_hex(const std::string& file) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv64(read_file(file))));
  return buf;
}

struct SplitData {
  Dataset train;
  Dataset test;
};

SplitData build_dataset(const RunConfig& cfg, const std::string& prefix, uint64_t run_seed) {
  const std::string kind = cfg.get(prefix + "kind");
  uint64_t dseed = cfg.get_seed(prefix + "seed");
  if (dseed == 0) dseed = derive_seed(run_seed, prefix + "data");

  Dataset full;
  if (kind == "two_moons") {
    full = two_moons(static_cast<int>(cfg.get_int(prefix + "n")),
                     cfg.get_double(prefix + "noise"), dseed);
  } else if (kind == "blobs") {
    full = gaussian_blobs(static_cast<int>(cfg.get_int(prefix + "n")),
                          cfg.get_double(prefix + "noise"), dseed,
                          static_cast<int>(cfg.get_int(prefix + "classes")));
  } else if (kind == "idx") {
    const std::string images = cfg.get(prefix + "images");
    const std::string labels = cfg.get(prefix + "labels");
    if (images.empty() || labels.empty())
      raise(ErrorKind::Config, "idx dataset needs '" + prefix + "images' and '" + prefix + "labels'");
    IdxOptions opts;
    opts.downsample_to = static_cast<int>(cfg.get_int(prefix + "downsample"));
    opts.normalize = cfg.get_bool(prefix + "normalize");
    full = load_idx(images, labels, opts);
  } else {
    raise(ErrorKind::Config, "unknown dataset kind '" + kind + "' (two_moons|blobs|idx)");
  }

  const uint64_t permute = cfg.get_seed(prefix + "permute");
  if (permute != 0) full = permute_inputs(full, permute);

  auto [train, test] = split_dataset(full, cfg.get_double(prefix + "test_fraction"), dseed);
  train = take_prefix(train, static_cast<int>(cfg.get_int(prefix + "train_subset")));
  return {std::move(train), std::move(test)};
}

NetworkSpec spec_from_config(const RunConfig& cfg) {
  std::vector<int> sizes;
  std::stringstream ss(cfg.get("net.layers"));
  std::string item;
  while (std::getline(ss, item, ',')) sizes.push_back(std::atoi(item.c_str()));
  return NetworkSpec::dense(sizes, activation_from_string(cfg.get("net.activation")),
                            output_activation_from_string(cfg.get("net.output")));
}

WalkConfig walk_config(const RunConfig& cfg, uint64_t run_seed, double beta) {
  WalkConfig wc;
  wc.beta = {beta};
  wc.radius = cfg.get_double("walk.radius");
  wc.eps_rel = cfg.get_double("walk.eps_rel");
  wc.eps_abs = cfg.get_double("walk.eps_abs");
  wc.max_steps = static_cast<int>(cfg.get_int("walk.max_steps"));
  wc.metric_batch = static_cast<int>(cfg.get_int("walk.batch"));
  wc.resample = cfg.get_bool("walk.resample");
  wc.eval_every = static_cast<int>(cfg.get_int("walk.eval_every"));
  wc.clamp_radius_to_distance = cfg.get_bool("walk.clamp_radius");
  wc.seed = derive_seed(run_seed, "walk");
  return wc;
}

struct RunContext {
  RunConfig cfg;
  std::filesystem::path out;
  CommandOutcome outcome;
  json summary;

  std::string emit(const std::string& name, const std::string& bytes) {
    const std::string file = (out / name).string();
    atomic_write_file(file, bytes);
    outcome.artifacts.push_back(file);
    return file;
  }
};

void write_summary(RunContext& ctx) { ctx.emit("summary.json", ctx.summary.dump(2) + "\n"); }

void run_train(RunContext& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const uint64_t seed = cfg.get_seed("seed");
  const SplitData data = build_dataset(cfg, "data.", seed);
  const NetworkSpec spec = spec_from_config(cfg);
  if (data.train.input_dim() != spec.input_dim() || data.train.target_dim() != spec.output_dim())
    raise(ErrorKind::Config, "dataset dimensions do not match net.layers");

  Vector w0;
  const std::string init = cfg.get("train.init");
  if (init == "random") {
    w0 = random_init(spec, derive_seed(seed, "init-weights"));
  } else {
    auto [init_spec, init_w] = load_checkpoint(init);
    if (!(init_spec == spec)) raise(ErrorKind::Config, "train.init checkpoint spec mismatch");
    w0 = std::move(init_w);
    ctx.summary["input_hash"]["train.init"] = file_hash_hex(init);
  }

  TrainConfig tc;
  tc.lr = cfg.get_double("train.lr");
  tc.epochs = static_cast<int>(cfg.get_int("train.epochs"));
  tc.batch_size = static_cast<int>(cfg.get_int("train.batch"));
  tc.seed = derive_seed(seed, "train");
  const TrainResult res = sgd_train(spec, w0, data.train, tc);

  save_checkpoint((ctx.out / "checkpoint.wsnc").string(), spec, res.weights);
  ctx.outcome.artifacts.push_back((ctx.out / "checkpoint.wsnc").string());
  ctx.emit("train_metrics.csv", train_history_csv(res.history));

  const EvalResult train_eval = loss_and_accuracy(spec, res.weights, data.train);
  const EvalResult test_eval = loss_and_accuracy(spec, res.weights, data.test);
  ctx.outcome.epochs = tc.epochs;
  ctx.summary["train"] = {{"loss", train_eval.loss}, {"accuracy", train_eval.accuracy}};
  ctx.summary["test"] = {{"loss", test_eval.loss}, {"accuracy", test_eval.accuracy}};
  ctx.summary["epochs"] = tc.epochs;
  ctx.summary["example_grad_evals"] = res.example_grad_evals;
  write_summary(ctx);
}

// Runs a single walk or a beta-grid best-of selection, depending on the
// length of walk.beta.
WalkResult run_walk_block(RunContext& ctx, const NetworkSpec& spec, const Vector& w0,
                          const DirectionField& field, const Dataset& metric_data,
                          const Evaluator& eval) {
  const RunConfig& cfg = ctx.cfg;
  const uint64_t seed = cfg.get_seed("seed");
  const std::vector<double> betas = cfg.get_double_list("walk.beta");
  if (betas.size() == 1) {
    WalkResult res = walk(spec, w0, field, walk_config(cfg, seed, betas[0]), metric_data, eval);
    ctx.summary["walk"] = {{"beta", betas[0]},
                           {"steps", res.steps},
                           {"converged", res.path.converged},
                           {"cumulative_energy", res.path.cumulative_energy},
                           {"cumulative_length", res.path.cumulative_length},
                           {"metric_builds", res.work.metric_builds},
                           {"jacobian_rows", res.work.jacobian_rows},
                           {"cg_iterations", res.work.cg_iterations}};
    return res;
  }
  std::vector<WalkConfig> variants;
  variants.reserve(betas.size());
  for (double b : betas) variants.push_back(walk_config(cfg, seed, b));
  BestOfWalksResult best = best_of_walks(spec, w0, field, variants, metric_data, eval);
  json board = json::array();
  for (const auto& row : best.leaderboard)
    board.push_back({{"config_index", row.config_index},
                     {"beta", betas[static_cast<size_t>(row.config_index)]},
                     {"converged", row.converged},
                     {"energy", row.energy},
                     {"length", row.length},
                     {"steps", row.steps}});
  ctx.summary["walk"] = {{"selected_beta", betas[static_cast<size_t>(best.best_index)]},
                         {"selected_index", best.best_index},
                         {"leaderboard", board},
                         {"steps", best.best.steps},
                         {"converged", best.best.path.converged},
                         {"cumulative_energy", best.best.path.cumulative_energy},
                         {"cumulative_length", best.best.path.cumulative_length},
                         {"metric_builds", best.best.work.metric_builds},
                         {"jacobian_rows", best.best.work.jacobian_rows},
                         {"cg_iterations", best.best.work.cg_iterations}};
  return std::move(best.best);
}

void run_sparsify(RunContext& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const uint64_t seed = cfg.get_seed("seed");
  auto [spec, w] = load_checkpoint(cfg.get("checkpoint"));
  ctx.summary["input_hash"]["checkpoint"] = file_hash_hex(cfg.get("checkpoint"));
  const SplitData data = build_dataset(cfg, "data.", seed);
  if (data.train.input_dim() != spec.input_dim() || data.train.target_dim() != spec.output_dim())
    raise(ErrorKind::Config, "dataset dimensions do not match the checkpoint spec");

  PlaneOptions popts;
  popts.exempt_biases = cfg.get_bool("plane.exempt_biases");
  const SparsityPlane plane = make_sparsity_plane(
      spec, w, cfg.get_double("plane.p"), sparsity_rule_from_string(cfg.get("plane.rule")), popts);
  const SparsityField field(plane);
  const Evaluator eval(spec, &data.test);

  WalkResult res = run_walk_block(ctx, spec, w, field, data.train, eval);
  save_path((ctx.out / "path.wspf").string(), res.path);
  ctx.outcome.artifacts.push_back((ctx.out / "path.wspf").string());
  ctx.emit("path.csv", path_csv(res.path));

  const Vector& final_w = res.path.checkpoints.back();
  ctx.summary["plane"] = {{"rule", to_string(plane.rule)},
                          {"p", plane.p},
                          {"masked_coordinates", plane.masked_count()},
                          {"masked_fraction", plane.masked_fraction()},
                          {"on_plane", plane.on_plane(final_w)}};
  const EvalResult final_eval = loss_and_accuracy(spec, final_w, data.test);
  ctx.summary["final"] = {{"test_loss", final_eval.loss}, {"test_accuracy", final_eval.accuracy}};
  ctx.outcome.steps = res.steps;
  ctx.outcome.converged = res.path.converged;
  if (!res.path.converged) ctx.outcome.exit_code = 3;

  if (cfg.get_bool("baseline.enabled")) {
    PruneTrainConfig bc;
    bc.prune_per_cycle = static_cast<int>(cfg.get_int("baseline.prune_per_cycle"));
    bc.epochs_per_cycle = static_cast<int>(cfg.get_int("baseline.epochs_per_cycle"));
    bc.lr = cfg.get_double("baseline.lr");
    bc.batch_size = static_cast<int>(cfg.get_int("baseline.batch"));
    bc.seed = derive_seed(seed, "baseline");
    const PruneTrainResult base = prune_train_baseline(spec, w, plane, data.train, bc, eval);
    save_path((ctx.out / "baseline_path.wspf").string(), base.path);
    ctx.outcome.artifacts.push_back((ctx.out / "baseline_path.wspf").string());
    ctx.emit("baseline.csv", path_csv(base.path));
    const EvalResult base_eval =
        loss_and_accuracy(spec, base.path.checkpoints.back(), data.test);
    ctx.summary["baseline"] = {{"cycles", base.cycles},
                               {"total_epochs", base.total_epochs},
                               {"example_grad_evals", base.example_grad_evals},
                               {"test_accuracy", base_eval.accuracy}};
    ctx.outcome.epochs = base.total_epochs;
  }
  write_summary(ctx);
}

void run_merge(RunContext& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const uint64_t seed = cfg.get_seed("seed");
  auto [spec1, w1] = load_checkpoint(cfg.get("checkpoint1"));
  auto [spec2, w2] = load_checkpoint(cfg.get("checkpoint2"));
  if (!(spec1 == spec2))
    raise(ErrorKind::Config, "checkpoint1 and checkpoint2 have different network specs");
  ctx.summary["input_hash"]["checkpoint1"] = file_hash_hex(cfg.get("checkpoint1"));
  ctx.summary["input_hash"]["checkpoint2"] = file_hash_hex(cfg.get("checkpoint2"));

  const SplitData data1 = build_dataset(cfg, "data.", seed);
  const SplitData data2 = build_dataset(cfg, "data2.", seed);
  const int manifold = static_cast<int>(cfg.get_int("merge.manifold"));
  if (manifold != 1 && manifold != 2) raise(ErrorKind::Config, "merge.manifold must be 1 or 2");
  const Dataset& metric_data = manifold == 1 ? data1.train : data2.train;

  const TargetField field(w2);
  const Evaluator eval(spec1, &data1.test, &data2.test);
  WalkResult res = run_walk_block(ctx, spec1, w1, field, metric_data, eval);

  save_path((ctx.out / "path.wspf").string(), res.path);
  ctx.outcome.artifacts.push_back((ctx.out / "path.wspf").string());
  ctx.emit("dual_accuracy.csv", path_csv(res.path));

  const DualEvalResult dual =
      evaluate_dual_task(spec1, res.path.checkpoints, data1.test, data2.test);
  const auto& rec = dual.rows[static_cast<size_t>(dual.recommended_index)];
  save_checkpoint((ctx.out / "merged_checkpoint.wsnc").string(), spec1,
                  res.path.checkpoints[static_cast<size_t>(dual.recommended_index)]);
  ctx.outcome.artifacts.push_back((ctx.out / "merged_checkpoint.wsnc").string());

  ctx.summary["recommended"] = {{"index", dual.recommended_index},
                                {"accuracy_task1", rec.acc1},
                                {"accuracy_task2", rec.acc2}};
  ctx.summary["endpoints"] = {
      {"w1_task1_accuracy", dual.rows.front().acc1},
      {"w1_task2_accuracy", dual.rows.front().acc2},
      {"w2_task1_accuracy", dual.rows.back().acc1},
      {"w2_task2_accuracy", dual.rows.back().acc2}};
  ctx.outcome.steps = res.steps;
  ctx.outcome.converged = res.path.converged;
  if (!res.path.converged) ctx.outcome.exit_code = 3;
  write_summary(ctx);
}

void run_evaluate(RunContext& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const uint64_t seed = cfg.get_seed("seed");
  Path path = load_path(cfg.get("path_file"));
  ctx.summary["input_hash"]["path_file"] = file_hash_hex(cfg.get("path_file"));
  const SplitData data = build_dataset(cfg, "data.", seed);
  if (data.test.input_dim() != path.spec.input_dim() ||
      data.test.target_dim() != path.spec.output_dim())
    raise(ErrorKind::Config, "dataset dimensions do not match the path's network spec");
  const bool dual = !cfg.get("data2.kind").empty();
  SplitData data2;
  if (dual) data2 = build_dataset(cfg, "data2.", seed);

  for (size_t i = 0; i < path.checkpoints.size(); ++i) {
    const EvalResult r = loss_and_accuracy(path.spec, path.checkpoints[i], data.test);
    path.records[i].loss = r.loss;
    path.records[i].accuracy = r.accuracy;
    if (dual)
      path.records[i].accuracy2 =
          loss_and_accuracy(path.spec, path.checkpoints[i], data2.test).accuracy;
  }
  ctx.emit("evaluation.csv", path_csv(path));
  ctx.summary["checkpoints"] = path.size();
  write_summary(ctx);
}

void run_emit_plot_data(RunContext& ctx) {
  const Path path = load_path(ctx.cfg.get("path_file"));
  ctx.summary["input_hash"]["path_file"] = file_hash_hex(ctx.cfg.get("path_file"));
  ctx.emit("plot_data.csv", path_csv(path));
  ctx.summary["checkpoints"] = path.size();
  write_summary(ctx);
}

}  // namespace

CommandOutcome run_command(const RunConfig& raw) {
  const auto t0 = std::chrono::steady_clock::now();
  RunContext ctx{raw.resolved(), {}, {}, json::object()};
  ctx.out = std::filesystem::path(ctx.cfg.get("out_dir"));
  std::error_code ec;
  std::filesystem::create_directories(ctx.out, ec);
  if (ec && !std::filesystem::is_directory(ctx.out))
    raise(ErrorKind::Io, "cannot create output directory '" + ctx.out.string() + "'");

  ctx.emit("manifest.txt", ctx.cfg.manifest());

  const std::string task = ctx.cfg.task();
  if (task == "train")
    run_train(ctx);
  else if (task == "sparsify")
    run_sparsify(ctx);
  else if (task == "merge")
    run_merge(ctx);
  else if (task == "evaluate")
    run_evaluate(ctx);
  else if (task == "emit-plot-data")
    run_emit_plot_data(ctx);
  else
    raise(ErrorKind::Config, "unknown task '" + task + "'");

  ctx.outcome.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return ctx.outcome;
}

}  // namespace wsgeo
