// wsgeo command line: reproducible weight-space geodesic experiments over the
// wsgeo C API. Every run writes its resolved manifest next to its outputs;
// re-running from that manifest reproduces the outputs byte for byte.
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "wsgeo.h"

namespace {

struct Cli {
  std::string config_file;
  std::vector<std::pair<std::string, std::string>> overrides;  // applied in flag order
};

int map_exit(wsg_status st, const wsg_outcome* outcome) {
  if (st == WSG_OK) return 0;
  if (outcome) return wsg_outcome_exit_code(outcome);
  switch (st) {
    case WSG_ERR_CONFIG:
    case WSG_ERR_DIMENSION:
    case WSG_ERR_INVALID: return 2;
    case WSG_ERR_NOT_CONVERGED: return 3;
    case WSG_ERR_NUMERIC: return 4;
    case WSG_ERR_IO: return 5;
    default: return 1;
  }
}

void add_common(CLI::App* cmd, Cli& cli) {
  cmd->add_option("--config", cli.config_file, "declarative config file (flags override it)");
  auto push = [&cli](const std::string& key) {
    return [&cli, key](const std::string& v) { cli.overrides.emplace_back(key, v); };
  };
  cmd->add_option_function<std::string>("--seed", push("seed"), "run seed (required)");
  cmd->add_option_function<std::string>("--out", push("out_dir"), "output directory");
  cmd->add_option_function<std::string>(
         "--set", [&cli](const std::string& kv) {
           const size_t eq = kv.find('=');
           if (eq == std::string::npos) throw CLI::ValidationError("--set expects key=value");
           cli.overrides.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
         },
         "set any config key (key=value), repeatable")
      ->take_all();
}

void add_data(CLI::App* cmd, Cli& cli, const std::string& prefix, const std::string& flag_suffix) {
  auto push = [&cli](const std::string& key) {
    return [&cli, key](const std::string& v) { cli.overrides.emplace_back(key, v); };
  };
  cmd->add_option_function<std::string>("--data" + flag_suffix, push(prefix + "kind"),
                                        "dataset kind: two_moons|blobs|idx");
  cmd->add_option_function<std::string>("--data-n" + flag_suffix, push(prefix + "n"),
                                        "synthetic sample count");
  cmd->add_option_function<std::string>("--data-noise" + flag_suffix, push(prefix + "noise"),
                                        "synthetic noise level");
  cmd->add_option_function<std::string>("--images" + flag_suffix, push(prefix + "images"),
                                        "IDX image file");
  cmd->add_option_function<std::string>("--labels" + flag_suffix, push(prefix + "labels"),
                                        "IDX label file");
  cmd->add_option_function<std::string>("--downsample" + flag_suffix, push(prefix + "downsample"),
                                        "image side length after block averaging (8|14|28)");
  cmd->add_option_function<std::string>("--test-fraction" + flag_suffix,
                                        push(prefix + "test_fraction"), "test split share");
  cmd->add_option_function<std::string>("--permute" + flag_suffix, push(prefix + "permute"),
                                        "pixel-permutation seed (0 = off)");
  cmd->add_option_function<std::string>("--train-subset" + flag_suffix,
                                        push(prefix + "train_subset"),
                                        "cap on training examples (0 = all)");
}

void add_walk(CLI::App* cmd, Cli& cli) {
  auto push = [&cli](const std::string& key) {
    return [&cli, key](const std::string& v) { cli.overrides.emplace_back(key, v); };
  };
  cmd->add_option_function<std::string>("--beta", push("walk.beta"),
                                        "trade-off beta, or comma list for a best-of grid");
  cmd->add_option_function<std::string>("--radius", push("walk.radius"), "step norm bound");
  cmd->add_option_function<std::string>("--eps-rel", push("walk.eps_rel"),
                                        "stop distance, relative to |w_start|");
  cmd->add_option_function<std::string>("--eps-abs", push("walk.eps_abs"),
                                        "absolute stop distance (overrides --eps-rel)");
  cmd->add_option_function<std::string>("--max-steps", push("walk.max_steps"), "step budget");
  cmd->add_option_function<std::string>("--walk-batch", push("walk.batch"), "metric batch size");
  cmd->add_option_function<std::string>("--resample", push("walk.resample"),
                                        "re-draw the metric batch per step (true|false)");
}

int run(const Cli& cli, const std::string& task) {
  wsg_config* cfg = nullptr;
  wsg_status st;
  if (!cli.config_file.empty()) {
    st = wsg_config_load(cli.config_file.c_str(), &cfg);
    if (st != WSG_OK) {
      std::fprintf(stderr, "error: %s\n", wsg_last_error());
      return map_exit(st, nullptr);
    }
  } else {
    wsg_config_create(&cfg);
  }
  wsg_config_set(cfg, "task", task.c_str());
  for (const auto& [key, value] : cli.overrides) wsg_config_set(cfg, key.c_str(), value.c_str());

  wsg_outcome* outcome = nullptr;
  st = wsg_run(cfg, &outcome);
  wsg_config_free(cfg);
  if (st != WSG_OK && !outcome) {
    std::fprintf(stderr, "error: %s\n", wsg_last_error());
    return map_exit(st, nullptr);
  }

  for (int32_t i = 0; i < wsg_outcome_artifact_count(outcome); ++i)
    std::printf("wrote %s\n", wsg_outcome_artifact(outcome, i));
  if (wsg_outcome_steps(outcome) > 0)
    std::printf("steps: %lld\n", static_cast<long long>(wsg_outcome_steps(outcome)));
  if (wsg_outcome_epochs(outcome) > 0)
    std::printf("epochs: %lld\n", static_cast<long long>(wsg_outcome_epochs(outcome)));
  std::printf("wall: %.3fs\n", wsg_outcome_wall_seconds(outcome));
  if (st == WSG_ERR_NOT_CONVERGED)
    std::fprintf(stderr, "warning: walk did not converge within max_steps\n");

  const int code = map_exit(st, outcome);
  wsg_outcome_free(outcome);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weight-space geodesics: sparsification and two-task merging for dense networks"};
  app.require_subcommand(1);
  Cli cli;

  CLI::App* train = app.add_subcommand("train", "train a network, write a checkpoint");
  add_common(train, cli);
  add_data(train, cli, "data.", "");
  {
    auto push = [&cli](const std::string& key) {
      return [&cli, key](const std::string& v) { cli.overrides.emplace_back(key, v); };
    };
    train->add_option_function<std::string>("--layers", push("net.layers"),
                                            "comma-separated layer sizes, e.g. 2,16,2");
    train->add_option_function<std::string>("--activation", push("net.activation"),
                                            "hidden activation: tanh|relu|identity");
    train->add_option_function<std::string>("--lr", push("train.lr"), "learning rate");
    train->add_option_function<std::string>("--epochs", push("train.epochs"), "training epochs");
    train->add_option_function<std::string>("--batch", push("train.batch"), "minibatch size");
    train->add_option_function<std::string>("--init", push("train.init"),
                                            "'random' or a checkpoint file to start from");
  }

  CLI::App* sparsify =
      app.add_subcommand("sparsify", "walk a trained network onto a sparse hyperplane");
  add_common(sparsify, cli);
  add_data(sparsify, cli, "data.", "");
  add_walk(sparsify, cli);
  {
    auto push = [&cli](const std::string& key) {
      return [&cli, key](const std::string& v) { cli.overrides.emplace_back(key, v); };
    };
    sparsify->add_option_function<std::string>("--checkpoint", push("checkpoint"),
                                               "trained checkpoint to sparsify");
    sparsify->add_option_function<std::string>("--p", push("plane.p"), "sparsity fraction");
    sparsify->add_option_function<std::string>("--rule", push("plane.rule"),
                                               "magnitude|by_unit");
    sparsify->add_flag_callback(
        "--baseline", [&cli] { cli.overrides.emplace_back("baseline.enabled", "true"); },
        "also run the iterative prune-train baseline");
    sparsify->add_option_function<std::string>("--epochs-per-cycle",
                                               push("baseline.epochs_per_cycle"),
                                               "baseline fine-tune epochs per prune cycle");
    sparsify->add_option_function<std::string>("--prune-per-cycle",
                                               push("baseline.prune_per_cycle"),
                                               "units or coordinates pruned per cycle");
  }

  CLI::App* merge =
      app.add_subcommand("merge", "walk between two trained networks and pick a merged one");
  add_common(merge, cli);
  add_data(merge, cli, "data.", "");
  add_data(merge, cli, "data2.", "2");
  add_walk(merge, cli);
  {
    auto push = [&cli](const std::string& key) {
      return [&cli, key](const std::string& v) { cli.overrides.emplace_back(key, v); };
    };
    merge->add_option_function<std::string>("--checkpoint1", push("checkpoint1"),
                                            "network trained on task 1");
    merge->add_option_function<std::string>("--checkpoint2", push("checkpoint2"),
                                            "network trained on task 2");
    merge->add_option_function<std::string>("--manifold", push("merge.manifold"),
                                            "which task's data builds the metric (1|2)");
  }

  CLI::App* evaluate = app.add_subcommand("evaluate", "re-evaluate a stored path on datasets");
  add_common(evaluate, cli);
  add_data(evaluate, cli, "data.", "");
  add_data(evaluate, cli, "data2.", "2");
  evaluate->add_option_function<std::string>(
      "--path-file",
      [&cli](const std::string& v) { cli.overrides.emplace_back("path_file", v); },
      "stored path file");

  CLI::App* emit = app.add_subcommand("emit-plot-data", "dump a stored path's records as CSV");
  add_common(emit, cli);
  emit->add_option_function<std::string>(
      "--path-file",
      [&cli](const std::string& v) { cli.overrides.emplace_back("path_file", v); },
      "stored path file");

  CLI11_PARSE(app, argc, argv);

  if (train->parsed()) return run(cli, "train");
  if (sparsify->parsed()) return run(cli, "sparsify");
  if (merge->parsed()) return run(cli, "merge");
  if (evaluate->parsed()) return run(cli, "evaluate");
  if (emit->parsed()) return run(cli, "emit-plot-data");
  return 2;
}
