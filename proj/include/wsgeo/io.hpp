#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "wsgeo/path.hpp"

namespace wsgeo {

// Binary containers are little-endian with explicit format-version fields and
// round-trip bit-exactly.
//
// Checkpoint layout ("WSNC", version 1):
//   magic[4] | u32 version | u32 order_id_len | order_id | u32 n_layers |
//   u32 layer_sizes[] | u8 hidden_activations[] | u8 output_activation |
//   u64 n | f64 weights[n]
//
// Path layout ("WSPF", version 1):
//   magic[4] | u32 version | spec block (order id, layers, activations) |
//   u64 spec_hash | u8 converged | u32 checkpoint_count |
//   per checkpoint: f64 weights[n], f64 loss, f64 accuracy, f64 accuracy2,
//   f64 distance_to_goal | per segment: f64 energy, f64 length
inline constexpr uint32_t kCheckpointVersion = 1;
inline constexpr uint32_t kPathVersion = 1;

void save_checkpoint(const std::string& file, const NetworkSpec& spec, const Vector& w);
std::pair<NetworkSpec, Vector> load_checkpoint(const std::string& file);

void save_path(const std::string& file, const Path& path);
Path load_path(const std::string& file);

// FNV-1a over the canonical spec block; stored in path files and checked on
// load against the embedded spec.
uint64_t spec_hash(const NetworkSpec& spec);

// Exact size in bytes of a saved path file; the layout arithmetic is part of
// the format contract.
int64_t path_file_size(const NetworkSpec& spec, int checkpoint_count);

// One row per checkpoint: index,t,loss,accuracy[,accuracy_task2],
// distance_to_goal,cumulative_energy,cumulative_length. The task-2 column is
// present when any record carries it. Doubles print with max_digits10 so
// re-emission is byte-identical.
std::string path_csv(const Path& path);

std::string train_history_csv(const std::vector<EpochRecord>& history);

// write-temp-then-rename; partial files are never observable
void atomic_write_file(const std::string& file, const std::string& bytes);
std::string read_file(const std::string& file);

std::string format_double(double v);  // shortest round-trip decimal

}  // namespace wsgeo
