#ifndef SCATTER_COMMANDS_HPP
#define SCATTER_COMMANDS_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "scatter/config.hpp"

namespace scatter {

using Path = std::filesystem::path;

// Defaults unless a config path is given.
RunConfig config_or_default(const std::optional<Path> &path);

struct GenShapesArgs {
  std::string role = "train";
  std::size_t count = 1000;
  std::uint64_t seed = 0;
  Path out;
  std::optional<Path> config;
  std::optional<Path> exclude; // shapes that must not be reproduced
};
void cmd_gen_shapes(const GenShapesArgs &args, std::ostream &log);

struct TrainArgs {
  std::optional<Path> config;
  Path shapes;
  Path out_checkpoint;
  Path out_log;
  bool resume = false; // continue from out_checkpoint
  std::optional<std::uint64_t> max_steps; // stop early in this invocation
};
void cmd_train(const TrainArgs &args, std::ostream &log);

struct PredictArgs {
  Path checkpoint;
  Path shapes;
  std::uint64_t shape_id = 0;
  std::optional<std::size_t> grid;
  Path out;
  std::optional<Path> image_prefix; // writes <prefix>_re.pgm, _im.pgm, _range.txt
  std::optional<Path> config;
};
// Returns prediction wall-clock seconds.
double cmd_predict(const PredictArgs &args, std::ostream &log);

struct OracleArgs {
  std::string kind; // "fdfd" or "cylinder"
  std::optional<Path> config;
  Path out;
  // fdfd
  std::optional<Path> shapes;
  std::uint64_t shape_id = 0;
  std::optional<std::size_t> n;
  // cylinder, or fdfd resampled onto the prediction grid
  double radius = 0.12;
  std::optional<std::size_t> grid;
};
void cmd_oracle(const OracleArgs &args, std::ostream &log, std::ostream &warn);

struct EvalArgs {
  Path checkpoint;
  Path shapes;
  Path out;
  std::optional<Path> config;
};
struct EvalRow {
  std::uint64_t shape_id = 0;
  double l2 = 0.0;
  double r2 = 0.0;
  double max_error = 0.0;
};
std::vector<EvalRow> cmd_eval(const EvalArgs &args, std::ostream &log);

struct CompareArgs {
  Path predicted;
  Path reference;
};
void cmd_compare(const CompareArgs &args, std::ostream &log);

struct BenchArgs {
  std::optional<Path> checkpoint; // freshly initialized model if absent
  Path shapes;
  Path out;
  std::optional<std::size_t> limit;
  std::optional<Path> config;
};
struct BenchRow {
  std::uint64_t shape_id = 0;
  double t_pred = 0.0;
  double t_fdfd = 0.0;
};
std::vector<BenchRow> cmd_bench(const BenchArgs &args, std::ostream &log);

// 8-bit binary PGM of one field component over an n x n cell-centered grid,
// mapped linearly from [-range, range]; masked cells are black.
void write_pgm(const Path &path, const ComplexField &field, std::size_t n,
               bool imaginary, double range);

} // namespace scatter

#endif // SCATTER_COMMANDS_HPP
