#ifndef SCATTER_TRAINING_HPP
#define SCATTER_TRAINING_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "scatter/adam.hpp"
#include "scatter/dataset.hpp"
#include "scatter/physics.hpp"

namespace scatter {

struct TrainConfig {
  double learning_rate = 5e-4;
  std::uint64_t epochs = 20000; // one epoch is one optimizer step
  std::size_t shapes_per_batch = 16;
  PointCounts points_per_batch{512, 64, 64};
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
  std::uint64_t checkpoint_every = 1000; // 0 disables periodic checkpoints
  std::uint64_t log_every = 100;
  // Points sampled once per shape; resample_points draws fresh sets each epoch.
  PointCounts points_per_shape{};
  bool resample_points = false;

  AdamConfig adam() const { return {learning_rate, beta1, beta2, epsilon}; }
  void validate() const;
  friend bool operator==(const TrainConfig &, const TrainConfig &) = default;
};

struct TrainLogRecord {
  std::uint64_t epoch = 0;
  double pde = 0.0;
  double inner_bc = 0.0;
  double outer_bc = 0.0;
  double total = 0.0;
  double seconds = 0.0; // wall clock since the run started
};

// Everything a checkpoint holds; epoch counts completed steps.
struct TrainState {
  OperatorParams params;
  AdamState adam;
  TrainConfig config;
  std::uint64_t epoch = 0;
  double seconds = 0.0;
};

TrainState init_training(const TrainConfig &cfg, const PhysicsConfig &physics,
                         const ResNetPlan &branch_plan = ResNetPlan::branch(),
                         const ResNetPlan &trunk_plan = ResNetPlan::trunk());

struct TrainHooks {
  std::function<void(const TrainLogRecord &)> on_log;
  // Called with a consistent state after every checkpoint_every steps and at
  // the end of the run.
  std::function<void(const TrainState &)> on_checkpoint;
  // Called after every step.
  std::function<void(const TrainState &)> on_step;
};

// Fixed per-shape point set used by the training loop.
PointSet training_points(const TrainConfig &cfg, const ShapeRecord &rec,
                         std::uint64_t epoch = 0);

// Runs steps state.epoch .. min(cfg.epochs, stop_epoch) - 1. Every step
// draws its shapes and point subsets from a stream seeded by (seed, epoch),
// so a resumed run is bitwise identical to an uninterrupted one.
std::vector<TrainLogRecord> train(TrainState &state, const ShapeDataset &ds,
                                  const TrainHooks &hooks = {},
                                  std::uint64_t stop_epoch = UINT64_MAX);

// Loss over every fixed point of every shape in the dataset.
ResidualBreakdown full_loss(const OperatorParams &params, const TrainConfig &cfg,
                            const ShapeDataset &ds);

void write_log_header(std::ostream &os);
void write_log_record(std::ostream &os, const TrainLogRecord &rec);

} // namespace scatter

#endif // SCATTER_TRAINING_HPP
