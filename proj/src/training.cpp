#include "scatter/training.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>

#include "scatter/error.hpp"
#include "scatter/field.hpp"
#include "scatter/parallel.hpp"

namespace scatter {

namespace {

constexpr std::uint64_t kInitTag = 0x696e6974;   // "init"
constexpr std::uint64_t kEpochTag = 0x65706f63;  // "epoc"
constexpr std::uint64_t kPointsTag = 0x70747321; // "pts!"

// First k entries of a seeded permutation of [0, n).
std::vector<std::size_t> draw_without_replacement(Rng &rng, std::size_t n,
                                                  std::size_t k) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + uniform_index(rng, n - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

template <typename T>
std::vector<T> subset(const std::vector<T> &all, Rng &rng, std::size_t k) {
  std::vector<T> out;
  out.reserve(k);
  for (std::size_t i : draw_without_replacement(rng, all.size(), k))
    out.push_back(all[i]);
  return out;
}

std::vector<PointSet> build_point_sets(const TrainConfig &cfg,
                                       const ShapeDataset &ds,
                                       std::uint64_t epoch) {
  std::vector<PointSet> sets(ds.shapes.size());
  parallel_for(ds.shapes.size(), [&](std::size_t i) {
    sets[i] = training_points(cfg, ds.shapes[i], epoch);
  });
  return sets;
}

} // namespace

void TrainConfig::validate() const {
  adam().validate();
  if (epochs < 1)
    throw InputDomainError("epochs must be at least 1");
  if (shapes_per_batch < 1)
    throw InputDomainError("shapes_per_batch must be at least 1");
  if (points_per_batch.interior < 1 || points_per_batch.inner < 1 ||
      points_per_batch.outer < 1)
    throw InputDomainError("points per batch must be at least 1 per role");
  if (points_per_batch.interior > points_per_shape.interior ||
      points_per_batch.inner > points_per_shape.inner ||
      points_per_batch.outer > points_per_shape.outer)
    throw InputDomainError("points per batch exceed points per shape");
  if (log_every < 1)
    throw InputDomainError("log_every must be at least 1");
}

TrainState init_training(const TrainConfig &cfg, const PhysicsConfig &physics,
                         const ResNetPlan &branch_plan,
                         const ResNetPlan &trunk_plan) {
  cfg.validate();
  physics.validate();
  Rng rng(mix_seed({cfg.seed, kInitTag}));
  TrainState state;
  state.params = init_operator(rng, branch_plan, trunk_plan);
  state.params.physics = physics;
  state.adam = AdamState::zeros_like(state.params);
  state.config = cfg;
  return state;
}

PointSet training_points(const TrainConfig &cfg, const ShapeRecord &rec,
                         std::uint64_t epoch) {
  Rng rng(mix_seed({cfg.seed, kPointsTag, rec.id,
                    cfg.resample_points ? epoch : 0}));
  return sample_points(rec.shape, cfg.points_per_shape, rng);
}

std::vector<TrainLogRecord> train(TrainState &state, const ShapeDataset &ds,
                                  const TrainHooks &hooks,
                                  std::uint64_t stop_epoch) {
  const TrainConfig &cfg = state.config;
  cfg.validate();
  state.params.physics.validate();
  if (ds.role != DatasetRole::Train)
    throw InputDomainError("training needs a dataset with role 'train'");
  if (cfg.shapes_per_batch > ds.shapes.size())
    throw InputDomainError("shapes_per_batch exceeds the dataset size");

  const auto started = std::chrono::steady_clock::now();
  const double seconds_before = state.seconds;
  auto elapsed = [&] {
    return seconds_before +
           std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
               .count();
  };

  std::vector<PointSet> fixed;
  if (!cfg.resample_points)
    fixed = build_point_sets(cfg, ds, 0);

  const std::uint64_t last = std::min(cfg.epochs, stop_epoch);
  std::vector<TrainLogRecord> log;
  const AdamConfig adam_cfg = cfg.adam();
  while (state.epoch < last) {
    const std::uint64_t e = state.epoch;
    Rng rng(mix_seed({cfg.seed, kEpochTag, e}));
    const auto picks =
        draw_without_replacement(rng, ds.shapes.size(), cfg.shapes_per_batch);

    std::vector<ShapeBatch> batch;
    batch.reserve(picks.size());
    for (std::size_t s : picks) {
      PointSet fresh;
      if (cfg.resample_points)
        fresh = training_points(cfg, ds.shapes[s], e);
      const PointSet &all = cfg.resample_points ? fresh : fixed[s];
      ShapeBatch b;
      b.shape = ds.shapes[s].shape;
      b.points.interior = subset(all.interior, rng, cfg.points_per_batch.interior);
      b.points.inner_boundary = subset(all.inner_boundary, rng, cfg.points_per_batch.inner);
      b.points.outer_boundary = subset(all.outer_boundary, rng, cfg.points_per_batch.outer);
      batch.push_back(std::move(b));
    }

    const LossGradient lg = loss_gradient(state.params, batch, state.params.physics);
    const ResidualBreakdown &l = lg.loss;
    if (!std::isfinite(l.total) || !std::isfinite(l.pde) ||
        !std::isfinite(l.inner_bc) || !std::isfinite(l.outer_bc))
      throw TrainingError("non-finite loss at epoch " + std::to_string(e));
    adam_step(state.adam, state.params, lg.grad, adam_cfg);
    state.epoch = e + 1;
    state.seconds = elapsed();

    if (e == 0 || state.epoch % cfg.log_every == 0 || state.epoch == cfg.epochs) {
      const TrainLogRecord rec{e, l.pde, l.inner_bc, l.outer_bc, l.total,
                               state.seconds};
      log.push_back(rec);
      if (hooks.on_log)
        hooks.on_log(rec);
    }
    if (hooks.on_step)
      hooks.on_step(state);
    const bool periodic = cfg.checkpoint_every > 0 &&
                          state.epoch % cfg.checkpoint_every == 0;
    if (hooks.on_checkpoint && (periodic || state.epoch == last))
      hooks.on_checkpoint(state);
  }
  return log;
}

ResidualBreakdown full_loss(const OperatorParams &params, const TrainConfig &cfg,
                            const ShapeDataset &ds) {
  const std::vector<PointSet> sets = build_point_sets(cfg, ds, 0);
  std::vector<ShapeBatch> batch;
  for (std::size_t i = 0; i < ds.shapes.size(); ++i)
    batch.push_back({ds.shapes[i].shape, sets[i]});
  return loss(params, batch, params.physics);
}

void write_log_header(std::ostream &os) {
  os << "epoch,pde,inner_bc,outer_bc,total,seconds\n";
}

void write_log_record(std::ostream &os, const TrainLogRecord &rec) {
  os << rec.epoch << ',' << format_double(rec.pde) << ','
     << format_double(rec.inner_bc) << ',' << format_double(rec.outer_bc) << ','
     << format_double(rec.total) << ',' << format_double(rec.seconds) << '\n';
}

} // namespace scatter
