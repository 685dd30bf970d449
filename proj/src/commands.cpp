#include "scatter/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>

#include "scatter/checkpoint.hpp"
#include "scatter/cylinder.hpp"
#include "scatter/error.hpp"
#include "scatter/fdfd.hpp"
#include "scatter/metrics.hpp"

namespace scatter {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::ofstream open_out(const Path &path, std::ios::openmode mode = std::ios::out) {
  std::ofstream os(path, mode);
  if (!os)
    throw IoError("cannot write " + path.string());
  return os;
}

void write_csv_file(const Path &path, const ComplexField &field,
                    const std::string &header) {
  auto os = open_out(path);
  write_field_csv(os, field, header);
}

// Run config as stored in a checkpoint, plus io/oracle settings from an
// optional config file.
RunConfig config_for_checkpoint(const TrainState &state,
                                const std::optional<Path> &config) {
  RunConfig cfg = config_or_default(config);
  cfg.physics = state.params.physics;
  cfg.branch = state.params.branch.plan;
  cfg.trunk = state.params.trunk.plan;
  cfg.training = state.config;
  return cfg;
}

} // namespace

RunConfig config_or_default(const std::optional<Path> &path) {
  if (!path)
    return RunConfig{};
  return load_config(*path);
}

void cmd_gen_shapes(const GenShapesArgs &args, std::ostream &log) {
  const RunConfig cfg = config_or_default(args.config);
  if (args.count < 1)
    throw InputDomainError("--count must be at least 1");
  DatasetOptions opts = cfg.dataset_options();
  std::optional<ShapeDataset> exclude;
  if (args.exclude) {
    exclude = load_dataset(*args.exclude);
    if (exclude->seed == args.seed)
      throw InputDomainError("train and test seeds must differ");
    opts.exclude = &*exclude;
  }
  const ShapeDataset ds = generate_dataset(parse_role(args.role), args.count,
                                           args.seed, opts);
  save_dataset(args.out, ds, "tool=" + std::string(kToolName) + "/" + kToolVersion +
                                 " config=" + config_hash(cfg));
  log << "wrote " << ds.shapes.size() << " shapes to " << args.out.string() << '\n';
}

void cmd_train(const TrainArgs &args, std::ostream &log) {
  const RunConfig cfg = config_or_default(args.config);
  const ShapeDataset ds = load_dataset(args.shapes);

  TrainState state;
  std::ofstream log_file;
  if (args.resume) {
    state = load_checkpoint(args.out_checkpoint);
    if (args.config && !(state.config == cfg.training &&
                         state.params.physics == cfg.physics))
      throw ConfigError("config differs from the checkpoint being resumed");
    log_file = open_out(args.out_log, std::ios::app);
  } else {
    state = init_training(cfg.training, cfg.physics, cfg.branch, cfg.trunk);
    log_file = open_out(args.out_log);
    log_file << "# " << artifact_header(cfg, cfg.training.seed) << '\n';
    write_log_header(log_file);
  }

  TrainHooks hooks;
  hooks.on_log = [&](const TrainLogRecord &rec) {
    write_log_record(log_file, rec);
    log_file.flush();
    log << "epoch " << rec.epoch << " total " << format_double(rec.total) << '\n';
  };
  hooks.on_checkpoint = [&](const TrainState &s) { save_checkpoint(args.out_checkpoint, s); };

  const std::uint64_t stop =
      args.max_steps ? state.epoch + *args.max_steps : UINT64_MAX;
  train(state, ds, hooks, stop);
  save_checkpoint(args.out_checkpoint, state);
  log << "trained to epoch " << state.epoch << "; checkpoint "
      << args.out_checkpoint.string() << '\n';
}

double cmd_predict(const PredictArgs &args, std::ostream &log) {
  const TrainState state = load_checkpoint(args.checkpoint);
  const RunConfig cfg = config_for_checkpoint(state, args.config);
  const ShapeDataset ds = load_dataset(args.shapes);
  const ShapeRecord &rec = ds.find(args.shape_id);
  const std::size_t n = args.grid.value_or(cfg.io.grid);
  if (n < 1)
    throw InputDomainError("--grid must be at least 1");

  const auto t0 = Clock::now();
  const ComplexField field = predict_grid(state.params, rec.shape, n);
  const double elapsed = seconds_since(t0);

  write_csv_file(args.out, field,
                 artifact_header(cfg, cfg.training.seed) + " shape=" +
                     std::to_string(rec.id) + " grid=" + std::to_string(n));
  if (args.image_prefix || cfg.io.write_images) {
    const Path prefix = args.image_prefix.value_or(Path(args.out).replace_extension());
    double range = 0.0;
    for (std::size_t i = 0; i < field.size(); ++i) {
      if (!field.masked(i))
        range = std::max({range, std::abs(field.values[i].real()),
                          std::abs(field.values[i].imag())});
    }
    write_pgm(Path(prefix.string() + "_re.pgm"), field, n, false, range);
    write_pgm(Path(prefix.string() + "_im.pgm"), field, n, true, range);
    auto side = open_out(Path(prefix.string() + "_range.txt"));
    side << "min " << format_double(-range) << "\nmax " << format_double(range) << '\n';
  }
  log << "prediction time " << format_double(elapsed) << " s\n";
  return elapsed;
}

void cmd_oracle(const OracleArgs &args, std::ostream &log, std::ostream &warn) {
  const RunConfig cfg = config_or_default(args.config);
  if (args.kind == "cylinder") {
    CylinderProblem prob;
    prob.radius = args.radius;
    prob.physics = cfg.physics;
    prob.n_terms = std::max(cfg.oracle.cylinder_terms, 0);
    const std::size_t n = args.grid.value_or(cfg.io.grid);
    const auto points = cell_centered_grid(n);
    const ComplexField field = cylinder_field(prob, points);
    write_csv_file(args.out, field,
                   artifact_header(cfg, 0) + " cylinder radius=" +
                       format_double(args.radius) + " grid=" + std::to_string(n));
    log << "wrote cylinder field to " << args.out.string() << '\n';
    return;
  }
  if (args.kind != "fdfd")
    throw InputDomainError("oracle kind must be fdfd or cylinder");
  if (!args.shapes)
    throw InputDomainError("fdfd oracle needs --shapes");
  const ShapeDataset ds = load_dataset(*args.shapes);
  const ShapeRecord &rec = ds.find(args.shape_id);
  const std::size_t n = args.n.value_or(cfg.oracle.fdfd_grid);
  const std::size_t floor = fdfd_resolution_floor(cfg.physics);
  if (n < floor)
    warn << "warning: grid n=" << n << " is below the resolution floor " << floor
         << "; proceeding\n";
  FdfdOptions opts;
  opts.tolerance = cfg.oracle.tolerance;
  const FdfdSolution sol = fdfd_solve(rec.shape, cfg.physics, n, opts);
  std::string header = artifact_header(cfg, ds.seed) + " fdfd shape=" +
                       std::to_string(rec.id) + " n=" + std::to_string(n) +
                       " h=" + format_double(sol.h);
  if (args.grid) {
    const auto points = cell_centered_grid(*args.grid);
    write_csv_file(args.out, sol.sample_field(points),
                   header + " grid=" + std::to_string(*args.grid));
  } else {
    write_csv_file(args.out, sol.field(), header);
  }
  log << "fdfd residual " << format_double(sol.residual) << '\n';
}

std::vector<EvalRow> cmd_eval(const EvalArgs &args, std::ostream &log) {
  const TrainState state = load_checkpoint(args.checkpoint);
  const RunConfig cfg = config_for_checkpoint(state, args.config);
  const ShapeDataset ds = load_dataset(args.shapes);
  const std::size_t n = cfg.io.grid;
  const auto points = cell_centered_grid(n);
  FdfdOptions opts;
  opts.tolerance = cfg.oracle.tolerance;

  std::vector<EvalRow> rows;
  for (const ShapeRecord &rec : ds.shapes) {
    const ComplexField pred = predict_grid(state.params, rec.shape, n);
    const FdfdSolution sol =
        fdfd_solve(rec.shape, state.params.physics, cfg.oracle.fdfd_grid, opts);
    const FieldPair pair = pair_fields(pred, sol.sample_field(points));
    const auto ep = pointwise_error(pair);
    EvalRow row{rec.id, relative_l2(pair), r2_score(pair), 0.0};
    for (double e : ep)
      row.max_error = std::max(row.max_error, e);
    rows.push_back(row);
  }

  EvalRow mean;
  for (const auto &r : rows) {
    mean.l2 += r.l2;
    mean.r2 += r.r2;
    mean.max_error += r.max_error;
  }
  const double count = static_cast<double>(rows.size());
  mean.l2 /= count;
  mean.r2 /= count;
  mean.max_error /= count;

  auto os = open_out(args.out);
  os << "# " << artifact_header(cfg, ds.seed) << " role=" << to_string(ds.role) << '\n';
  os << "shape_id,l2,r2,max_ep\n";
  for (const auto &r : rows)
    os << r.shape_id << ',' << format_double(r.l2) << ',' << format_double(r.r2)
       << ',' << format_double(r.max_error) << '\n';
  os << "mean," << format_double(mean.l2) << ',' << format_double(mean.r2) << ','
     << format_double(mean.max_error) << '\n';
  log << "[L2, R2] = [" << format_double(mean.l2) << ", " << format_double(mean.r2)
      << "] over " << rows.size() << " shapes\n";
  return rows;
}

void cmd_compare(const CompareArgs &args, std::ostream &log) {
  auto read = [](const Path &p) {
    std::ifstream is(p);
    if (!is)
      throw IoError("file not found: " + p.string());
    return read_field_csv(is);
  };
  const FieldPair pair = pair_fields(read(args.predicted), read(args.reference));
  double max_ep = 0.0;
  for (double e : pointwise_error(pair))
    max_ep = std::max(max_ep, e);
  log << "points " << pair.points.size() << '\n'
      << "l2 " << format_double(relative_l2(pair)) << '\n'
      << "r2 " << format_double(r2_score(pair)) << '\n'
      << "max_ep " << format_double(max_ep) << '\n';
}

std::vector<BenchRow> cmd_bench(const BenchArgs &args, std::ostream &log) {
  RunConfig cfg = config_or_default(args.config);
  OperatorParams params;
  if (args.checkpoint) {
    const TrainState state = load_checkpoint(*args.checkpoint);
    cfg = config_for_checkpoint(state, args.config);
    params = state.params;
  } else {
    params = init_training(cfg.training, cfg.physics, cfg.branch, cfg.trunk).params;
  }
  const ShapeDataset ds = load_dataset(args.shapes);
  const std::size_t count = std::min(ds.shapes.size(), args.limit.value_or(ds.shapes.size()));
  FdfdOptions opts;
  opts.tolerance = cfg.oracle.tolerance;

  std::vector<BenchRow> rows;
  for (std::size_t i = 0; i < count; ++i) {
    const ShapeRecord &rec = ds.shapes[i];
    BenchRow row{rec.id, 0.0, 0.0};
    auto t0 = Clock::now();
    const ComplexField pred = predict_grid(params, rec.shape, cfg.io.grid);
    row.t_pred = seconds_since(t0);
    t0 = Clock::now();
    const FdfdSolution sol = fdfd_solve(rec.shape, params.physics, cfg.oracle.fdfd_grid, opts);
    row.t_fdfd = seconds_since(t0);
    if (pred.size() == 0 || sol.values.empty())
      throw SolverError("empty field in benchmark");
    rows.push_back(row);
  }

  double mp = 0.0, mf = 0.0;
  for (const auto &r : rows) {
    mp += r.t_pred;
    mf += r.t_fdfd;
  }
  mp /= static_cast<double>(rows.size());
  mf /= static_cast<double>(rows.size());

  auto os = open_out(args.out);
  os << "# " << artifact_header(cfg, ds.seed) << " grid=" << cfg.io.grid
     << " n=" << cfg.oracle.fdfd_grid << '\n';
  os << "shape_id,t_pred,t_fdfd\n";
  for (const auto &r : rows)
    os << r.shape_id << ',' << format_double(r.t_pred) << ',' << format_double(r.t_fdfd) << '\n';
  os << "mean," << format_double(mp) << ',' << format_double(mf) << '\n';
  log << "mean t_pred " << format_double(mp) << " s, mean t_fdfd " << format_double(mf)
      << " s over " << rows.size() << " shapes\n";
  return rows;
}

void write_pgm(const Path &path, const ComplexField &field, std::size_t n,
               bool imaginary, double range) {
  if (field.size() != n * n)
    throw InputDomainError("field does not match the image grid");
  auto os = open_out(path, std::ios::out | std::ios::binary);
  os << "P5\n" << n << ' ' << n << "\n255\n";
  std::string pixels(n * n, '\0');
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t src = j * n + i;
      if (field.masked(src))
        continue;
      const double v = imaginary ? field.values[src].imag() : field.values[src].real();
      const double t = range > 0.0 ? 0.5 * (v / range + 1.0) : 0.5;
      const double g = std::clamp(std::round(t * 255.0), 0.0, 255.0);
      // Image rows run top to bottom, so the highest y comes first.
      pixels[(n - 1 - j) * n + i] = static_cast<char>(static_cast<unsigned char>(g));
    }
  }
  os.write(pixels.data(), static_cast<std::streamsize>(pixels.size()));
}

} // namespace scatter
