#include "scatter/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <iterator>
#include <sstream>

#include "scatter/error.hpp"

namespace scatter {

namespace {

constexpr char kMagic[8] = {'P', 'G', 'I', 'D', 'O', 'N', 'E', 'T'};
// Guards against allocating from a corrupted plan before the checksum runs.
constexpr std::uint64_t kMaxDim = 1u << 16;

std::uint64_t fnv1a(const char *data, std::size_t n) {
  std::uint64_t h = 1469598103934665603ULL;
  for (std::size_t i = 0; i < n; ++i)
    h = (h ^ static_cast<unsigned char>(data[i])) * 1099511628211ULL;
  return h;
}

class Writer {
public:
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i)
      out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
      out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void bytes(const char *p, std::size_t n) { out_.append(p, n); }
  void array(std::span<const double> values) {
    u64(values.size());
    for (double v : values)
      f64(v);
  }
  std::string &str() { return out_; }

private:
  std::string out_;
};

class Reader {
public:
  explicit Reader(const std::string &bytes) : data_(bytes) {}

  std::uint64_t u64(const std::string &field) {
    need(8, field);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i]))
           << (8 * i);
    pos_ += 8;
    return v;
  }
  std::uint32_t u32(const std::string &field) {
    need(4, field);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i]))
           << (8 * i);
    pos_ += 4;
    return v;
  }
  void skip(std::size_t n, const std::string &field) {
    need(n, field);
    pos_ += n;
  }
  double f64(const std::string &field) {
    return std::bit_cast<double>(u64(field));
  }
  void array(const std::string &field, std::span<double> dst) {
    const std::uint64_t n = u64(field + ".length");
    if (n != dst.size())
      throw LoadError("field '" + field + "': length " + std::to_string(n) +
                      " does not match the plan (" + std::to_string(dst.size()) + ")");
    for (double &v : dst)
      v = f64(field);
  }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }

private:
  void need(std::size_t n, const std::string &field) const {
    if (data_.size() - pos_ < n)
      throw LoadError("truncated checkpoint at field '" + field + "'");
  }

  const std::string &data_;
  std::size_t pos_ = 0;
};

void write_plan(Writer &w, const ResNetPlan &p) {
  w.u64(static_cast<std::uint64_t>(p.input_dim));
  w.u64(static_cast<std::uint64_t>(p.width));
  w.u64(static_cast<std::uint64_t>(p.n_blocks));
  w.u64(static_cast<std::uint64_t>(p.layers_per_block));
  w.u64(static_cast<std::uint64_t>(p.output_dim));
  w.f64(p.first_omega);
}

ResNetPlan read_plan(Reader &r, const std::string &prefix) {
  auto dim = [&](const char *name) {
    const std::string field = prefix + "." + name;
    const std::uint64_t v = r.u64(field);
    if (v > kMaxDim)
      throw LoadError("field '" + field + "': implausible value " + std::to_string(v));
    return static_cast<int>(v);
  };
  ResNetPlan p;
  p.input_dim = dim("input_dim");
  p.width = dim("width");
  p.n_blocks = dim("n_blocks");
  p.layers_per_block = dim("layers_per_block");
  p.output_dim = dim("output_dim");
  p.first_omega = r.f64(prefix + ".first_omega");
  try {
    p.validate();
  } catch (const Error &e) {
    throw LoadError("field '" + prefix + "': " + e.what());
  }
  return p;
}

void write_counts(Writer &w, const PointCounts &c) {
  w.u64(c.interior);
  w.u64(c.inner);
  w.u64(c.outer);
}

PointCounts read_counts(Reader &r, const std::string &prefix) {
  PointCounts c;
  c.interior = r.u64(prefix + ".interior");
  c.inner = r.u64(prefix + ".inner");
  c.outer = r.u64(prefix + ".outer");
  return c;
}

void write_net(Writer &w, const ResNetParams &p) {
  p.for_each_array([&w](const std::string &, auto values) { w.array(values); });
}

void read_net(Reader &r, const std::string &prefix, ResNetParams &p) {
  p.for_each_array([&](const std::string &name, auto values) {
    r.array(prefix + "." + name, values);
  });
}

} // namespace

std::string encode_checkpoint(const TrainState &s) {
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.u32(kCheckpointVersion);

  write_plan(w, s.params.branch.plan);
  write_plan(w, s.params.trunk.plan);
  w.f64(s.params.branch_norm.shift);
  w.f64(s.params.branch_norm.scale);
  w.f64(s.params.trunk_norm.shift);
  w.f64(s.params.trunk_norm.scale);

  const PhysicsConfig &ph = s.params.physics;
  w.f64(ph.frequency);
  w.f64(ph.sound_speed);
  w.f64(ph.amplitude);
  w.f64(ph.direction.x);
  w.f64(ph.direction.y);
  w.f64(ph.w_pde);
  w.f64(ph.w_inner);
  w.f64(ph.w_outer);
  w.u32(ph.rigid_bc == RigidBcMode::Projected ? 0 : 1);

  const TrainConfig &tc = s.config;
  w.f64(tc.learning_rate);
  w.u64(tc.epochs);
  w.u64(tc.shapes_per_batch);
  write_counts(w, tc.points_per_batch);
  w.f64(tc.beta1);
  w.f64(tc.beta2);
  w.f64(tc.epsilon);
  w.u64(tc.seed);
  w.u64(tc.checkpoint_every);
  w.u64(tc.log_every);
  write_counts(w, tc.points_per_shape);
  w.u32(tc.resample_points ? 1 : 0);

  w.u64(s.epoch);
  w.u64(s.adam.t);
  w.f64(s.seconds);

  write_net(w, s.params.branch);
  write_net(w, s.params.trunk);
  write_net(w, s.adam.m.branch);
  write_net(w, s.adam.m.trunk);
  write_net(w, s.adam.v.branch);
  write_net(w, s.adam.v.trunk);

  const std::uint64_t sum = fnv1a(w.str().data(), w.str().size());
  w.u64(sum);
  return std::move(w.str());
}

TrainState decode_checkpoint(const std::string &bytes) {
  if (bytes.size() < sizeof kMagic ||
      !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin()))
    throw LoadError("field 'magic': not a checkpoint (bad magic string)");
  Reader r(bytes);
  r.skip(sizeof kMagic, "magic");
  const std::uint32_t version = r.u32("version");
  if (version != kCheckpointVersion)
    throw LoadError("field 'version': unsupported checkpoint version " +
                    std::to_string(version) + " (expected " +
                    std::to_string(kCheckpointVersion) + ")");

  TrainState s;
  const ResNetPlan branch_plan = read_plan(r, "branch_plan");
  const ResNetPlan trunk_plan = read_plan(r, "trunk_plan");
  s.params.branch_norm.shift = r.f64("branch_norm.shift");
  s.params.branch_norm.scale = r.f64("branch_norm.scale");
  s.params.trunk_norm.shift = r.f64("trunk_norm.shift");
  s.params.trunk_norm.scale = r.f64("trunk_norm.scale");

  PhysicsConfig &ph = s.params.physics;
  ph.frequency = r.f64("physics.frequency");
  ph.sound_speed = r.f64("physics.sound_speed");
  ph.amplitude = r.f64("physics.amplitude");
  ph.direction.x = r.f64("physics.direction.x");
  ph.direction.y = r.f64("physics.direction.y");
  ph.w_pde = r.f64("physics.w_pde");
  ph.w_inner = r.f64("physics.w_inner");
  ph.w_outer = r.f64("physics.w_outer");
  const std::uint32_t mode = r.u32("physics.rigid_bc");
  if (mode > 1)
    throw LoadError("field 'physics.rigid_bc': unknown mode " + std::to_string(mode));
  ph.rigid_bc = mode == 0 ? RigidBcMode::Projected : RigidBcMode::Literal;

  TrainConfig &tc = s.config;
  tc.learning_rate = r.f64("train.learning_rate");
  tc.epochs = r.u64("train.epochs");
  tc.shapes_per_batch = r.u64("train.shapes_per_batch");
  tc.points_per_batch = read_counts(r, "train.points_per_batch");
  tc.beta1 = r.f64("train.beta1");
  tc.beta2 = r.f64("train.beta2");
  tc.epsilon = r.f64("train.epsilon");
  tc.seed = r.u64("train.seed");
  tc.checkpoint_every = r.u64("train.checkpoint_every");
  tc.log_every = r.u64("train.log_every");
  tc.points_per_shape = read_counts(r, "train.points_per_shape");
  const std::uint32_t resample = r.u32("train.resample_points");
  if (resample > 1)
    throw LoadError("field 'train.resample_points': expected 0 or 1");
  tc.resample_points = resample == 1;

  s.epoch = r.u64("epoch");
  s.adam.t = r.u64("adam.t");
  s.seconds = r.f64("seconds");

  s.params.branch = ResNetParams::zeros(branch_plan);
  s.params.trunk = ResNetParams::zeros(trunk_plan);
  s.adam = {OperatorGradient::zeros_like(s.params),
            OperatorGradient::zeros_like(s.params), s.adam.t};
  read_net(r, "branch", s.params.branch);
  read_net(r, "trunk", s.params.trunk);
  read_net(r, "adam.m.branch", s.adam.m.branch);
  read_net(r, "adam.m.trunk", s.adam.m.trunk);
  read_net(r, "adam.v.branch", s.adam.v.branch);
  read_net(r, "adam.v.trunk", s.adam.v.trunk);

  const std::size_t body = r.pos();
  const std::uint64_t stored = r.u64("checksum");
  if (stored != fnv1a(bytes.data(), body))
    throw LoadError("field 'checksum': checkpoint contents are corrupted");
  if (r.remaining() != 0)
    throw LoadError("field 'checksum': trailing bytes after checkpoint");
  return s;
}

void save_checkpoint(const std::filesystem::path &path, const TrainState &state) {
  const std::string bytes = encode_checkpoint(state);
  // Write-then-rename so an interrupted save never clobbers the last good file.
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os)
      throw IoError("cannot write " + tmp.string());
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!os)
      throw IoError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

TrainState load_checkpoint(const std::filesystem::path &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw IoError("file not found: " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return decode_checkpoint(ss.str());
}

} // namespace scatter
