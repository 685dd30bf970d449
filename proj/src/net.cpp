#include "scatter/net.hpp"

#include <cmath>

#include "scatter/error.hpp"
#include "vmath.hpp"

namespace scatter {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;

enum Channel { kValue = 0, kDx, kDy, kDxx, kDxy, kDyy };

void require_channels(int channels) {
  if (channels != 1 && channels != kJetChannels)
    throw InputDomainError("channel count must be 1 or 6");
}

// out = W in (+ b on the value channel). The value channel is a separate
// product so a plain pass and a jet pass round identically.
void linear(const DenseLayer &layer, const MatrixXd &in, int channels,
            Index points, MatrixXd &out) {
  out.resize(layer.weight.rows(), in.cols());
  out.leftCols(points).noalias() = layer.weight * in.leftCols(points);
  out.leftCols(points).colwise() += layer.bias;
  if (channels > 1) {
    const Index rest = (channels - 1) * points;
    out.rightCols(rest).noalias() = layer.weight * in.rightCols(rest);
  }
}

// a = sin(z) propagated through value, gradient and Hessian channels.
void sine_forward(const MatrixXd &z, int channels, Index points,
                  const Eigen::ArrayXXd &s, const Eigen::ArrayXXd &c,
                  MatrixXd &a) {
  a.resize(z.rows(), z.cols());
  a.leftCols(points) = s.matrix();
  if (channels == 1)
    return;
  auto blk = [&](const MatrixXd &m, int ch) {
    return m.middleCols(ch * points, points).array();
  };
  const auto zx = blk(z, kDx), zy = blk(z, kDy);
  a.middleCols(kDx * points, points) = (c * zx).matrix();
  a.middleCols(kDy * points, points) = (c * zy).matrix();
  a.middleCols(kDxx * points, points) =
      (c * blk(z, kDxx) - s * zx * zx).matrix();
  a.middleCols(kDxy * points, points) =
      (c * blk(z, kDxy) - s * zx * zy).matrix();
  a.middleCols(kDyy * points, points) =
      (c * blk(z, kDyy) - s * zy * zy).matrix();
}

// Reverse of sine_forward: maps dL/da to dL/dz.
MatrixXd sine_backward(const MatrixXd &ga, const MatrixXd &z, int channels,
                       Index points, const Eigen::ArrayXXd &s,
                       const Eigen::ArrayXXd &c) {
  MatrixXd gz(ga.rows(), ga.cols());
  auto blk = [&](const MatrixXd &m, int ch) {
    return m.middleCols(ch * points, points).array();
  };
  if (channels == 1) {
    gz = (ga.array() * c).matrix();
    return gz;
  }
  const auto zx = blk(z, kDx), zy = blk(z, kDy);
  const auto gx = blk(ga, kDx), gy = blk(ga, kDy);
  const auto gxx = blk(ga, kDxx), gxy = blk(ga, kDxy), gyy = blk(ga, kDyy);

  gz.leftCols(points) =
      (blk(ga, kValue) * c -
       s * (gx * zx + gy * zy + gxx * blk(z, kDxx) + gxy * blk(z, kDxy) +
            gyy * blk(z, kDyy)) -
       c * (gxx * zx * zx + gxy * zx * zy + gyy * zy * zy))
          .matrix();
  gz.middleCols(kDx * points, points) =
      (gx * c - s * (2.0 * gxx * zx + gxy * zy)).matrix();
  gz.middleCols(kDy * points, points) =
      (gy * c - s * (2.0 * gyy * zy + gxy * zx)).matrix();
  gz.middleCols(kDxx * points, points) = (gxx * c).matrix();
  gz.middleCols(kDxy * points, points) = (gxy * c).matrix();
  gz.middleCols(kDyy * points, points) = (gyy * c).matrix();
  return gz;
}

// Input batch with seeded derivative channels: d(x)/dx = e_x, d(x)/dy = e_y.
MatrixXd seed_input(const MatrixXd &x, int channels) {
  const Index p = x.cols();
  MatrixXd in = MatrixXd::Zero(x.rows(), channels * p);
  in.leftCols(p) = x;
  if (channels > 1) {
    in.row(0).segment(kDx * p, p).setOnes();
    in.row(1).segment(kDy * p, p).setOnes();
  }
  return in;
}

// Visits linear layers in evaluation order with their activation frequency
// (0 = not activated).
template <typename Params, typename F>
void for_each_layer(Params &params, F &&f) {
  f(params.input, params.plan.first_omega);
  for (auto &block : params.blocks) {
    for (std::size_t l = 0; l < block.size(); ++l)
      f(block[l], l + 1 < block.size() ? 1.0 : 0.0);
  }
  f(params.output, 0.0);
}

} // namespace

ResNetPlan ResNetPlan::branch() {
  ResNetPlan p;
  p.input_dim = 16;
  return p;
}

ResNetPlan ResNetPlan::trunk() {
  ResNetPlan p;
  p.input_dim = 2;
  p.first_omega = 10.0;
  return p;
}

std::size_t ResNetPlan::parameter_count() const {
  const auto w = static_cast<std::size_t>(width);
  return w * input_dim + w +
         static_cast<std::size_t>(n_blocks * layers_per_block) * (w * w + w) +
         static_cast<std::size_t>(output_dim) * w + output_dim;
}

void ResNetPlan::validate() const {
  if (input_dim < 1 || width < 1 || n_blocks < 0 || layers_per_block < 1 ||
      output_dim < 1)
    throw InputDomainError("network plan dimensions must be positive");
  if (!(first_omega > 0.0) || !std::isfinite(first_omega))
    throw InputDomainError("first-layer frequency must be positive");
}

ResNetParams ResNetParams::zeros(const ResNetPlan &plan) {
  plan.validate();
  auto layer = [](int out, int in) {
    return DenseLayer{MatrixXd::Zero(out, in), Eigen::VectorXd::Zero(out)};
  };
  ResNetParams p;
  p.plan = plan;
  p.input = layer(plan.width, plan.input_dim);
  p.blocks.assign(plan.n_blocks, {});
  for (auto &block : p.blocks)
    for (int l = 0; l < plan.layers_per_block; ++l)
      block.push_back(layer(plan.width, plan.width));
  p.output = layer(plan.output_dim, plan.width);
  return p;
}

std::size_t ResNetParams::count() const {
  std::size_t n = 0;
  for_each_array([&n](const std::string &, auto values) { n += values.size(); });
  return n;
}

ResNetParams init_params(const ResNetPlan &plan, Rng &rng) {
  ResNetParams p = ResNetParams::zeros(plan);
  for_each_layer(p, [&rng](DenseLayer &layer, double) {
    const double bound = std::sqrt(6.0 / static_cast<double>(layer.weight.cols()));
    // Column-major fill order keeps the stream layout-independent.
    for (Index j = 0; j < layer.weight.cols(); ++j)
      for (Index i = 0; i < layer.weight.rows(); ++i)
        layer.weight(i, j) = uniform(rng, -bound, bound);
  });
  return p;
}

ForwardTape forward_tape(const ResNetParams &params, const MatrixXd &x,
                         int channels) {
  require_channels(channels);
  if (x.rows() != params.plan.input_dim)
    throw InputDomainError("input has " + std::to_string(x.rows()) +
                           " rows, network expects " +
                           std::to_string(params.plan.input_dim));
  if (channels > 1 && params.plan.input_dim != 2)
    throw InputDomainError("spatial jets need a 2-D input");

  ForwardTape tape;
  tape.channels = channels;
  tape.points = x.cols();
  const Index p = x.cols();

  MatrixXd h = seed_input(x, channels);
  MatrixXd z, a;
  MatrixXd block_input;
  std::size_t layer_index = 0;
  const std::size_t per_block = params.plan.layers_per_block;

  for_each_layer(params, [&](const DenseLayer &layer, double omega) {
    const bool block_layer =
        layer_index >= 1 && layer_index < 1 + params.blocks.size() * per_block;
    const std::size_t pos_in_block = block_layer ? (layer_index - 1) % per_block : 0;
    if (block_layer && pos_in_block == 0)
      block_input = h;

    tape.layer_inputs.push_back(h);
    linear(layer, h, channels, p, z);
    if (omega > 0.0) {
      if (omega != 1.0)
        z *= omega;
      Eigen::ArrayXXd s(z.rows(), p), c(z.rows(), p);
      detail::vsin(z.data(), s.data(), static_cast<std::size_t>(s.size()));
      detail::vcos(z.data(), c.data(), static_cast<std::size_t>(c.size()));
      sine_forward(z, channels, p, s, c, a);
      tape.pre.push_back(z);
      tape.sin.push_back(std::move(s));
      tape.cos.push_back(std::move(c));
      h.swap(a);
    } else {
      h.swap(z);
      if (block_layer && pos_in_block + 1 == per_block)
        h += block_input;
    }
    ++layer_index;
  });

  tape.output.data = std::move(h);
  tape.output.channels = channels;
  tape.output.points = p;
  return tape;
}

void backward_tape(const ResNetParams &params, const ForwardTape &tape,
                   const MatrixXd &upstream, ResNetParams &grad) {
  if (upstream.rows() != tape.output.data.rows() ||
      upstream.cols() != tape.output.data.cols())
    throw InputDomainError("upstream shape does not match network output");
  if (!(grad.plan == params.plan))
    throw InputDomainError("gradient plan does not match parameters");

  const Index p = tape.points;
  const int channels = tape.channels;
  const std::size_t per_block = params.plan.layers_per_block;

  // Flatten layers in evaluation order so we can walk them backwards.
  std::vector<std::pair<const DenseLayer *, DenseLayer *>> layers;
  std::vector<double> omegas;
  for_each_layer(params, [&](const DenseLayer &l, double omega) {
    layers.push_back({&l, nullptr});
    omegas.push_back(omega);
  });
  std::size_t k = 0;
  for_each_layer(grad, [&](DenseLayer &l, double) { layers[k++].second = &l; });

  std::size_t act = tape.pre.size();
  MatrixXd g = upstream;
  MatrixXd skip;
  for (std::size_t li = layers.size(); li-- > 0;) {
    const bool block_layer =
        li >= 1 && li < 1 + params.blocks.size() * per_block;
    const std::size_t pos_in_block = block_layer ? (li - 1) % per_block : 0;

    if (block_layer && pos_in_block + 1 == per_block)
      skip = g; // gradient flowing through the identity branch

    if (omegas[li] > 0.0) {
      --act;
      g = sine_backward(g, tape.pre[act], channels, p, tape.sin[act],
                        tape.cos[act]);
      if (omegas[li] != 1.0)
        g *= omegas[li];
    }

    const DenseLayer &layer = *layers[li].first;
    DenseLayer &dlayer = *layers[li].second;
    const MatrixXd &in = tape.layer_inputs[li];
    dlayer.weight.noalias() += g * in.transpose();
    dlayer.bias += g.leftCols(p).rowwise().sum();
    if (li == 0)
      break;
    MatrixXd gin = layer.weight.transpose() * g;
    if (block_layer && pos_in_block == 0)
      gin += skip;
    g.swap(gin);
  }
}

Eigen::MatrixXd forward_batch(const ResNetParams &params, const MatrixXd &x) {
  if (x.rows() != params.plan.input_dim)
    throw InputDomainError("input has " + std::to_string(x.rows()) +
                           " rows, network expects " +
                           std::to_string(params.plan.input_dim));
  // Same arithmetic as the value channel of forward_tape, without the tape.
  const Index p = x.cols();
  MatrixXd h = x;
  MatrixXd z, block_input;
  std::size_t layer_index = 0;
  const std::size_t per_block = params.plan.layers_per_block;
  for_each_layer(params, [&](const DenseLayer &layer, double omega) {
    const bool block_layer =
        layer_index >= 1 && layer_index < 1 + params.blocks.size() * per_block;
    const std::size_t pos_in_block = block_layer ? (layer_index - 1) % per_block : 0;
    if (block_layer && pos_in_block == 0)
      block_input = h;
    linear(layer, h, 1, p, z);
    if (omega > 0.0) {
      if (omega != 1.0)
        z *= omega;
      h.resize(z.rows(), z.cols());
      detail::vsin(z.data(), h.data(), static_cast<std::size_t>(z.size()));
    } else {
      h.swap(z);
      if (block_layer && pos_in_block + 1 == per_block)
        h += block_input;
    }
    ++layer_index;
  });
  return h;
}

Eigen::VectorXd forward(const ResNetParams &params, const Eigen::VectorXd &x) {
  return forward_batch(params, x);
}

ChannelBatch forward_jet_batch(const ResNetParams &params,
                               const Eigen::Matrix2Xd &x) {
  return std::move(forward_tape(params, x, kJetChannels).output);
}

std::vector<SpatialJet> forward_jet(const ResNetParams &params, Vec2 x) {
  Eigen::Matrix2Xd in(2, 1);
  in << x.x, x.y;
  const ChannelBatch out = forward_jet_batch(params, in);
  std::vector<SpatialJet> jets(out.data.rows());
  for (Index j = 0; j < out.data.rows(); ++j) {
    const auto row = out.data.row(j);
    jets[j] = {row[kValue], {row[kDx], row[kDy]}, {row[kDxx], row[kDxy], row[kDyy]}};
  }
  return jets;
}

ResNetParams backward(const ResNetParams &params, const Eigen::VectorXd &x,
                      const Eigen::VectorXd &upstream) {
  const ForwardTape tape = forward_tape(params, x, 1);
  ResNetParams grad = ResNetParams::zeros(params.plan);
  backward_tape(params, tape, upstream, grad);
  return grad;
}

ResNetParams backward_jet(const ResNetParams &params, Vec2 x,
                          const std::vector<SpatialJet> &upstream) {
  Eigen::Matrix2Xd in(2, 1);
  in << x.x, x.y;
  const ForwardTape tape = forward_tape(params, in, kJetChannels);
  if (static_cast<Index>(upstream.size()) != tape.output.data.rows())
    throw InputDomainError("upstream jet count does not match output size");
  MatrixXd up(tape.output.data.rows(), kJetChannels);
  for (std::size_t j = 0; j < upstream.size(); ++j) {
    const auto &u = upstream[j];
    up.row(j) << u.value, u.grad[0], u.grad[1], u.hess[0], u.hess[1], u.hess[2];
  }
  ResNetParams grad = ResNetParams::zeros(params.plan);
  backward_tape(params, tape, up, grad);
  return grad;
}

void axpy(double s, const ResNetParams &b, ResNetParams &a) {
  std::vector<std::span<const double>> src;
  b.for_each_array([&src](const std::string &, auto v) { src.push_back(v); });
  std::size_t k = 0;
  a.for_each_array([&](const std::string &, auto v) {
    const auto &from = src.at(k++);
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] += s * from[i];
  });
}

double dot(const ResNetParams &a, const ResNetParams &b) {
  std::vector<std::span<const double>> src;
  b.for_each_array([&src](const std::string &, auto v) { src.push_back(v); });
  std::size_t k = 0;
  double sum = 0.0;
  a.for_each_array([&](const std::string &, auto v) {
    const auto &other = src.at(k++);
    for (std::size_t i = 0; i < v.size(); ++i)
      sum += v[i] * other[i];
  });
  return sum;
}

} // namespace scatter
