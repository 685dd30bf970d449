#ifndef SCATTER_NET_HPP
#define SCATTER_NET_HPP

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scatter/geometry.hpp"
#include "scatter/rng.hpp"

namespace scatter {

struct DenseLayer {
  Eigen::MatrixXd weight; // out x in
  Eigen::VectorXd bias;   // out
};

// Sine residual network: input projection -> n_blocks residual blocks of
// layers_per_block linear layers -> linear output projection.
struct ResNetPlan {
  int input_dim = 2;
  int width = 100;
  int n_blocks = 5;
  int layers_per_block = 3;
  int output_dim = 200;
  // Frequency applied inside the input projection's sine only.
  double first_omega = 1.0;

  static ResNetPlan branch();
  static ResNetPlan trunk();

  std::size_t parameter_count() const;
  void validate() const;
  friend bool operator==(const ResNetPlan &, const ResNetPlan &) = default;
};

struct ResNetParams {
  ResNetPlan plan;
  DenseLayer input;
  std::vector<std::vector<DenseLayer>> blocks;
  DenseLayer output;

  static ResNetParams zeros(const ResNetPlan &plan);
  std::size_t count() const;

  // Visits every weight and bias array in declaration order:
  // input.weight, input.bias, block0.layer0.weight, ..., output.bias.
  template <typename F> void for_each_array(F &&f) {
    visit(*this, f);
  }
  template <typename F> void for_each_array(F &&f) const {
    visit(*this, f);
  }

private:
  template <typename Self, typename F> static void visit(Self &self, F &f) {
    auto layer = [&f](auto &l, const std::string &name) {
      f(name + ".weight", std::span(l.weight.data(), l.weight.size()));
      f(name + ".bias", std::span(l.bias.data(), l.bias.size()));
    };
    layer(self.input, "input");
    for (std::size_t b = 0; b < self.blocks.size(); ++b)
      for (std::size_t l = 0; l < self.blocks[b].size(); ++l)
        layer(self.blocks[b][l],
              "block" + std::to_string(b) + ".layer" + std::to_string(l));
    layer(self.output, "output");
  }
};

// Value, gradient and Hessian (xx, xy, yy) of one output w.r.t. 2-D input.
struct SpatialJet {
  double value = 0.0;
  std::array<double, 2> grad{};
  std::array<double, 3> hess{};
};

// Number of channels in a jet batch: value, d/dx, d/dy, d2/dx2, d2/dxdy,
// d2/dy2. A plain batch has only the value channel.
inline constexpr int kJetChannels = 6;

// Channel-blocked batch: columns [c*P, (c+1)*P) hold channel c of P points.
struct ChannelBatch {
  Eigen::MatrixXd data;
  int channels = 1;
  Eigen::Index points = 0;

  auto channel(int c) { return data.middleCols(c * points, points); }
  auto channel(int c) const { return data.middleCols(c * points, points); }
};

// Intermediate values kept by a taped forward pass for reverse mode.
struct ForwardTape {
  int channels = 1;
  Eigen::Index points = 0;
  std::vector<Eigen::MatrixXd> layer_inputs; // input of every linear layer
  std::vector<Eigen::MatrixXd> pre;          // scaled pre-activations
  std::vector<Eigen::ArrayXXd> sin, cos;     // of the value channel
  ChannelBatch output;
};

ResNetParams init_params(const ResNetPlan &plan, Rng &rng);

Eigen::VectorXd forward(const ResNetParams &params, const Eigen::VectorXd &x);
// One column per input point.
Eigen::MatrixXd forward_batch(const ResNetParams &params,
                              const Eigen::MatrixXd &x);

std::vector<SpatialJet> forward_jet(const ResNetParams &params, Vec2 x);
// Jets for a 2 x P batch of points.
ChannelBatch forward_jet_batch(const ResNetParams &params,
                               const Eigen::Matrix2Xd &x);

// Taped passes. channels is 1 (values only) or kJetChannels (needs a 2-D
// input); the tape feeds backward_tape.
ForwardTape forward_tape(const ResNetParams &params, const Eigen::MatrixXd &x,
                         int channels);
// Accumulates d<upstream, output>/dparams into grad. upstream has the shape
// of tape.output.data.
void backward_tape(const ResNetParams &params, const ForwardTape &tape,
                   const Eigen::MatrixXd &upstream, ResNetParams &grad);

ResNetParams backward(const ResNetParams &params, const Eigen::VectorXd &x,
                      const Eigen::VectorXd &upstream);
// upstream[j] holds d loss / d(value, grad, hess) of output j.
ResNetParams backward_jet(const ResNetParams &params, Vec2 x,
                          const std::vector<SpatialJet> &upstream);

// a += s * b over every parameter array.
void axpy(double s, const ResNetParams &b, ResNetParams &a);
double dot(const ResNetParams &a, const ResNetParams &b);

} // namespace scatter

#endif // SCATTER_NET_HPP
