#ifndef SCATTER_DEEPONET_HPP
#define SCATTER_DEEPONET_HPP

#include <complex>
#include <cstddef>
#include <list>
#include <mutex>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "scatter/field.hpp"
#include "scatter/geometry.hpp"
#include "scatter/net.hpp"
#include "scatter/physics_config.hpp"

namespace scatter {

using Complex = std::complex<double>;

// Affine map applied to raw network inputs: (x - shift) * scale.
struct InputNormalization {
  double shift = 0.0;
  double scale = 1.0;
  friend bool operator==(const InputNormalization &,
                         const InputNormalization &) = default;
};

// Number of basis functions per complex component; branch and trunk outputs
// are 2 * kBasisSize long, real half first.
inline constexpr int kBasisSize = 100;

struct OperatorParams {
  ResNetParams branch; // 16 -> 200
  ResNetParams trunk;  // 2 -> 200
  // Branch magnitudes in [0.05, 0.15] map to [-1, 1]; trunk uses raw [0,1]^2.
  InputNormalization branch_norm{0.10, 20.0};
  InputNormalization trunk_norm{0.0, 1.0};
  PhysicsConfig physics;

  std::size_t count() const { return branch.count() + trunk.count(); }
};

// Parameter-shaped container for gradients and optimizer moments.
struct OperatorGradient {
  ResNetParams branch;
  ResNetParams trunk;

  static OperatorGradient zeros_like(const OperatorParams &params);
  template <typename F> void for_each_array(F &&f) {
    branch.for_each_array([&f](const std::string &name, auto v) { f("branch." + name, v); });
    trunk.for_each_array([&f](const std::string &name, auto v) { f("trunk." + name, v); });
  }
  template <typename F> void for_each_array(F &&f) const {
    branch.for_each_array([&f](const std::string &name, auto v) { f("branch." + name, v); });
    trunk.for_each_array([&f](const std::string &name, auto v) { f("trunk." + name, v); });
  }
};

// Full-sized plans with freshly initialized weights.
OperatorParams init_operator(Rng &rng, ResNetPlan branch_plan = ResNetPlan::branch(),
                             ResNetPlan trunk_plan = ResNetPlan::trunk());

Eigen::VectorXd branch_input(const OperatorParams &params, const ShapeVector &v);

// LRU cache of branch outputs keyed by the exact 16 input values.
class BranchCache {
public:
  explicit BranchCache(std::size_t capacity = 128) : capacity_(capacity) {}

  Eigen::VectorXd get(const OperatorParams &params, const ShapeVector &v);
  std::size_t size() const;
  std::size_t hits() const;
  void clear();

private:
  struct KeyHash {
    std::size_t operator()(const std::array<double, 16> &k) const;
  };
  using Entry = std::pair<std::array<double, 16>, Eigen::VectorXd>;

  std::size_t capacity_;
  mutable std::mutex mutex_;
  std::list<Entry> order_; // front = most recently used
  std::unordered_map<std::array<double, 16>,
                     std::list<Entry>::iterator, KeyHash> index_;
  std::size_t hits_ = 0;
};

// Branch coefficients for v: from the cache when given, else computed.
Eigen::VectorXd branch_coefficients(const OperatorParams &params,
                                    const ShapeVector &v,
                                    BranchCache *cache = nullptr);

// <beta_re, tau_re> + i <beta_im, tau_im>.
Complex combine(const Eigen::VectorXd &beta, const Eigen::VectorXd &tau);

Complex predict(const OperatorParams &params, const ShapeVector &v, Vec2 x,
                BranchCache *cache = nullptr);
// Same as predict with a caller-supplied branch output (testing hook).
Complex predict_with_branch(const OperatorParams &params,
                            const Eigen::VectorXd &beta, Vec2 x);

struct FieldJet {
  Complex value;
  Complex dx;
  Complex dy;
  Complex laplacian;
};

FieldJet predict_jet(const OperatorParams &params, const ShapeVector &v, Vec2 x,
                     BranchCache *cache = nullptr);
FieldJet predict_jet_with_branch(const OperatorParams &params,
                                 const Eigen::VectorXd &beta, Vec2 x);
std::vector<FieldJet> predict_jet_batch(const OperatorParams &params,
                                        const Eigen::VectorXd &beta,
                                        std::span<const Vec2> points);

// Batched prediction with one branch evaluation.
ComplexField predict_field(const OperatorParams &params, const ShapeVector &v,
                           std::span<const Vec2> points);
// Cell-centered n x n grid over [0,1]^2; points inside the scatterer are NaN.
ComplexField predict_grid(const OperatorParams &params, const ShapeVector &v,
                          std::size_t n);

} // namespace scatter

#endif // SCATTER_DEEPONET_HPP
