#include "scatter/deeponet.hpp"

#include <cmath>
#include <cstring>
#include <limits>

#include "scatter/error.hpp"

namespace scatter {

namespace {

constexpr Eigen::Index kChunk = 1024;

Eigen::Matrix2Xd trunk_inputs(const OperatorParams &params,
                              std::span<const Vec2> points) {
  Eigen::Matrix2Xd x(2, points.size());
  const auto &n = params.trunk_norm;
  for (std::size_t i = 0; i < points.size(); ++i) {
    x(0, i) = (points[i].x - n.shift) * n.scale;
    x(1, i) = (points[i].y - n.shift) * n.scale;
  }
  return x;
}

void require_branch(const Eigen::VectorXd &beta) {
  if (beta.size() != 2 * kBasisSize)
    throw InputDomainError("branch output must have " +
                           std::to_string(2 * kBasisSize) + " entries");
}

} // namespace

OperatorGradient OperatorGradient::zeros_like(const OperatorParams &params) {
  return {ResNetParams::zeros(params.branch.plan),
          ResNetParams::zeros(params.trunk.plan)};
}

OperatorParams init_operator(Rng &rng, ResNetPlan branch_plan,
                             ResNetPlan trunk_plan) {
  if (branch_plan.output_dim != 2 * kBasisSize ||
      trunk_plan.output_dim != 2 * kBasisSize)
    throw InputDomainError("branch and trunk outputs must both be " +
                           std::to_string(2 * kBasisSize));
  if (branch_plan.input_dim != 16 || trunk_plan.input_dim != 2)
    throw InputDomainError("branch takes 16 inputs and trunk takes 2");
  OperatorParams p;
  p.branch = init_params(branch_plan, rng);
  p.trunk = init_params(trunk_plan, rng);
  return p;
}

Eigen::VectorXd branch_input(const OperatorParams &params,
                             const ShapeVector &v) {
  const auto flat = v.flat();
  Eigen::VectorXd x(16);
  for (int i = 0; i < 16; ++i) {
    if (!std::isfinite(flat[i]))
      throw InputDomainError("shape vector has a non-finite entry");
    x[i] = (flat[i] - params.branch_norm.shift) * params.branch_norm.scale;
  }
  return x;
}

std::size_t BranchCache::KeyHash::operator()(
    const std::array<double, 16> &k) const {
  std::size_t h = 1469598103934665603ULL;
  for (double d : k) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof bits);
    h = (h ^ bits) * 1099511628211ULL;
  }
  return h;
}

Eigen::VectorXd BranchCache::get(const OperatorParams &params,
                                 const ShapeVector &v) {
  const auto key = v.flat();
  {
    std::lock_guard lock(mutex_);
    if (auto it = index_.find(key); it != index_.end()) {
      order_.splice(order_.begin(), order_, it->second);
      ++hits_;
      return it->second->second;
    }
  }
  Eigen::VectorXd beta = forward(params.branch, branch_input(params, v));
  std::lock_guard lock(mutex_);
  if (index_.find(key) == index_.end() && capacity_ > 0) {
    order_.emplace_front(key, beta);
    index_[key] = order_.begin();
    if (order_.size() > capacity_) {
      index_.erase(order_.back().first);
      order_.pop_back();
    }
  }
  return beta;
}

std::size_t BranchCache::size() const {
  std::lock_guard lock(mutex_);
  return order_.size();
}

std::size_t BranchCache::hits() const {
  std::lock_guard lock(mutex_);
  return hits_;
}

void BranchCache::clear() {
  std::lock_guard lock(mutex_);
  order_.clear();
  index_.clear();
  hits_ = 0;
}

Eigen::VectorXd branch_coefficients(const OperatorParams &params,
                                    const ShapeVector &v, BranchCache *cache) {
  if (cache != nullptr)
    return cache->get(params, v);
  return forward(params.branch, branch_input(params, v));
}

Complex combine(const Eigen::VectorXd &beta, const Eigen::VectorXd &tau) {
  return {beta.head(kBasisSize).dot(tau.head(kBasisSize)),
          beta.tail(kBasisSize).dot(tau.tail(kBasisSize))};
}

Complex predict_with_branch(const OperatorParams &params,
                            const Eigen::VectorXd &beta, Vec2 x) {
  require_branch(beta);
  const Vec2 pts[] = {x};
  const Eigen::VectorXd tau = forward(params.trunk, trunk_inputs(params, pts));
  return combine(beta, tau);
}

Complex predict(const OperatorParams &params, const ShapeVector &v, Vec2 x,
                BranchCache *cache) {
  return predict_with_branch(params, branch_coefficients(params, v, cache), x);
}

std::vector<FieldJet> predict_jet_batch(const OperatorParams &params,
                                        const Eigen::VectorXd &beta,
                                        std::span<const Vec2> points) {
  require_branch(beta);
  // The trunk normalization is affine with factor `scale`, so derivatives
  // w.r.t. physical coordinates pick up scale (first) and scale^2 (second).
  const double s = params.trunk_norm.scale;
  std::vector<FieldJet> out(points.size());
  for (std::size_t start = 0; start < points.size(); start += kChunk) {
    const std::size_t n = std::min<std::size_t>(kChunk, points.size() - start);
    const ChannelBatch tau =
        forward_jet_batch(params.trunk, trunk_inputs(params, points.subspan(start, n)));
    const auto bre = beta.head(kBasisSize).transpose();
    const auto bim = beta.tail(kBasisSize).transpose();
    const Eigen::RowVectorXd re = bre * tau.data.topRows(kBasisSize);
    const Eigen::RowVectorXd im = bim * tau.data.bottomRows(kBasisSize);
    const auto p = static_cast<Eigen::Index>(n);
    for (Eigen::Index i = 0; i < p; ++i) {
      FieldJet &j = out[start + i];
      j.value = {re[i], im[i]};
      j.dx = s * Complex(re[p + i], im[p + i]);
      j.dy = s * Complex(re[2 * p + i], im[2 * p + i]);
      j.laplacian = s * s *
                    Complex(re[3 * p + i] + re[5 * p + i], im[3 * p + i] + im[5 * p + i]);
    }
  }
  return out;
}

FieldJet predict_jet_with_branch(const OperatorParams &params,
                                 const Eigen::VectorXd &beta, Vec2 x) {
  require_branch(beta);
  const Vec2 pts[] = {x};
  const ChannelBatch tau = forward_jet_batch(params.trunk, trunk_inputs(params, pts));
  const double s = params.trunk_norm.scale;
  auto col = [&](int c) { return Eigen::VectorXd(tau.data.col(c)); };
  FieldJet j;
  j.value = combine(beta, col(0));
  j.dx = s * combine(beta, col(1));
  j.dy = s * combine(beta, col(2));
  j.laplacian = s * s * (combine(beta, col(3)) + combine(beta, col(5)));
  return j;
}

FieldJet predict_jet(const OperatorParams &params, const ShapeVector &v, Vec2 x,
                     BranchCache *cache) {
  return predict_jet_with_branch(params, branch_coefficients(params, v, cache), x);
}

ComplexField predict_field(const OperatorParams &params, const ShapeVector &v,
                           std::span<const Vec2> points) {
  const Eigen::VectorXd beta = branch_coefficients(params, v);
  ComplexField field;
  field.points.assign(points.begin(), points.end());
  field.values.resize(points.size());
  for (std::size_t start = 0; start < points.size(); start += kChunk) {
    const std::size_t n = std::min<std::size_t>(kChunk, points.size() - start);
    const Eigen::MatrixXd tau =
        forward_batch(params.trunk, trunk_inputs(params, points.subspan(start, n)));
    const Eigen::RowVectorXd re =
        beta.head(kBasisSize).transpose() * tau.topRows(kBasisSize);
    const Eigen::RowVectorXd im =
        beta.tail(kBasisSize).transpose() * tau.bottomRows(kBasisSize);
    for (std::size_t i = 0; i < n; ++i)
      field.values[start + i] = {re[i], im[i]};
  }
  return field;
}

ComplexField predict_grid(const OperatorParams &params, const ShapeVector &v,
                          std::size_t n) {
  const ShapeRegion region(shape_from_vector(v));
  const std::vector<Vec2> all = cell_centered_grid(n);
  std::vector<Vec2> fluid;
  std::vector<std::size_t> where;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (!region.contains(all[i])) {
      fluid.push_back(all[i]);
      where.push_back(i);
    }
  }
  const ComplexField partial = predict_field(params, v, fluid);
  ComplexField field;
  field.points = all;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  field.values.assign(all.size(), Complex(nan, nan));
  for (std::size_t k = 0; k < where.size(); ++k)
    field.values[where[k]] = partial.values[k];
  return field;
}

} // namespace scatter
