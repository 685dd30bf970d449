#include "scatter/physics.hpp"

#include <cmath>
#include <optional>

#include "scatter/error.hpp"
#include "scatter/parallel.hpp"

namespace scatter {

namespace {

constexpr std::size_t kPointChunk = 256;
const Complex kI(0.0, 1.0);

void require_unit(Vec2 n) {
  if (!(std::abs(norm(n) - 1.0) <= 1e-9))
    throw InputDomainError("boundary normal is not a unit vector");
}

enum class Role { Interior, Inner, Outer };

struct Column {
  Role role;
  Vec2 x;
  Vec2 normal;
};

// Work unit: one contiguous run of a shape's points.
struct Task {
  std::size_t shape;
  std::size_t begin;
  std::size_t end;
};

struct TaskResult {
  double pde = 0.0, inner = 0.0, outer = 0.0;
  std::optional<ResNetParams> trunk_grad;
  Eigen::VectorXd beta_grad;
};

std::vector<Column> columns_of(const PointSet &ps) {
  std::vector<Column> cols;
  cols.reserve(ps.interior.size() + ps.inner_boundary.size() +
               ps.outer_boundary.size());
  for (const auto &x : ps.interior)
    cols.push_back({Role::Interior, x, {}});
  for (const auto &b : ps.inner_boundary)
    cols.push_back({Role::Inner, b.position, b.outward_normal});
  for (const auto &b : ps.outer_boundary)
    cols.push_back({Role::Outer, b.position, b.outward_normal});
  return cols;
}

void run_task(const OperatorParams &params, const PhysicsConfig &cfg,
              const std::vector<Column> &cols, const Task &task,
              const Eigen::VectorXd &beta, const std::array<double, 3> &weight,
              bool want_grad, TaskResult &out) {
  const auto p = static_cast<Eigen::Index>(task.end - task.begin);
  Eigen::Matrix2Xd x(2, p);
  const auto &tn = params.trunk_norm;
  for (Eigen::Index i = 0; i < p; ++i) {
    const Vec2 pt = cols[task.begin + i].x;
    x(0, i) = (pt.x - tn.shift) * tn.scale;
    x(1, i) = (pt.y - tn.shift) * tn.scale;
  }
  const ForwardTape tape = forward_tape(params.trunk, x, kJetChannels);
  const Eigen::MatrixXd &tau = tape.output.data;
  const Eigen::RowVectorXd re = beta.head(kBasisSize).transpose() * tau.topRows(kBasisSize);
  const Eigen::RowVectorXd im = beta.tail(kBasisSize).transpose() * tau.bottomRows(kBasisSize);

  const double s = tn.scale;
  const double k = cfg.wavenumber();
  // Loss derivative w.r.t. the network-space channels of G_re and G_im.
  Eigen::RowVectorXd g_re, g_im;
  if (want_grad) {
    g_re = Eigen::RowVectorXd::Zero(kJetChannels * p);
    g_im = Eigen::RowVectorXd::Zero(kJetChannels * p);
  }

  for (Eigen::Index i = 0; i < p; ++i) {
    const Column &col = cols[task.begin + i];
    FieldJet jet;
    jet.value = {re[i], im[i]};
    jet.dx = s * Complex(re[p + i], im[p + i]);
    jet.dy = s * Complex(re[2 * p + i], im[2 * p + i]);
    jet.laplacian = s * s * Complex(re[3 * p + i] + re[5 * p + i],
                                    im[3 * p + i] + im[5 * p + i]);
    switch (col.role) {
    case Role::Interior: {
      const Complex r = helmholtz_residual(jet, cfg);
      out.pde += weight[0] * std::norm(r);
      if (want_grad) {
        const Complex d = 2.0 * cfg.w_pde * weight[0] * r;
        g_re[i] += k * k * d.real();
        g_im[i] += k * k * d.imag();
        g_re[3 * p + i] += s * s * d.real();
        g_re[5 * p + i] += s * s * d.real();
        g_im[3 * p + i] += s * s * d.imag();
        g_im[5 * p + i] += s * s * d.imag();
      }
      break;
    }
    case Role::Inner: {
      const Complex r = rigid_bc_residual(jet, col.normal, col.x, cfg);
      out.inner += weight[1] * std::norm(r);
      if (want_grad) {
        const Complex d = 2.0 * cfg.w_inner * weight[1] * r;
        g_re[p + i] += s * col.normal.x * d.real();
        g_re[2 * p + i] += s * col.normal.y * d.real();
        g_im[p + i] += s * col.normal.x * d.imag();
        g_im[2 * p + i] += s * col.normal.y * d.imag();
      }
      break;
    }
    case Role::Outer: {
      const Complex r = impedance_bc_residual(jet, col.normal, cfg);
      out.outer += weight[2] * std::norm(r);
      if (want_grad) {
        const Complex d = 2.0 * cfg.w_outer * weight[2] * r;
        g_re[p + i] += s * col.normal.x * d.real();
        g_re[2 * p + i] += s * col.normal.y * d.real();
        g_im[p + i] += s * col.normal.x * d.imag();
        g_im[2 * p + i] += s * col.normal.y * d.imag();
        // r_re = dn G_re - k G_im, r_im = dn G_im + k G_re.
        g_re[i] += k * d.imag();
        g_im[i] -= k * d.real();
      }
      break;
    }
    }
  }
  if (!want_grad)
    return;

  Eigen::MatrixXd upstream(2 * kBasisSize, kJetChannels * p);
  upstream.topRows(kBasisSize).noalias() = beta.head(kBasisSize) * g_re;
  upstream.bottomRows(kBasisSize).noalias() = beta.tail(kBasisSize) * g_im;
  out.trunk_grad = ResNetParams::zeros(params.trunk.plan);
  backward_tape(params.trunk, tape, upstream, *out.trunk_grad);
  out.beta_grad.resize(2 * kBasisSize);
  out.beta_grad.head(kBasisSize).noalias() = tau.topRows(kBasisSize) * g_re.transpose();
  out.beta_grad.tail(kBasisSize).noalias() = tau.bottomRows(kBasisSize) * g_im.transpose();
}

LossGradient evaluate_loss(const OperatorParams &params,
                           std::span<const ShapeBatch> batch,
                           const PhysicsConfig &cfg, bool want_grad) {
  if (batch.empty())
    throw InputDomainError("loss needs a non-empty batch");
  const double n_shapes = static_cast<double>(batch.size());

  std::vector<std::vector<Column>> columns;
  std::vector<std::array<double, 3>> weights;
  std::vector<Eigen::VectorXd> betas;
  std::vector<Task> tasks;
  for (std::size_t si = 0; si < batch.size(); ++si) {
    const PointSet &ps = batch[si].points;
    if (ps.interior.empty() || ps.inner_boundary.empty() ||
        ps.outer_boundary.empty())
      throw InputDomainError("shape " + std::to_string(si) +
                             " has an empty point set");
    columns.push_back(columns_of(ps));
    weights.push_back(
        {1.0 / (n_shapes * static_cast<double>(ps.interior.size())),
         1.0 / (n_shapes * static_cast<double>(ps.inner_boundary.size())),
         1.0 / (n_shapes * static_cast<double>(ps.outer_boundary.size()))});
    betas.push_back(forward(params.branch, branch_input(params, batch[si].shape)));
    const std::size_t n = columns.back().size();
    for (std::size_t b = 0; b < n; b += kPointChunk)
      tasks.push_back({si, b, std::min(n, b + kPointChunk)});
  }

  std::vector<TaskResult> results(tasks.size());
  parallel_for(tasks.size(), [&](std::size_t t) {
    const Task &task = tasks[t];
    run_task(params, cfg, columns[task.shape], task, betas[task.shape],
             weights[task.shape], want_grad, results[t]);
  });

  // Reduce in task order so the result is independent of scheduling.
  LossGradient out;
  std::vector<Eigen::VectorXd> beta_grads(
      batch.size(), Eigen::VectorXd::Zero(2 * kBasisSize));
  if (want_grad)
    out.grad = OperatorGradient::zeros_like(params);
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    out.loss.pde += results[t].pde;
    out.loss.inner_bc += results[t].inner;
    out.loss.outer_bc += results[t].outer;
    if (want_grad) {
      axpy(1.0, *results[t].trunk_grad, out.grad.trunk);
      beta_grads[tasks[t].shape] += results[t].beta_grad;
    }
  }
  out.loss.total = cfg.w_pde * out.loss.pde + cfg.w_inner * out.loss.inner_bc +
                   cfg.w_outer * out.loss.outer_bc;

  if (want_grad) {
    std::vector<ResNetParams> branch_grads(batch.size());
    parallel_for(batch.size(), [&](std::size_t si) {
      branch_grads[si] = backward(params.branch,
                                  branch_input(params, batch[si].shape),
                                  beta_grads[si]);
    });
    for (const auto &g : branch_grads)
      axpy(1.0, g, out.grad.branch);
  }
  return out;
}

} // namespace

void PhysicsConfig::validate() const {
  if (!(frequency > 0.0) || !std::isfinite(frequency))
    throw InputDomainError("frequency must be positive");
  if (!(sound_speed > 0.0) || !std::isfinite(sound_speed))
    throw InputDomainError("sound speed must be positive");
  if (!std::isfinite(amplitude))
    throw InputDomainError("incident amplitude must be finite");
  if (!(std::abs(norm(direction) - 1.0) <= 1e-9))
    throw InputDomainError("incident direction must be a unit vector");
  for (double w : {w_pde, w_inner, w_outer}) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw InputDomainError("loss weights must be non-negative");
  }
}

IncidentWave incident(const PhysicsConfig &cfg, Vec2 x) {
  const double k = cfg.wavenumber();
  const double phase = k * dot(cfg.direction, x);
  IncidentWave w;
  w.value = cfg.amplitude * Complex(std::cos(phase), -std::sin(phase));
  w.dx = -kI * k * cfg.direction.x * w.value;
  w.dy = -kI * k * cfg.direction.y * w.value;
  return w;
}

Complex helmholtz_residual(const FieldJet &jet, const PhysicsConfig &cfg) {
  const double k = cfg.wavenumber();
  return jet.laplacian + k * k * jet.value;
}

Complex rigid_bc_residual(const FieldJet &jet, Vec2 normal, Vec2 x,
                          const PhysicsConfig &cfg) {
  require_unit(normal);
  const double k = cfg.wavenumber();
  const Complex dn = normal.x * jet.dx + normal.y * jet.dy;
  const double projection =
      cfg.rigid_bc == RigidBcMode::Projected ? dot(cfg.direction, normal) : 1.0;
  return dn - kI * k * projection * incident(cfg, x).value;
}

Complex impedance_bc_residual(const FieldJet &jet, Vec2 normal,
                              const PhysicsConfig &cfg) {
  require_unit(normal);
  const Complex dn = normal.x * jet.dx + normal.y * jet.dy;
  return dn + kI * cfg.wavenumber() * jet.value;
}

ResidualBreakdown loss(const OperatorParams &params,
                       std::span<const ShapeBatch> batch,
                       const PhysicsConfig &cfg) {
  return evaluate_loss(params, batch, cfg, false).loss;
}

LossGradient loss_gradient(const OperatorParams &params,
                           std::span<const ShapeBatch> batch,
                           const PhysicsConfig &cfg) {
  return evaluate_loss(params, batch, cfg, true);
}

} // namespace scatter
