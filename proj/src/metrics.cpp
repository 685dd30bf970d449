#include "scatter/metrics.hpp"

#include <cmath>

#include "scatter/error.hpp"

namespace scatter {

namespace {

void require_consistent(const FieldPair &pair) {
  if (pair.predicted.size() != pair.reference.size())
    throw PairingError("predicted and reference fields differ in length");
  for (std::size_t i = 0; i < pair.predicted.size(); ++i) {
    const Complex a = pair.predicted[i], b = pair.reference[i];
    if (std::isnan(a.real()) || std::isnan(a.imag()) || std::isnan(b.real()) ||
        std::isnan(b.imag()))
      throw PairingError("field pair contains masked entries");
  }
}

} // namespace

FieldPair pair_fields(const ComplexField &predicted,
                      const ComplexField &reference) {
  if (predicted.points.size() != reference.points.size())
    throw PairingError("fields have " + std::to_string(predicted.points.size()) +
                       " and " + std::to_string(reference.points.size()) + " points");
  if (predicted.values.size() != predicted.points.size() ||
      reference.values.size() != reference.points.size())
    throw PairingError("field values and points differ in length");
  FieldPair pair;
  for (std::size_t i = 0; i < predicted.points.size(); ++i) {
    const Vec2 a = predicted.points[i], b = reference.points[i];
    if (a.x != b.x || a.y != b.y)
      throw PairingError("point " + std::to_string(i) + " differs between fields");
    if (predicted.masked(i) || reference.masked(i))
      continue;
    pair.points.push_back(a);
    pair.predicted.push_back(predicted.values[i]);
    pair.reference.push_back(reference.values[i]);
  }
  return pair;
}

double relative_l2(const FieldPair &pair) {
  require_consistent(pair);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < pair.reference.size(); ++i) {
    num += std::norm(pair.reference[i] - pair.predicted[i]);
    den += std::norm(pair.reference[i]);
  }
  if (!(den > 0.0))
    throw UndefinedMetricError("relative L2 needs a non-zero reference");
  return std::sqrt(num / den);
}

double r2_score(const FieldPair &pair) {
  require_consistent(pair);
  const std::size_t n = pair.reference.size();
  if (n == 0)
    throw UndefinedMetricError("R2 needs at least one point");
  double mean = 0.0;
  for (const Complex &r : pair.reference)
    mean += r.real() + r.imag();
  mean /= 2.0 * static_cast<double>(n);
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ss_res += std::norm(pair.reference[i] - pair.predicted[i]);
    const double dr = pair.reference[i].real() - mean;
    const double di = pair.reference[i].imag() - mean;
    ss_tot += dr * dr + di * di;
  }
  if (!(ss_tot > 0.0))
    throw UndefinedMetricError("R2 needs a reference with non-zero variance");
  return 1.0 - ss_res / ss_tot;
}

std::vector<double> pointwise_error(const FieldPair &pair) {
  if (pair.predicted.size() != pair.reference.size())
    throw PairingError("predicted and reference fields differ in length");
  std::vector<double> e(pair.reference.size());
  for (std::size_t i = 0; i < e.size(); ++i)
    e[i] = std::abs(pair.reference[i] - pair.predicted[i]);
  return e;
}

} // namespace scatter
