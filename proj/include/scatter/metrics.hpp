#ifndef SCATTER_METRICS_HPP
#define SCATTER_METRICS_HPP

#include <vector>

#include "scatter/deeponet.hpp"
#include "scatter/field.hpp"

namespace scatter {

// Predicted and reference values at common, unmasked points.
struct FieldPair {
  std::vector<Complex> predicted;
  std::vector<Complex> reference;
  std::vector<Vec2> points;
};

// Throws PairingError when the point lists differ; points masked in either
// field are dropped.
FieldPair pair_fields(const ComplexField &predicted, const ComplexField &reference);

// ||ref - pred|| / ||ref|| over the stacked (re, im) vector.
double relative_l2(const FieldPair &pair);
// 1 - SS_res / SS_tot over the stacked (re, im) vector.
double r2_score(const FieldPair &pair);
// |ref - pred| per point.
std::vector<double> pointwise_error(const FieldPair &pair);

} // namespace scatter

#endif // SCATTER_METRICS_HPP
