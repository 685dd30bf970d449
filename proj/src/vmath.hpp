#ifndef SCATTER_VMATH_HPP
#define SCATTER_VMATH_HPP

#include <cstddef>

namespace scatter::detail {

// Elementwise sin / cos over contiguous arrays. Uses glibc's vector math
// library when available; every element is computed by the same kernel
// regardless of its position, so results do not depend on array length.
void vsin(const double *x, double *out, std::size_t n);
void vcos(const double *x, double *out, std::size_t n);

} // namespace scatter::detail

#endif // SCATTER_VMATH_HPP
