#ifndef SCATTER_BESSEL_HPP
#define SCATTER_BESSEL_HPP

#include <vector>

namespace scatter {

inline constexpr int kMaxBesselOrder = 60;

struct BesselJY {
  double j = 0.0;
  double y = 0.0;
  double dj = 0.0; // d/dx J_n
  double dy = 0.0; // d/dx Y_n
};

// J_n, Y_n and derivatives for integer order 0 <= n <= 60 and x > 0.
BesselJY bessel_jy(int n, double x);

// Orders 0..n_max in one sweep. n_max may exceed kMaxBesselOrder here, which
// the cylinder series uses for its two guard orders.
std::vector<BesselJY> bessel_jy_all(int n_max, double x);

} // namespace scatter

#endif // SCATTER_BESSEL_HPP
