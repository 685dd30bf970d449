#include "scatter/bessel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "scatter/error.hpp"

namespace scatter {

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;
// Below this argument Y_0 and Y_1 come from the ascending series.
constexpr double kSeriesLimit = 12.0;

// J_0 .. J_{n_max} by Miller's downward recurrence, normalized with
// J_0 + 2 (J_2 + J_4 + ...) = 1.
std::vector<double> bessel_j_all(int n_max, double x) {
  const double top = std::max<double>(n_max, x);
  int m = static_cast<int>(top + 30.0 + std::sqrt(40.0 * top));
  m += m % 2;
  std::vector<double> j(static_cast<std::size_t>(m) + 2, 0.0);
  j[m + 1] = 0.0;
  j[m] = 1e-300;
  for (int k = m; k >= 1; --k) {
    j[k - 1] = 2.0 * k / x * j[k] - j[k + 1];
    if (std::abs(j[k - 1]) > 1e250) {
      for (int i = k - 1; i <= m + 1; ++i)
        j[i] *= 1e-250;
    }
  }
  double sum = j[0];
  for (int k = 2; k <= m; k += 2)
    sum += 2.0 * j[k];
  j.resize(static_cast<std::size_t>(n_max) + 1);
  for (double &v : j)
    v /= sum;
  return j;
}

// Y_0 and Y_1 from the ascending series (x <= kSeriesLimit).
void y01_series(double x, double j0, double j1, double &y0, double &y1) {
  const double q = 0.25 * x * x;
  const double log_term = std::log(0.5 * x) + kEulerGamma;

  double s0 = 0.0;
  double term = 1.0; // q^k / (k!)^2
  double harmonic = 0.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * k);
    harmonic += 1.0 / k;
    const double t = (k % 2 == 1 ? 1.0 : -1.0) * harmonic * term;
    s0 += t;
    if (std::abs(t) < 1e-17 * std::abs(s0) && k > 2)
      break;
  }
  y0 = 2.0 / std::numbers::pi * (log_term * j0 + s0);

  double s1 = 0.0;
  double t1 = 0.5 * x; // (x/2)^{2k+1} / (k! (k+1)!)
  double hk = 0.0;     // H_k
  for (int k = 0; k < 200; ++k) {
    if (k > 0)
      t1 *= q / (static_cast<double>(k) * (k + 1));
    const double hk1 = hk + 1.0 / (k + 1);
    const double t = (k % 2 == 0 ? 1.0 : -1.0) * (hk + hk1) * t1;
    s1 += t;
    hk = hk1;
    if (std::abs(t) < 1e-17 * std::abs(s1) && k > 2)
      break;
  }
  y1 = 2.0 / std::numbers::pi * log_term * j1 - 2.0 / (std::numbers::pi * x) -
       s1 / std::numbers::pi;
}

// Hankel asymptotic expansion of Y_nu for large x.
double y_asymptotic(int nu, double x) {
  const double mu = 4.0 * nu * nu;
  double p = 0.0, q = 0.0;
  double a = 1.0; // a_k = prod_{j<=k} (mu - (2j-1)^2) / (k! (8x)^k)
  double last = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 60; ++k) {
    if (k > 0)
      a *= (mu - (2.0 * k - 1) * (2.0 * k - 1)) / (k * 8.0 * x);
    if (std::abs(a) > last)
      break;
    last = std::abs(a);
    const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0)
      p += sign * a;
    else
      q += sign * a;
    if (std::abs(a) < 1e-17)
      break;
  }
  const double chi = x - (0.5 * nu + 0.25) * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) *
         (p * std::sin(chi) + q * std::cos(chi));
}

} // namespace

std::vector<BesselJY> bessel_jy_all(int n_max, double x) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw InputDomainError("Bessel argument must be positive, got " +
                           std::to_string(x));
  if (n_max < 0)
    throw InputDomainError("Bessel order must be non-negative");
  const std::vector<double> j = bessel_j_all(n_max + 1, x);

  std::vector<double> y(static_cast<std::size_t>(n_max) + 2);
  if (x <= kSeriesLimit) {
    y01_series(x, j[0], j[1], y[0], y[1]);
  } else {
    y[0] = y_asymptotic(0, x);
    y[1] = y_asymptotic(1, x);
  }
  for (int n = 1; n <= n_max; ++n)
    y[n + 1] = 2.0 * n / x * y[n] - y[n - 1];

  std::vector<BesselJY> out(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) {
    out[n].j = j[n];
    out[n].y = y[n];
    if (n == 0) {
      out[n].dj = -j[1];
      out[n].dy = -y[1];
    } else {
      out[n].dj = 0.5 * (j[n - 1] - j[n + 1]);
      out[n].dy = 0.5 * (y[n - 1] - y[n + 1]);
    }
  }
  return out;
}

BesselJY bessel_jy(int n, double x) {
  if (n < 0 || n > kMaxBesselOrder)
    throw InputDomainError("Bessel order must lie in [0, " +
                           std::to_string(kMaxBesselOrder) + "]");
  return bessel_jy_all(n, x)[n];
}

} // namespace scatter
