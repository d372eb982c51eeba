#pragma once

#include "stkde/types.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace stkde {

/// Registered kernel functions. Every listed kernel integrates to 1 over its
/// support and is symmetric about 0; estimators rely on the compact support
/// [-1, 1] for exact pruning.
enum class KernelId {
  Epanechnikov,
};

KernelId parse_kernel(const std::string& name);
std::string kernel_name(KernelId id);

/// k(u) = 0.75 (1 - u^2) for |u| <= 1, else 0.
inline Scalar epanechnikov(Scalar u) {
  return std::abs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
}

inline Scalar univariate_kernel(KernelId id, Scalar u) {
  switch (id) {
    case KernelId::Epanechnikov:
      return epanechnikov(u);
  }
  return 0.0;  // unreachable
}

/// Product-kernel factor k(dx/h_x) k(dy/h_y) k(dt/h_t) / (h_x h_y h_t).
/// Units: per m^2 * day. Zero whenever any offset reaches its bandwidth.
inline Scalar product_kernel_weight(Scalar dx, Scalar dy, Scalar dt,
                                    const Bandwidths& bw, KernelId kernel) {
  const Scalar kx = univariate_kernel(kernel, dx / bw.h_x);
  if (kx == 0.0) return 0.0;
  const Scalar ky = univariate_kernel(kernel, dy / bw.h_y);
  if (ky == 0.0) return 0.0;
  const Scalar kt = univariate_kernel(kernel, dt / bw.h_t);
  return kx * ky * kt / (bw.h_x * bw.h_y * bw.h_t);
}

/// Radially symmetric bivariate Epanechnikov, (2/pi)(1 - u^2 - v^2) on the
/// unit disk. Integrates to 1 over the plane.
inline Scalar bivariate_epanechnikov(Scalar u, Scalar v) {
  const Scalar r2 = u * u + v * v;
  return r2 <= 1.0 ? (2.0 * std::numbers::inv_pi) * (1.0 - r2) : 0.0;
}

}  // namespace stkde
