#pragma once

#include <stdexcept>

#include "liplearn/domain.hpp"
#include "liplearn/kernel.hpp"

namespace liplearn {

/// Result of the length-scale compatibility check between the resolution
/// delta, the bandwidth h, and the nonlocal scale eps. Margins are
/// (bound - value); nonnegative means the condition holds.
struct ScalingReport {
  bool pass = false;
  bool bandwidth_ok = false;   // h <= r_Omega
  bool separation_ok = false;  // h/eps < 1/2 (strict)
  bool resolution_ok = false;  // sigma_phi(h) + delta/h <= t0/(4+2 sigma_phi(h)) * (1 - 2h/eps)
  double bandwidth_margin = 0.0;
  double separation_margin = 0.0;
  double resolution_margin = 0.0;
};

inline ScalingReport check_scaling_assumption(double delta, double h, double eps,
                                              const KernelProfile& kernel, const Domain& domain) {
  if (!(delta > 0.0 && h > 0.0 && eps > 0.0))
    throw std::invalid_argument("check_scaling_assumption: all scales must be positive");
  ScalingReport r;
  r.bandwidth_margin = domain.r_omega() - h;
  r.bandwidth_ok = r.bandwidth_margin >= 0.0;

  r.separation_margin = 0.5 - h / eps;
  r.separation_ok = r.separation_margin > 0.0;

  const double sp = domain.sigma_phi(h);
  const double lhs = sp + delta / h;
  const double rhs = kernel.t_zero() / (4.0 + 2.0 * sp) * (1.0 - 2.0 * h / eps);
  r.resolution_margin = rhs - lhs;
  r.resolution_ok = r.resolution_margin >= 0.0;

  r.pass = r.bandwidth_ok && r.separation_ok && r.resolution_ok;
  return r;
}

}  // namespace liplearn
