#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

namespace liplearn {

enum class KernelVariant { Constant, Exponential, Power, Custom };

/// A weight profile eta: nonincreasing on (0,1], zero beyond 1, with
/// sup t*eta(t) attained at some t_0 > 0. Carries the derived constants
///   sigma_eta = sup_{t>0} t*eta(t),
///   t_zero    = largest maximizer of t*eta(t),
///   tau_eta   = sup_{0<t<=t_zero} (sigma_eta/eta(t) - t),
/// which control how well graph distances track Euclidean ones.
///
/// Immutable after construction; all evaluations are pure.
class KernelProfile {
 public:
  static KernelProfile constant() {
    KernelProfile k;
    k.variant_ = KernelVariant::Constant;
    k.sigma_eta_ = 1.0;
    k.t_zero_ = 1.0;
    k.tau_eta_ = 1.0;
    return k;
  }

  static KernelProfile exponential(double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("exponential kernel: sigma must be positive");
    KernelProfile k;
    k.variant_ = KernelVariant::Exponential;
    k.param_ = sigma;
    k.t_zero_ = std::min(sigma, 1.0);
    k.sigma_eta_ = k.t_zero_ * std::exp(-k.t_zero_ * k.t_zero_ / (2.0 * sigma * sigma));
    // g(t) = sigma_eta/eta(t) - t is convex here, so the sup sits at an
    // endpoint: g(0+) = sigma_eta, g(t_zero) = 0.
    k.tau_eta_ = k.sigma_eta_;
    return k;
  }

  static KernelProfile power(double p) {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("power kernel: p must be in (0,1]");
    KernelProfile k;
    k.variant_ = KernelVariant::Power;
    k.param_ = p;
    // t*eta(t) = t^{1-p} is nondecreasing on (0,1], so the sup is at t=1.
    k.sigma_eta_ = 1.0;
    k.t_zero_ = 1.0;
    if (p == 1.0) {
      k.tau_eta_ = 0.0;
    } else {
      // sup of t^p - t on (0,1], attained at t = p^{1/(1-p)}.
      const double ts = std::pow(p, 1.0 / (1.0 - p));
      k.tau_eta_ = std::pow(ts, p) - ts;
    }
    return k;
  }

  /// A user-supplied profile. The callable must be nonincreasing on (0,1]
  /// and zero beyond 1; it is not re-normalized. If the derived constants are
  /// not supplied they are found by grid search (1e-5 accuracy).
  static KernelProfile custom(std::function<double(double)> eta, double sigma_eta,
                              double t_zero, double tau_eta) {
    if (!(sigma_eta > 0.0) || !(t_zero > 0.0 && t_zero <= 1.0))
      throw std::invalid_argument("custom kernel: invalid constants");
    KernelProfile k;
    k.variant_ = KernelVariant::Custom;
    k.custom_eta_ = std::move(eta);
    k.sigma_eta_ = sigma_eta;
    k.t_zero_ = t_zero;
    k.tau_eta_ = tau_eta;
    return k;
  }

  static KernelProfile custom(std::function<double(double)> eta) {
    // Grid maximization of t*eta(t) with local refinement, then tau by the
    // same machinery on g(t) = sigma_eta/eta(t) - t.
    const int kCoarse = 1000000;
    double best = -1.0, best_t = 1.0;
    for (int i = 1; i <= kCoarse; ++i) {
      const double t = static_cast<double>(i) / kCoarse;
      const double v = t * eta(t);
      if (v >= best - 1e-15 * std::abs(best)) {
        if (v > best) best = v;
        best_t = t;  // keep the largest maximizer
      }
    }
    if (!(best > 0.0)) throw std::invalid_argument("custom kernel: sup t*eta(t) not positive");
    double tau = 0.0;
    for (int i = 1; i <= kCoarse; ++i) {
      const double t = best_t * static_cast<double>(i) / kCoarse;
      const double e = eta(t);
      if (e > 0.0) tau = std::max(tau, best / e - t);
    }
    return custom(std::move(eta), best, best_t, tau);
  }

  /// Parse "constant", "exponential:<sigma>" or "power:<p>".
  static KernelProfile parse(const std::string& spec) {
    if (spec == "constant") return constant();
    const auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    if (colon != std::string::npos) {
      const double value = std::stod(spec.substr(colon + 1));
      if (head == "exponential") return exponential(value);
      if (head == "power") return power(value);
    }
    throw std::invalid_argument("unknown kernel spec: " + spec);
  }

  KernelVariant variant() const { return variant_; }
  double parameter() const { return param_; }
  double sigma_eta() const { return sigma_eta_; }
  double t_zero() const { return t_zero_; }
  double tau_eta() const { return tau_eta_; }

  std::string name() const {
    switch (variant_) {
      case KernelVariant::Constant: return "constant";
      case KernelVariant::Exponential: return "exponential:" + std::to_string(param_);
      case KernelVariant::Power: return "power:" + std::to_string(param_);
      case KernelVariant::Custom: return "custom";
    }
    return "?";
  }

  /// eta(t). Zero for t > 1. The Power profile is unbounded at 0 and rejects
  /// t = 0; callers rely on the convention eta(0)*0 := 0 instead.
  double evaluate(double t) const {
    if (t < 0.0) throw std::invalid_argument("kernel evaluate: t must be nonnegative");
    if (t > 1.0) return 0.0;
    switch (variant_) {
      case KernelVariant::Constant:
        return 1.0;
      case KernelVariant::Exponential:
        return std::exp(-t * t / (2.0 * param_ * param_));
      case KernelVariant::Power:
        if (t == 0.0) throw std::domain_error("power kernel is unbounded at t = 0");
        return std::pow(t, -param_);
      case KernelVariant::Custom:
        return custom_eta_(t);
    }
    return 0.0;
  }

  /// Edge weight between points at distance r on a graph with bandwidth h:
  /// w = eta(r/h) / (sigma_eta * h). Zero when r > h. The reciprocal
  /// sigma_eta * h / eta(r/h) is the edge length and is never shorter than r.
  double edge_weight(double h, double r) const {
    if (!(h > 0.0)) throw std::invalid_argument("edge_weight: h must be positive");
    if (!(r > 0.0)) throw std::invalid_argument("edge_weight: r must be positive");
    if (r > h) return 0.0;
    return evaluate(r / h) / (sigma_eta_ * h);
  }

 private:
  KernelProfile() = default;

  KernelVariant variant_ = KernelVariant::Constant;
  double param_ = 0.0;
  double sigma_eta_ = 1.0;
  double t_zero_ = 1.0;
  double tau_eta_ = 1.0;
  std::function<double(double)> custom_eta_;
};

}  // namespace liplearn
