#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "liplearn/amle.hpp"
#include "liplearn/domain.hpp"
#include "liplearn/geodesic.hpp"
#include "liplearn/graph.hpp"
#include "liplearn/io.hpp"
#include "liplearn/kernel.hpp"
#include "liplearn/parallel.hpp"
#include "liplearn/point_cloud.hpp"
#include "liplearn/random.hpp"
#include "liplearn/shortest_path.hpp"

namespace liplearn {

/// |x1|^{4/3} - |x2|^{4/3}, infinity harmonic away from the axes; the ground
/// truth of all convergence studies.
inline double aronsson(const Point& x) {
  return std::pow(std::abs(x[0]), 4.0 / 3.0) - std::pow(std::abs(x[1]), 4.0 / 3.0);
}

/// The four continuum label points (+-1, 0), (0, +-1) with Aronsson values.
inline std::vector<std::pair<Point, double>> aronsson_labels() {
  const std::vector<Point> pts{{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}};
  std::vector<std::pair<Point, double>> out;
  for (const Point& z : pts) out.emplace_back(z, aronsson(z));
  return out;
}

enum class ScalingMode { Delta, Delta23, Delta12 };

inline double scaling_exponent(ScalingMode m) {
  switch (m) {
    case ScalingMode::Delta: return 1.0;
    case ScalingMode::Delta23: return 2.0 / 3.0;
    case ScalingMode::Delta12: return 0.5;
  }
  return 1.0;
}

struct StudyConfig {
  std::string domain = "star";   // star | ball | box
  double star_modulus_C = 3.0;   // modulus constant of the star domain
  std::string kernel = "power:1";
  std::vector<int> n_list;
  ScalingMode scaling = ScalingMode::Delta23;
  double c = 2.0;                // h = c * delta_hat^exponent
  ConstraintMode constraint_mode = ConstraintMode::ClosestPoint;
  int trials = 5;
  std::uint64_t base_seed = 1;
  double tol = 1e-6;
  std::string output;            // results CSV path; empty = return records only
  int workers = 1;
  double h_fixed = 0.0;          // > 0 overrides the scaling (cone studies)
  bool enforce_cone_precondition = true;

  void validate() const {
    if (n_list.empty()) throw std::invalid_argument("StudyConfig: empty n_list");
    for (std::size_t k = 1; k < n_list.size(); ++k) {
      if (n_list[k] <= n_list[k - 1])
        throw std::invalid_argument("StudyConfig: n_list must be strictly increasing");
    }
    if (trials < 1) throw std::invalid_argument("StudyConfig: trials must be >= 1");
    if (!(c > 0.0)) throw std::invalid_argument("StudyConfig: c must be positive");
  }

  Domain make_domain() const {
    if (domain == "star") return Domain::lp_star(star_modulus_C);
    if (domain == "ball") return Domain::ball({0.0, 0.0}, 1.0);
    if (domain == "box") return Domain::box({-1.0, -1.0}, {1.0, 1.0});
    throw std::invalid_argument("StudyConfig: unknown domain " + domain);
  }
};

inline void to_json(nlohmann::json& j, const StudyConfig& c) {
  const char* scaling = c.scaling == ScalingMode::Delta ? "delta"
                        : c.scaling == ScalingMode::Delta23 ? "delta_2_3" : "delta_1_2";
  j = nlohmann::json{
      {"domain", c.domain},
      {"star_modulus_C", c.star_modulus_C},
      {"kernel", c.kernel},
      {"n_list", c.n_list},
      {"scaling", scaling},
      {"c", c.c},
      {"constraint_mode", c.constraint_mode == ConstraintMode::ClosestPoint ? "cp" : "dil"},
      {"trials", c.trials},
      {"base_seed", c.base_seed},
      {"tol", c.tol},
      {"output", c.output},
      {"workers", c.workers},
      {"h_fixed", c.h_fixed},
      {"enforce_cone_precondition", c.enforce_cone_precondition},
  };
}

inline void from_json(const nlohmann::json& j, StudyConfig& c) {
  c = StudyConfig{};
  if (j.contains("domain")) j.at("domain").get_to(c.domain);
  if (j.contains("star_modulus_C")) j.at("star_modulus_C").get_to(c.star_modulus_C);
  if (j.contains("kernel")) j.at("kernel").get_to(c.kernel);
  j.at("n_list").get_to(c.n_list);
  if (j.contains("scaling")) {
    const std::string s = j.at("scaling").get<std::string>();
    if (s == "delta") c.scaling = ScalingMode::Delta;
    else if (s == "delta_2_3") c.scaling = ScalingMode::Delta23;
    else if (s == "delta_1_2") c.scaling = ScalingMode::Delta12;
    else throw std::invalid_argument("StudyConfig: unknown scaling " + s);
  }
  if (j.contains("c")) j.at("c").get_to(c.c);
  if (j.contains("constraint_mode")) {
    const std::string m = j.at("constraint_mode").get<std::string>();
    if (m == "cp") c.constraint_mode = ConstraintMode::ClosestPoint;
    else if (m == "dil") c.constraint_mode = ConstraintMode::Dilated;
    else throw std::invalid_argument("StudyConfig: unknown constraint_mode " + m);
  }
  if (j.contains("trials")) j.at("trials").get_to(c.trials);
  if (j.contains("base_seed")) j.at("base_seed").get_to(c.base_seed);
  if (j.contains("tol")) j.at("tol").get_to(c.tol);
  if (j.contains("output")) j.at("output").get_to(c.output);
  if (j.contains("workers")) j.at("workers").get_to(c.workers);
  if (j.contains("h_fixed")) j.at("h_fixed").get_to(c.h_fixed);
  if (j.contains("enforce_cone_precondition"))
    j.at("enforce_cone_precondition").get_to(c.enforce_cone_precondition);
}

struct ConvergenceRecord {
  int n = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double delta_hat = 0.0;
  double h = 0.0;
  double sup_error = 0.0;  // NaN when the trial was flagged invalid
  int iterations = 0;
  double wall_time = 0.0;
  bool valid = true;
};

/// Reference-grid spacing for resolution estimates: fine enough that the grid
/// error is well below the expected resolution at this sample size.
inline double resolution_spacing(int n) { return 0.5 / std::sqrt(static_cast<double>(n)); }

inline void write_results_csv(const std::string& path, const std::vector<ConvergenceRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "n,trial,seed,delta_hat,h,sup_error,iterations,wall_time_s\n";
  for (const auto& r : records) {
    out << r.n << ',' << r.trial << ',' << r.seed << ','
        << detail::format_double(r.delta_hat) << ',' << detail::format_double(r.h) << ','
        << detail::format_double(r.sup_error) << ',' << r.iterations << ','
        << detail::format_double(r.wall_time) << '\n';
  }
}

inline std::vector<ConvergenceRecord> read_results_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty results file: " + path);
  std::vector<ConvergenceRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 8) throw std::runtime_error("malformed results row: " + line);
    ConvergenceRecord r;
    r.n = std::stoi(f[0]);
    r.trial = std::stoi(f[1]);
    r.seed = std::stoull(f[2]);
    r.delta_hat = std::stod(f[3]);
    r.h = std::stod(f[4]);
    r.sup_error = std::stod(f[5]);
    r.iterations = std::stoi(f[6]);
    r.wall_time = std::stod(f[7]);
    r.valid = std::isfinite(r.sup_error);
    records.push_back(r);
  }
  return records;
}

/// One (n, trial) convergence job: sample, estimate resolution, build the
/// graph at the scaled bandwidth, solve, and measure sup |aronsson - u| over
/// all vertices. Throws only on configuration errors; a disconnected trial
/// comes back flagged invalid.
inline ConvergenceRecord run_convergence_trial(const StudyConfig& config, const Domain& domain,
                                               const KernelProfile& kernel, int n, int trial,
                                               std::uint64_t seed) {
  const auto t_start = std::chrono::steady_clock::now();
  ConvergenceRecord rec;
  rec.n = n;
  rec.trial = trial;
  rec.seed = seed;

  PointCloud cloud = sample_uniform(domain, n, seed);
  const auto labels_continuum = aronsson_labels();
  const double spacing = resolution_spacing(n);
  const double exponent = scaling_exponent(config.scaling);
  LabelSet labels;

  // The bandwidth is scaled by the cloud resolution alone. The joined
  // resolution (including the label-set Hausdorff term) is dominated by the
  // sampling gap at the star's cusp tips, which would inflate h without
  // making the graph any better resolved.
  rec.delta_hat = estimate_resolution(cloud, domain, spacing);
  rec.h = config.h_fixed > 0.0 ? config.h_fixed : config.c * std::pow(rec.delta_hat, exponent);

  if (config.constraint_mode == ConstraintMode::ClosestPoint) {
    labels = build_constraint_set(cloud, labels_continuum, ConstraintMode::ClosestPoint);
  } else {
    const std::function<double(const Point&)> label_fn = aronsson;
    labels = build_constraint_set(cloud, labels_continuum, ConstraintMode::Dilated, rec.h, &label_fn);
  }
  cloud.label_indices = labels.indices;
  std::sort(cloud.label_indices.begin(), cloud.label_indices.end());
  cloud.resolution_estimate = rec.delta_hat;

  const GeometricGraph g = build_graph(cloud, kernel, rec.h);
  try {
    SolveOptions opts;
    opts.tol = config.tol;
    const auto [u, report] = solve_amle(g, labels, opts);
    rec.iterations = report.iterations;
    if (!report.converged) throw std::runtime_error("solver did not converge");
    double err = 0.0;
    for (int i = 0; i < cloud.size(); ++i) err = std::max(err, std::abs(aronsson(cloud.points[i]) - u[i]));
    rec.sup_error = err;
  } catch (const std::runtime_error&) {
    rec.valid = false;
    rec.sup_error = std::numeric_limits<double>::quiet_NaN();
  }
  rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return rec;
}

/// Runs trials for every n in the config, in parallel when workers > 1.
/// Job j covers (n_list[j / trials], trial j % trials) with seed
/// base_seed + j, so the output is independent of the worker count.
inline std::vector<ConvergenceRecord> run_convergence_study(const StudyConfig& config) {
  config.validate();
  const Domain domain = config.make_domain();
  const KernelProfile kernel = KernelProfile::parse(config.kernel);

  const int jobs = static_cast<int>(config.n_list.size()) * config.trials;
  std::vector<ConvergenceRecord> records(jobs);
  run_jobs(jobs, config.workers, [&](int j) {
    const int n = config.n_list[j / config.trials];
    const int trial = j % config.trials;
    records[j] = run_convergence_trial(config, domain, kernel, n, trial, config.base_seed + j);
  });
  if (!config.output.empty()) write_results_csv(config.output, records);
  return records;
}

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

namespace detail {

inline RateFit ols(const std::vector<double>& x, const std::vector<double>& y) {
  const int m = static_cast<int>(x.size());
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < m; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < m; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_rate: degenerate abscissa");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy == 0.0) {
    fit.r_squared = 1.0;  // constant data: the flat line fits exactly
  } else {
    double ss_res = 0.0;
    for (int i = 0; i < m; ++i) {
      const double r = y[i] - (fit.intercept + fit.slope * x[i]);
      ss_res += r * r;
    }
    fit.r_squared = 1.0 - ss_res / syy;
  }
  return fit;
}

struct PerN {
  int n = 0;
  double mean_error = 0.0;
  double mean_delta = 0.0;
};

inline std::vector<PerN> group_means(const std::vector<ConvergenceRecord>& records) {
  std::vector<PerN> groups;
  for (const auto& r : records) {
    if (!r.valid || !std::isfinite(r.sup_error)) continue;
    auto it = std::find_if(groups.begin(), groups.end(), [&](const PerN& g) { return g.n == r.n; });
    if (it == groups.end()) {
      groups.push_back({r.n, 0.0, 0.0});
      it = groups.end() - 1;
    }
    it->mean_error += r.sup_error;
    it->mean_delta += r.delta_hat;
  }
  for (auto& g : groups) {
    int count = 0;
    for (const auto& r : records) {
      if (r.valid && std::isfinite(r.sup_error) && r.n == g.n) ++count;
    }
    g.mean_error /= count;
    g.mean_delta /= count;
  }
  std::sort(groups.begin(), groups.end(), [](const PerN& a, const PerN& b) { return a.n < b.n; });
  return groups;
}

}  // namespace detail

/// Mean sup error per n (valid trials only), ordered by n.
inline std::vector<std::pair<int, double>> mean_errors_by_n(
    const std::vector<ConvergenceRecord>& records) {
  std::vector<std::pair<int, double>> out;
  for (const auto& g : detail::group_means(records)) out.emplace_back(g.n, g.mean_error);
  return out;
}

/// OLS of log(mean sup error) against log n. The convergence rate is -slope.
inline RateFit fit_rate(const std::vector<ConvergenceRecord>& records) {
  const auto groups = detail::group_means(records);
  if (groups.size() < 2) throw std::invalid_argument("fit_rate: need >= 2 distinct n with valid trials");
  std::vector<double> x, y;
  for (const auto& g : groups) {
    if (!(g.mean_error > 0.0)) throw std::invalid_argument("fit_rate: nonpositive mean error");
    x.push_back(std::log(static_cast<double>(g.n)));
    y.push_back(std::log(g.mean_error));
  }
  return detail::ols(x, y);
}

/// Secondary fit: log(mean sup error) against log(mean delta_hat).
inline RateFit fit_rate_vs_delta(const std::vector<ConvergenceRecord>& records) {
  const auto groups = detail::group_means(records);
  if (groups.size() < 2)
    throw std::invalid_argument("fit_rate_vs_delta: need >= 2 distinct n with valid trials");
  std::vector<double> x, y;
  for (const auto& g : groups) {
    if (!(g.mean_error > 0.0)) throw std::invalid_argument("fit_rate_vs_delta: nonpositive mean error");
    x.push_back(std::log(g.mean_delta));
    y.push_back(std::log(g.mean_error));
  }
  return detail::ols(x, y);
}

struct ConeRecord {
  int n = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  int source = 0;
  double delta_hat = 0.0;       // certified: grid estimate plus grid tolerance
  double h = 0.0;
  double lower_margin = 0.0;    // max over vertices of (lower bound - d_n); <= 0 means the bound holds
  double upper_margin = 0.0;    // max over vertices of (d_n - upper bound); <= 0 means the bound holds
  double precondition_lhs = 0.0;  // delta/h
  double precondition_rhs = 0.0;  // t0 / (2 (2 + phi(delta)/delta))
};

/// Finite-n cone-comparison study: per (n, trial), sample, build the graph at
/// the configured bandwidth, pick a random source vertex, and compare the
/// graph cone d_n(., source) against its continuum envelope
///   max(|x - z|, (1 - phi(h)/h) d_Omega)  <=  d_n
///   d_n  <=  (1 + 4 delta/(t0 h) + 2 phi(delta)/(t0 h)) d_Omega + tau_eta h.
/// delta enters through a certified over-estimate, so the upper bound is
/// conservative; on convex domains the lower bound is exact.
inline std::vector<ConeRecord> run_cone_study(const StudyConfig& config) {
  config.validate();
  const Domain domain = config.make_domain();
  const KernelProfile kernel = KernelProfile::parse(config.kernel);
  if (!domain.convex() && domain.variant() != DomainVariant::LpStar)
    throw std::invalid_argument("run_cone_study: domain must be convex or the star");

  // The star needs geodesic continuum distances; the oracle is shared across
  // trials (its own cloud is independent of the study seeds).
  std::unique_ptr<GeodesicOracle> oracle;
  if (!domain.convex()) oracle = std::make_unique<GeodesicOracle>(domain);

  const int jobs = static_cast<int>(config.n_list.size()) * config.trials;
  std::vector<ConeRecord> records(jobs);
  // The oracle memoizes distance fields and is not thread-safe; star studies
  // run serially.
  const int workers = domain.convex() ? config.workers : 1;
  run_jobs(jobs, workers, [&](int j) {
    const int n = config.n_list[j / config.trials];
    ConeRecord rec;
    rec.n = n;
    rec.trial = j % config.trials;
    rec.seed = config.base_seed + j;

    const PointCloud cloud = sample_uniform(domain, n, rec.seed);
    const double spacing = resolution_spacing(n);
    const double delta_est = estimate_resolution(cloud, domain, spacing);
    // Certify: the grid misses the true Hausdorff distance by at most the
    // grid diagonal (in-domain grid nodes can sit a full diagonal away near
    // curved boundaries).
    rec.delta_hat = delta_est + spacing * std::sqrt(2.0);
    rec.h = config.h_fixed > 0.0 ? config.h_fixed
                                 : config.c * std::pow(rec.delta_hat, scaling_exponent(config.scaling));

    const double delta = rec.delta_hat;
    const double t0 = kernel.t_zero();
    rec.precondition_lhs = delta / rec.h;
    rec.precondition_rhs = t0 / (2.0 * (2.0 + domain.phi(delta) / delta));
    if (config.enforce_cone_precondition && rec.precondition_lhs > rec.precondition_rhs)
      throw std::runtime_error("run_cone_study: resolution/bandwidth precondition violated (delta/h = " +
                               std::to_string(rec.precondition_lhs) + " > " +
                               std::to_string(rec.precondition_rhs) + ")");

    const GeometricGraph g = build_graph(cloud, kernel, rec.h);
    Rng source_rng = Rng::stream(rec.seed, 1);
    rec.source = source_rng.uniform_int(n);
    const GraphFunction d = graph_distance_from(g, rec.source);

    const double lower_factor = 1.0 - domain.phi(rec.h) / rec.h;
    const double upper_factor = 1.0 + (4.0 * delta + 2.0 * domain.phi(delta)) / (t0 * rec.h);
    const double tau_term = kernel.tau_eta() * rec.h;
    const Point z = cloud.points[rec.source];

    const std::vector<double>* geo = nullptr;
    if (!domain.convex()) geo = &oracle->field_from(z);

    double lower_margin = -kUnreachable, upper_margin = -kUnreachable;
    for (int x = 0; x < n; ++x) {
      if (x == rec.source) continue;
      const double euclid = distance(cloud.points[x], z);
      double d_omega_lo = euclid, d_omega_hi = euclid;
      if (geo) {
        const double est = (*geo)[oracle->project(cloud.points[x])];
        const GeodesicResult band = oracle->distance(z, z);  // carries the certified factors
        d_omega_lo = est / band.upper_factor;
        d_omega_hi = est / band.lower_factor;
      }
      const double lower = std::max(euclid, lower_factor * d_omega_lo);
      const double upper = upper_factor * d_omega_hi + tau_term;
      if (d[x] == kUnreachable) {
        upper_margin = kUnreachable;  // disconnection: the upper bound cannot hold
        continue;
      }
      lower_margin = std::max(lower_margin, lower - d[x]);
      upper_margin = std::max(upper_margin, d[x] - upper);
    }
    rec.lower_margin = lower_margin;
    rec.upper_margin = upper_margin;
    records[j] = rec;
  });
  return records;
}

inline void write_cone_csv(const std::string& path, const std::vector<ConeRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "n,trial,seed,source,delta_hat,h,lower_margin,upper_margin,precondition_lhs,precondition_rhs\n";
  for (const auto& r : records) {
    out << r.n << ',' << r.trial << ',' << r.seed << ',' << r.source << ','
        << detail::format_double(r.delta_hat) << ',' << detail::format_double(r.h) << ','
        << detail::format_double(r.lower_margin) << ',' << detail::format_double(r.upper_margin) << ','
        << detail::format_double(r.precondition_lhs) << ','
        << detail::format_double(r.precondition_rhs) << '\n';
  }
}

}  // namespace liplearn
