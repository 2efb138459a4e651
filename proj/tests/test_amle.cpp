#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "liplearn/amle.hpp"
#include "liplearn/graph.hpp"
#include "liplearn/point_cloud.hpp"
#include "support/oracles.hpp"

using namespace liplearn;

namespace {

GeometricGraph unit_box_graph(int n, std::uint64_t seed, double h,
                              const KernelProfile& kernel = KernelProfile::constant()) {
  const auto cloud = sample_uniform(Domain::box({0, 0}, {1, 1}), n, seed);
  return build_graph(cloud, kernel, h);
}

}  // namespace

TEST_CASE("local solve on two neighbors by hand") {
  SECTION("equal weights average the values") {
    const double w[] = {1.0, 1.0};
    const double v[] = {0.0, 1.0};
    CHECK(local_solve(w, v) == Catch::Approx(0.5).margin(1e-14));
  }
  SECTION("weight 2 vs 1 gives the weighted mean 1/3") {
    const double w[] = {2.0, 1.0};
    const double v[] = {0.0, 1.0};
    CHECK(local_solve(w, v) == Catch::Approx(1.0 / 3.0).margin(1e-14));
  }
  SECTION("single neighbor returns its value") {
    const double w[] = {3.0};
    const double v[] = {0.7};
    CHECK(local_solve(w, v) == 0.7);
  }
  SECTION("constant values are a fixed point") {
    const double w[] = {1.0, 2.0, 5.0};
    const double v[] = {0.4, 0.4, 0.4};
    CHECK(local_solve(w, v) == 0.4);
  }
}

TEST_CASE("local solve agrees with dense bisection on random inputs") {
  Rng rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const int m = 2 + rng.uniform_int(8);
    std::vector<double> w(m), v(m);
    for (int k = 0; k < m; ++k) {
      w[k] = rng.uniform(0.1, 10.0);
      v[k] = rng.uniform(-5.0, 5.0);
    }
    const double got = local_solve(w, v);
    const double want = oracles::local_solve_bisect(w, v);
    REQUIRE(got == Catch::Approx(want).margin(1e-9));
    // And the root property itself.
    double lo = oracles::kInf, hi = -oracles::kInf;
    for (int k = 0; k < m; ++k) {
      const double t = w[k] * (v[k] - got);
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
    REQUIRE(std::abs(lo + hi) <= 1e-9);
  }
}

TEST_CASE("path graph interpolates labels linearly") {
  // a -- b -- c with equal weights, u(a)=0, u(c)=1: the solution at b is 0.5.
  PointCloud cloud;
  cloud.points = {{0.0, 0.0}, {0.9, 0.0}, {1.8, 0.0}};
  const auto g = build_graph(cloud, KernelProfile::constant(), 1.0);
  LabelSet labels;
  labels.indices = {0, 2};
  labels.values = {0.0, 1.0};
  const auto [u, report] = solve_amle(g, labels);
  CHECK(report.converged);
  CHECK(u[0] == 0.0);
  CHECK(u[1] == Catch::Approx(0.5).margin(1e-8));
  CHECK(u[2] == 1.0);
}

TEST_CASE("solver agrees with the Jacobi oracle from several initializations") {
  const auto g = unit_box_graph(120, 41, 0.35);
  LabelSet labels;
  labels.indices = {0, 60, 119};
  labels.values = {0.0, 1.0, -0.5};
  SolveOptions opts;
  opts.tol = 1e-10;
  const auto [u, report] = solve_amle(g, labels, opts);
  REQUIRE(report.converged);

  for (const double init_val : {0.0, 5.0, -3.0}) {
    const std::vector<double> init(g.n, init_val);
    const auto oracle = oracles::jacobi_amle(g, labels.indices, labels.values, init, 1e-12);
    double diff = 0.0;
    for (int i = 0; i < g.n; ++i) diff = std::max(diff, std::abs(u[i] - oracle[i]));
    REQUIRE(diff <= 1e-6);
  }
}

TEST_CASE("Jacobi sweep mode reaches the same solution") {
  const auto g = unit_box_graph(100, 42, 0.35);
  LabelSet labels;
  labels.indices = {3, 97};
  labels.values = {0.0, 1.0};
  SolveOptions gs;
  gs.tol = 1e-10;
  SolveOptions jac = gs;
  jac.mode = SweepMode::Jacobi;
  jac.accelerate = false;
  jac.max_iter = 500000;
  const auto [ug, rg] = solve_amle(g, labels, gs);
  const auto [uj, rj] = solve_amle(g, labels, jac);
  REQUIRE(rg.converged);
  REQUIRE(rj.converged);
  for (int i = 0; i < g.n; ++i) REQUIRE(ug[i] == Catch::Approx(uj[i]).margin(1e-6));
}

TEST_CASE("residual history is nonincreasing") {
  const auto g = unit_box_graph(400, 43, 0.2, KernelProfile::power(1.0));
  LabelSet labels;
  labels.indices = {0, 100, 399};
  labels.values = {1.0, -1.0, 0.3};
  const auto [u, report] = solve_amle(g, labels);
  REQUIRE(report.converged);
  REQUIRE(report.residual_history.size() >= 2);
  for (std::size_t k = 1; k < report.residual_history.size(); ++k)
    REQUIRE(report.residual_history[k] <= report.residual_history[k - 1]);
  CHECK(report.final_residual == report.residual_history.back());
}

TEST_CASE("comparison principle between ordered label sets") {
  const auto g = unit_box_graph(250, 44, 0.25);
  LabelSet lo, hi;
  lo.indices = hi.indices = {5, 125, 245};
  lo.values = {0.0, 0.5, -0.2};
  hi.values = {0.1, 0.9, -0.2};  // pointwise >= lo
  SolveOptions opts;
  opts.tol = 1e-10;
  const auto [ulo, rlo] = solve_amle(g, lo, opts);
  const auto [uhi, rhi] = solve_amle(g, hi, opts);
  REQUIRE(rlo.converged);
  REQUIRE(rhi.converged);
  for (int i = 0; i < g.n; ++i) REQUIRE(uhi[i] >= ulo[i] - 1e-7);
}

TEST_CASE("solution obeys the maximum principle and scaling equivariance") {
  const auto g = unit_box_graph(300, 45, 0.22);
  LabelSet labels;
  labels.indices = {1, 150, 299};
  labels.values = {-2.0, 1.0, 0.25};
  SolveOptions opts;
  opts.tol = 1e-10;
  const auto [u, r] = solve_amle(g, labels, opts);
  REQUIRE(r.converged);
  for (double x : u) {
    REQUIRE(x >= -2.0 - 1e-9);
    REQUIRE(x <= 1.0 + 1e-9);
  }
  // u -> a*u + b maps the solution of labels g to that of a*g + b.
  const double a = 3.0, b = -1.5;
  LabelSet scaled = labels;
  for (double& v : scaled.values) v = a * v + b;
  const auto [us, rs] = solve_amle(g, scaled, opts);
  REQUIRE(rs.converged);
  for (int i = 0; i < g.n; ++i) REQUIRE(us[i] == Catch::Approx(a * u[i] + b).margin(1e-6));
}

TEST_CASE("comparison with cones holds on a solved instance") {
  const auto g = unit_box_graph(200, 46, 0.25);
  LabelSet labels;
  labels.indices = {0, 100, 199};
  labels.values = {0.0, 1.0, 0.5};
  SolveOptions opts;
  opts.tol = 1e-10;
  const auto [u, r] = solve_amle(g, labels, opts);
  REQUIRE(r.converged);
  int skipped = 0;
  const double violation = comparison_with_cones_check(g, u, labels, 40, 77, &skipped);
  CHECK(violation <= 1e-6);
  CHECK(skipped < 40);
}

TEST_CASE("solver errors") {
  const auto g = unit_box_graph(50, 47, 0.4);
  LabelSet empty;
  CHECK_THROWS_AS(solve_amle(g, empty), std::invalid_argument);
  LabelSet dup;
  dup.indices = {1, 1};
  dup.values = {0.0, 1.0};
  CHECK_THROWS_AS(solve_amle(g, dup), std::invalid_argument);
  LabelSet out_of_range;
  out_of_range.indices = {-1};
  out_of_range.values = {0.0};
  CHECK_THROWS_AS(solve_amle(g, out_of_range), std::invalid_argument);

  // Disconnected graph: solving must refuse.
  PointCloud cloud;
  cloud.points = {{0.0, 0.0}, {0.1, 0.0}, {5.0, 0.0}};
  const auto g2 = build_graph(cloud, KernelProfile::constant(), 0.2);
  LabelSet labels;
  labels.indices = {0};
  labels.values = {1.0};
  CHECK_THROWS_AS(solve_amle(g2, labels), std::runtime_error);
}
