#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "liplearn/experiments.hpp"
#include "support/oracles.hpp"

using namespace liplearn;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("aronsson function and labels") {
  CHECK(aronsson({1.0, 0.0}) == 1.0);
  CHECK(aronsson({0.0, 1.0}) == -1.0);
  CHECK(aronsson({-1.0, 0.0}) == 1.0);
  CHECK(aronsson({0.5, 0.5}) == 0.0);
  CHECK(aronsson({0.5, -0.25}) ==
        Catch::Approx(std::pow(0.5, 4.0 / 3.0) - std::pow(0.25, 4.0 / 3.0)));
  const auto labels = aronsson_labels();
  REQUIRE(labels.size() == 4);
  CHECK(labels[0].second == 1.0);
  CHECK(labels[2].second == -1.0);
}

TEST_CASE("study config validation and JSON round trip") {
  StudyConfig c;
  c.n_list = {256, 512};
  c.kernel = "constant";
  c.domain = "ball";
  c.scaling = ScalingMode::Delta12;
  c.constraint_mode = ConstraintMode::Dilated;
  c.trials = 3;
  c.base_seed = 99;
  c.tol = 1e-7;
  c.workers = 4;
  c.h_fixed = 0.1;
  c.enforce_cone_precondition = false;
  c.validate();

  nlohmann::json j = c;
  const StudyConfig back = j.get<StudyConfig>();
  CHECK(back.domain == c.domain);
  CHECK(back.kernel == c.kernel);
  CHECK(back.n_list == c.n_list);
  CHECK(back.scaling == c.scaling);
  CHECK(back.constraint_mode == c.constraint_mode);
  CHECK(back.trials == c.trials);
  CHECK(back.base_seed == c.base_seed);
  CHECK(back.tol == c.tol);
  CHECK(back.workers == c.workers);
  CHECK(back.h_fixed == c.h_fixed);
  CHECK(back.enforce_cone_precondition == c.enforce_cone_precondition);

  StudyConfig bad = c;
  bad.n_list = {512, 256};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.n_list = {};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  StudyConfig bad2 = c;
  bad2.trials = 0;
  CHECK_THROWS_AS(bad2.validate(), std::invalid_argument);
  StudyConfig bad3 = c;
  bad3.domain = "annulus";
  CHECK_THROWS_AS(bad3.make_domain(), std::invalid_argument);
}

TEST_CASE("scaling exponents") {
  CHECK(scaling_exponent(ScalingMode::Delta) == 1.0);
  CHECK(scaling_exponent(ScalingMode::Delta23) == Catch::Approx(2.0 / 3.0));
  CHECK(scaling_exponent(ScalingMode::Delta12) == 0.5);
}

TEST_CASE("rate fit recovers exact power laws") {
  SECTION("pure power law err = 10 * n^{-1/2}") {
    std::vector<ConvergenceRecord> records;
    for (const int n : {100, 200, 400, 800}) {
      for (int t = 0; t < 3; ++t) {
        ConvergenceRecord r;
        r.n = n;
        r.trial = t;
        r.sup_error = 10.0 * std::pow(n, -0.5);
        r.delta_hat = 1.0 / std::sqrt(n);
        records.push_back(r);
      }
    }
    const auto fit = fit_rate(records);
    CHECK(fit.slope == Catch::Approx(-0.5).margin(1e-12));
    CHECK(fit.intercept == Catch::Approx(std::log(10.0)).margin(1e-12));
    CHECK(fit.r_squared == Catch::Approx(1.0).margin(1e-12));
    const auto dfit = fit_rate_vs_delta(records);
    CHECK(dfit.slope == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("constant errors give slope 0 and r2 = 1") {
    std::vector<ConvergenceRecord> records;
    for (const int n : {100, 200}) {
      ConvergenceRecord r;
      r.n = n;
      r.sup_error = 0.37;
      r.delta_hat = 1.0 / n;
      records.push_back(r);
    }
    const auto fit = fit_rate(records);
    CHECK(fit.slope == Catch::Approx(0.0).margin(1e-12));
    CHECK(fit.r_squared == 1.0);
  }
  SECTION("noisy data stays close to the planted slope") {
    Rng rng(61);
    std::vector<ConvergenceRecord> records;
    for (const int n : {100, 200, 400, 800, 1600}) {
      for (int t = 0; t < 5; ++t) {
        ConvergenceRecord r;
        r.n = n;
        r.trial = t;
        r.sup_error = 3.0 * std::pow(n, -0.7) * std::exp(rng.uniform(-0.05, 0.05));
        records.push_back(r);
      }
    }
    const auto fit = fit_rate(records);
    CHECK(fit.slope == Catch::Approx(-0.7).margin(0.05));
    CHECK(fit.r_squared > 0.98);
  }
  SECTION("invalid trials are excluded from the means") {
    std::vector<ConvergenceRecord> records;
    for (const int n : {100, 200}) {
      ConvergenceRecord good;
      good.n = n;
      good.sup_error = 1.0 / n;
      records.push_back(good);
      ConvergenceRecord bad;
      bad.n = n;
      bad.trial = 1;
      bad.valid = false;
      bad.sup_error = std::numeric_limits<double>::quiet_NaN();
      records.push_back(bad);
    }
    const auto means = mean_errors_by_n(records);
    REQUIRE(means.size() == 2);
    CHECK(means[0].second == Catch::Approx(0.01));
    CHECK(means[1].second == Catch::Approx(0.005));
    const auto fit = fit_rate(records);
    CHECK(fit.slope == Catch::Approx(-1.0).margin(1e-12));
  }
  SECTION("one group is rejected") {
    std::vector<ConvergenceRecord> records(2);
    records[0].n = records[1].n = 100;
    records[0].sup_error = records[1].sup_error = 0.5;
    CHECK_THROWS_AS(fit_rate(records), std::invalid_argument);
  }
}

TEST_CASE("results CSV round trip preserves every field") {
  std::vector<ConvergenceRecord> records(3);
  records[0] = {512, 0, 42, 0.03125, 0.2, 0.0731234567891234, 17, 1.25, true};
  records[1] = {512, 1, 43, 0.03, 0.19, std::numeric_limits<double>::quiet_NaN(), 0, 0.5, false};
  records[2] = {1024, 0, 44, 0.022, 0.16, 1e-300, 3, 0.875, true};
  const std::string path = "test_results_roundtrip.csv";
  write_results_csv(path, records);
  const auto back = read_results_csv(path);
  REQUIRE(back.size() == 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(back[k].n == records[k].n);
    CHECK(back[k].trial == records[k].trial);
    CHECK(back[k].seed == records[k].seed);
    CHECK(back[k].delta_hat == records[k].delta_hat);
    CHECK(back[k].h == records[k].h);
    CHECK(back[k].iterations == records[k].iterations);
    CHECK(back[k].wall_time == records[k].wall_time);
    CHECK(back[k].valid == records[k].valid);
    if (records[k].valid) {
      CHECK(back[k].sup_error == records[k].sup_error);
    } else {
      CHECK(std::isnan(back[k].sup_error));
    }
  }
  std::remove(path.c_str());
}

TEST_CASE("small convergence study on the ball behaves sensibly") {
  StudyConfig c;
  c.domain = "ball";
  c.kernel = "power:1";
  c.n_list = {200, 400};
  c.trials = 2;
  c.base_seed = 5;
  c.tol = 1e-6;
  const auto records = run_convergence_study(c);
  REQUIRE(records.size() == 4);
  for (const auto& r : records) {
    REQUIRE(r.valid);
    CHECK(r.delta_hat > 0.0);
    CHECK(r.h == Catch::Approx(2.0 * std::pow(r.delta_hat, 2.0 / 3.0)));
    // Aronsson ranges over [-1, 1] on the ball; the error cannot blow past it.
    CHECK(r.sup_error < 2.0);
    CHECK(r.sup_error > 0.0);
  }
  CHECK(records[0].seed == 5);
  CHECK(records[3].seed == 8);
}

TEST_CASE("study output is identical across worker counts") {
  StudyConfig c;
  c.domain = "ball";
  c.kernel = "constant";
  c.n_list = {150, 300};
  c.trials = 2;
  c.base_seed = 12;
  c.output = "test_study_w1.csv";
  c.workers = 1;
  run_convergence_study(c);
  c.output = "test_study_w4.csv";
  c.workers = 4;
  run_convergence_study(c);

  // Byte-identical except for the wall-time column.
  const auto strip_wall = [](const std::string& text) {
    std::stringstream in(text), out;
    std::string line;
    while (std::getline(in, line)) {
      out << line.substr(0, line.rfind(',')) << '\n';
    }
    return out.str();
  };
  CHECK(strip_wall(slurp("test_study_w1.csv")) == strip_wall(slurp("test_study_w4.csv")));
  std::remove("test_study_w1.csv");
  std::remove("test_study_w4.csv");
}

TEST_CASE("cone study margins on the ball") {
  StudyConfig c;
  c.domain = "ball";
  c.kernel = "power:1";
  c.n_list = {4000};
  c.trials = 2;
  c.base_seed = 3;
  c.h_fixed = 0.3;
  const auto records = run_cone_study(c);
  REQUIRE(records.size() == 2);
  for (const auto& r : records) {
    CHECK(r.h == 0.3);
    CHECK(r.source >= 0);
    CHECK(r.source < 4000);
    // Convex domain: lower bound is exact, so the margin can touch zero but
    // not exceed it (beyond rounding); the certified upper bound must hold.
    CHECK(r.lower_margin <= 1e-12);
    CHECK(r.upper_margin <= 0.0);
    CHECK(r.precondition_lhs <= r.precondition_rhs);
  }
}

TEST_CASE("cone study enforces its precondition") {
  StudyConfig c;
  c.domain = "ball";
  c.kernel = "constant";
  c.n_list = {200};
  c.trials = 1;
  c.base_seed = 3;
  c.h_fixed = 0.05;  // far below the resolution at n = 200
  CHECK_THROWS_AS(run_cone_study(c), std::runtime_error);
  c.enforce_cone_precondition = false;
  CHECK_NOTHROW(run_cone_study(c));
}
