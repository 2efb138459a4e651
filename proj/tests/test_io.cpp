#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>

#include "liplearn/io.hpp"
#include "liplearn/parallel.hpp"
#include "liplearn/point_cloud.hpp"

using namespace liplearn;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(std::string p) : path(std::move(p)) {}
  ~TempFile() {
    std::remove(path.c_str());
    std::remove((path + ".json").c_str());
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("format_double round trips") {
  for (const double v : {0.1, 1.0 / 3.0, 1e-300, 1e300, -0.0, 123456789.123456789,
                         std::numeric_limits<double>::quiet_NaN()}) {
    const std::string s = detail::format_double(v);
    const double back = std::stod(s);
    if (std::isnan(v)) {
      CHECK(std::isnan(back));
    } else {
      CHECK(back == v);
    }
  }
}

TEST_CASE("csv line splitting") {
  CHECK(detail::split_csv_line("a,b,c") == std::vector<std::string>{"a", "b", "c"});
  CHECK(detail::split_csv_line("1,,3") == std::vector<std::string>{"1", "", "3"});
  CHECK(detail::split_csv_line("x,") == std::vector<std::string>{"x", ""});
}

TEST_CASE("cloud CSV round trip with labels") {
  const auto cloud = sample_uniform(Domain::box({0, 0}, {1, 1}), 50, 71);
  LabelSet labels;
  labels.indices = {0, 17, 49};
  labels.values = {1.0, -0.5, 1.0 / 3.0};
  TempFile f("test_cloud_io.csv");
  write_cloud_csv(f.path, cloud, &labels);

  const auto [back, back_labels] = read_cloud_csv(f.path);
  REQUIRE(back.points == cloud.points);
  REQUIRE(back_labels.indices == labels.indices);
  REQUIRE(back_labels.values == labels.values);
  REQUIRE(back.label_indices == labels.indices);

  // Header line is fixed.
  CHECK(slurp(f.path).substr(0, 18) == "x0,x1,label_value\n");
}

TEST_CASE("graph CSV round trip with sidecar") {
  const auto cloud = sample_uniform(Domain::ball({0, 0}, 1.0), 120, 72);
  const auto g = build_graph(cloud, KernelProfile::power(0.5), 0.3);
  TempFile f("test_graph_io.csv");
  write_graph_csv(f.path, g, 72);

  const auto back = read_graph_csv(f.path);
  REQUIRE(back.n == g.n);
  REQUIRE(back.h == g.h);
  REQUIRE(back.kernel.name() == g.kernel.name());
  REQUIRE(back.offsets == g.offsets);
  REQUIRE(back.neighbors == g.neighbors);
  REQUIRE(back.weights == g.weights);

  nlohmann::json sidecar;
  std::ifstream side(f.path + ".json");
  side >> sidecar;
  CHECK(sidecar.at("seed").get<std::uint64_t>() == 72);
  CHECK(sidecar.at("n").get<int>() == 120);
}

TEST_CASE("function CSV round trip") {
  const std::vector<double> values = {0.25, -1.0 / 7.0, 3e-12, 0.0};
  TempFile f("test_fn_io.csv");
  write_function_csv(f.path, "value", values);
  const auto back = read_function_csv(f.path, 4);
  REQUIRE(back == values);

  const auto as_labels = read_labels_csv(f.path);
  REQUIRE(as_labels.indices == std::vector<int>{0, 1, 2, 3});
  REQUIRE(as_labels.values == values);

  CHECK_THROWS_AS(read_function_csv(f.path, 2), std::runtime_error);
}

TEST_CASE("sparse function CSV with explicit indices") {
  TempFile f("test_sparse_fn_io.csv");
  write_function_csv(f.path, "label", {3, 11}, {0.5, -0.5});
  const auto labels = read_labels_csv(f.path);
  REQUIRE(labels.indices == std::vector<int>{3, 11});
  REQUIRE(labels.values == std::vector<double>{0.5, -0.5});
  const auto dense = read_function_csv(f.path, 12);
  CHECK(dense[3] == 0.5);
  CHECK(dense[11] == -0.5);
  CHECK(dense[0] == 0.0);
}

TEST_CASE("writes are byte-deterministic") {
  const auto cloud = sample_uniform(Domain::box({0, 0}, {1, 1}), 80, 73);
  const auto g = build_graph(cloud, KernelProfile::exponential(0.5), 0.2);
  TempFile a("test_det_a.csv"), b("test_det_b.csv");
  write_graph_csv(a.path, g, 73);
  write_graph_csv(b.path, g, 73);
  CHECK(slurp(a.path) == slurp(b.path));
  CHECK(slurp(a.path + ".json") == slurp(b.path + ".json"));
}

TEST_CASE("missing files throw") {
  CHECK_THROWS_AS(read_cloud_csv("no_such_file.csv"), std::runtime_error);
  CHECK_THROWS_AS(read_graph_csv("no_such_file.csv"), std::runtime_error);
  CHECK_THROWS_AS(read_labels_csv("no_such_file.csv"), std::runtime_error);
}

TEST_CASE("run_jobs covers every job exactly once, any worker count") {
  for (const int workers : {1, 3, 8}) {
    std::vector<int> hits(100, 0);
    run_jobs(100, workers, [&](int j) { hits[j] += 1; });
    for (int h : hits) REQUIRE(h == 1);
  }
}

TEST_CASE("run_jobs propagates the lowest-index exception") {
  try {
    run_jobs(50, 4, [&](int j) {
      if (j % 10 == 3) throw std::runtime_error("job " + std::to_string(j));
    });
    FAIL("expected a throw");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "job 3");
  }
}
