// liplearn command-line interface: sampling, graph construction, cones,
// Lipschitz-learning solves, convergence studies, rate fits, and nonlocal
// consistency checks.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "liplearn/amle.hpp"
#include "liplearn/experiments.hpp"
#include "liplearn/geodesic.hpp"
#include "liplearn/graph.hpp"
#include "liplearn/io.hpp"
#include "liplearn/kernel.hpp"
#include "liplearn/nonlocal.hpp"
#include "liplearn/point_cloud.hpp"
#include "liplearn/shortest_path.hpp"

namespace {

liplearn::Domain parse_domain(const std::string& spec, double star_modulus_c) {
  using liplearn::Domain;
  using liplearn::Point;
  if (spec == "box") return Domain::box({-1.0, -1.0}, {1.0, 1.0});
  if (spec == "ball") return Domain::ball({0.0, 0.0}, 1.0);
  if (spec == "star") return Domain::lp_star(star_modulus_c);
  if (spec.rfind("polygon:", 0) == 0) {
    const std::string path = spec.substr(8);
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open polygon file " + path);
    std::vector<Point> vertices;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw std::runtime_error("malformed polygon row: " + line);
      vertices.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
    }
    return Domain::convex_polygon(std::move(vertices));
  }
  throw std::runtime_error("unknown domain spec: " + spec);
}

int run(int argc, char** argv) {
  CLI::App app{"Lipschitz learning on geometric graphs"};
  app.require_subcommand(1);

  // kernel-info
  auto* cmd_kernel = app.add_subcommand("kernel-info", "Print the derived kernel constants");
  std::string kernel_spec = "constant";
  cmd_kernel->add_option("--kernel", kernel_spec, "constant | exponential:<sigma> | power:<p>");
  cmd_kernel->callback([&] {
    const auto k = liplearn::KernelProfile::parse(kernel_spec);
    std::cout << "name,sigma_eta,t_zero,tau_eta\n"
              << k.name() << ',' << liplearn::detail::format_double(k.sigma_eta()) << ','
              << liplearn::detail::format_double(k.t_zero()) << ','
              << liplearn::detail::format_double(k.tau_eta()) << '\n';
  });

  // sample
  auto* cmd_sample = app.add_subcommand("sample", "Sample a uniform point cloud from a domain");
  std::string sample_domain = "box";
  int sample_n = 1000;
  std::uint64_t sample_seed = 1;
  double star_c = 3.0;
  std::string sample_out;
  cmd_sample->add_option("--domain", sample_domain, "box | ball | polygon:<file> | star");
  cmd_sample->add_option("--n", sample_n, "number of points")->required();
  cmd_sample->add_option("--seed", sample_seed, "sampling seed");
  cmd_sample->add_option("--star-modulus-c", star_c, "modulus constant of the star domain");
  cmd_sample->add_option("--out", sample_out, "output cloud CSV")->required();
  cmd_sample->callback([&] {
    const auto domain = parse_domain(sample_domain, star_c);
    const auto cloud = liplearn::sample_uniform(domain, sample_n, sample_seed);
    liplearn::write_cloud_csv(sample_out, cloud);
  });

  // graph
  auto* cmd_graph = app.add_subcommand("graph", "Build a geometric graph from a cloud");
  std::string graph_cloud, graph_kernel = "constant", graph_out;
  double graph_h = 0.1;
  cmd_graph->add_option("--cloud", graph_cloud, "input cloud CSV")->required();
  cmd_graph->add_option("--kernel", graph_kernel, "kernel spec");
  cmd_graph->add_option("--bandwidth", graph_h, "bandwidth")->required();
  cmd_graph->add_option("--out", graph_out, "output graph CSV")->required();
  cmd_graph->callback([&] {
    const auto [cloud, labels] = liplearn::read_cloud_csv(graph_cloud);
    const auto g = liplearn::build_graph(cloud, liplearn::KernelProfile::parse(graph_kernel), graph_h);
    liplearn::write_graph_csv(graph_out, g, cloud.seed);
  });

  // cones
  auto* cmd_cones = app.add_subcommand("cones", "Graph distance function from a source vertex");
  std::string cones_graph, cones_out;
  int cones_source = 0;
  cmd_cones->add_option("--graph", cones_graph, "input graph CSV")->required();
  cmd_cones->add_option("--source", cones_source, "apex vertex index")->required();
  cmd_cones->add_option("--out", cones_out, "output distance CSV")->required();
  cmd_cones->callback([&] {
    const auto g = liplearn::read_graph_csv(cones_graph);
    const auto d = liplearn::graph_distance_from(g, cones_source);
    liplearn::write_function_csv(cones_out, "distance", d);
  });

  // solve
  auto* cmd_solve = app.add_subcommand("solve", "Solve the Lipschitz learning problem");
  std::string solve_graph, solve_labels, solve_out;
  double solve_tol = 1e-8;
  cmd_solve->add_option("--graph", solve_graph, "input graph CSV")->required();
  cmd_solve->add_option("--labels", solve_labels, "labels CSV (vertex,value)")->required();
  cmd_solve->add_option("--tol", solve_tol, "normalized residual tolerance");
  cmd_solve->add_option("--out", solve_out, "output solution CSV")->required();
  cmd_solve->callback([&] {
    const auto g = liplearn::read_graph_csv(solve_graph);
    const auto labels = liplearn::read_labels_csv(solve_labels);
    liplearn::SolveOptions opts;
    opts.tol = solve_tol;
    const auto [u, report] = liplearn::solve_amle(g, labels, opts);
    liplearn::write_function_csv(solve_out, "value", u);
    nlohmann::json j{{"iterations", report.iterations},
                     {"residual", report.final_residual},
                     {"converged", report.converged},
                     {"wall_time", report.wall_time}};
    std::ofstream rep(solve_out + ".report.json");
    rep << j.dump(2) << '\n';
  });

  // study
  auto* cmd_study = app.add_subcommand("study", "Run a convergence study from a JSON config");
  std::string study_config, study_out;
  cmd_study->add_option("--config", study_config, "StudyConfig JSON")->required();
  cmd_study->add_option("--out", study_out, "results CSV (overrides the config's output)");
  cmd_study->callback([&] {
    std::ifstream in(study_config);
    if (!in) throw std::runtime_error("cannot open " + study_config);
    nlohmann::json j;
    in >> j;
    auto config = j.get<liplearn::StudyConfig>();
    if (!study_out.empty()) config.output = study_out;
    liplearn::run_convergence_study(config);
  });

  // fit
  auto* cmd_fit = app.add_subcommand("fit", "Fit a log-log convergence rate from results");
  std::string fit_in;
  cmd_fit->add_option("--in", fit_in, "results CSV")->required();
  cmd_fit->callback([&] {
    const auto records = liplearn::read_results_csv(fit_in);
    const auto fit = liplearn::fit_rate(records);
    std::cout << "slope,intercept,r2\n"
              << liplearn::detail::format_double(fit.slope) << ','
              << liplearn::detail::format_double(fit.intercept) << ','
              << liplearn::detail::format_double(fit.r_squared) << '\n';
  });

  // nonlocal-check
  auto* cmd_nl = app.add_subcommand("nonlocal-check",
                                    "Check the solved function against the nonlocal operators");
  std::string nl_u, nl_cloud, nl_out, nl_domain = "box", nl_kernel = "constant";
  double nl_eps = 0.2, nl_h = 0.1, nl_spacing = 0.0, nl_star_c = 3.0;
  cmd_nl->add_option("--u", nl_u, "solution CSV (vertex,value)")->required();
  cmd_nl->add_option("--cloud", nl_cloud, "cloud CSV; labeled rows are the constraint set")->required();
  cmd_nl->add_option("--eps", nl_eps, "nonlocal ball radius")->required();
  cmd_nl->add_option("--bandwidth", nl_h, "graph bandwidth used for the solve");
  cmd_nl->add_option("--kernel", nl_kernel, "kernel spec used for the solve");
  cmd_nl->add_option("--domain", nl_domain, "box | ball | polygon:<file> | star");
  cmd_nl->add_option("--grid-spacing", nl_spacing, "ball discretization spacing (default eps/20)");
  cmd_nl->add_option("--star-modulus-c", nl_star_c, "modulus constant of the star domain");
  cmd_nl->add_option("--out", nl_out, "output report JSON")->required();
  cmd_nl->callback([&] {
    const auto domain = parse_domain(nl_domain, nl_star_c);
    auto [cloud, labels] = liplearn::read_cloud_csv(nl_cloud);
    const auto u = liplearn::read_function_csv(nl_u, cloud.size());
    const auto g = liplearn::build_graph(cloud, liplearn::KernelProfile::parse(nl_kernel), nl_h);
    cloud.resolution_estimate =
        liplearn::estimate_resolution(cloud, domain, liplearn::resolution_spacing(cloud.size()));
    std::vector<liplearn::Point> label_points;
    for (int i : cloud.label_indices) label_points.push_back(cloud.points[i]);
    const double spacing = nl_spacing > 0.0 ? nl_spacing : nl_eps / 20.0;
    std::unique_ptr<liplearn::GeodesicOracle> oracle;
    if (!domain.convex()) oracle = std::make_unique<liplearn::GeodesicOracle>(domain);
    const auto report =
        liplearn::max_ball_check(u, g, cloud, domain, nl_eps, label_points, spacing, oracle.get());
    nlohmann::json j{{"max_superviolation", report.max_superviolation},
                     {"max_subviolation", report.max_subviolation},
                     {"predicted_scale", report.predicted_scale},
                     {"points_checked", report.points_checked}};
    std::ofstream out(nl_out);
    out << j.dump(2) << '\n';
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
