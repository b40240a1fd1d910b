#include "cli.hpp"

#include "stbem/output.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace stbem::cli {

namespace {

QuadOrders parse_orders(const std::string& s) {
  QuadOrders q;
  std::istringstream ss(s);
  std::string part;
  int* fields[] = {&q.plain, &q.log, &q.inv_sqrt};
  int k = 0;
  while (std::getline(ss, part, ',')) {
    if (k == 3) {
      throw CLI::ValidationError("--orders", "expected three comma-separated integers");
    }
    std::size_t pos = 0;
    int v = 0;
    try {
      v = std::stoi(part, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != part.size() || part.empty() || v < 1 || v > 64) {
      throw CLI::ValidationError("--orders", "orders must be integers in [1, 64]");
    }
    *fields[k++] = v;
  }
  if (k != 3) {
    throw CLI::ValidationError("--orders", "expected three comma-separated integers");
  }
  return q;
}

} // namespace

ParseResult parse_args(int argc, const char* const* argv) {
  CLI::App app{"Adaptive space-time boundary elements for the 2D heat equation"};
  app.set_version_flag("--version", code_version());
  std::string problem = "smooth";
  std::string refine = "uniform";
  AdaptiveConfig config;
  std::string orders;
  bool no_hh2 = false;
  app.add_option("--problem", problem, "Benchmark problem")
      ->check(CLI::IsMember({"smooth", "mild", "singular", "lshape"}))
      ->capture_default_str();
  app.add_option("--refine", refine, "Refinement strategy")
      ->check(CLI::IsMember({"uniform", "isotropic", "anisotropic", "parabolic-uniform", "parabolic-adaptive"}))
      ->capture_default_str();
  app.add_option("--theta", config.theta, "Marking parameter in (0, 1]")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app.add_option("--max-dofs", config.max_dofs, "Stop once the mesh has more elements")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--orders", orders, "Quadrature orders plain,log,inv_sqrt (default 12,16,12)");
  app.add_flag("--no-hh2", no_hh2, "Skip the (h-h/2) reference estimator");
  app.add_option("--out", config.out_dir, "Output directory")->capture_default_str();

  ParseResult result;
  try {
    app.parse(argc, argv);
    if (!(config.theta > 0.0)) {
      throw CLI::ValidationError("--theta", "theta must lie in (0, 1]");
    }
    config.problem = problem;
    config.mode = refine_mode_from_string(refine);
    config.hh2 = !no_hh2;
    if (!orders.empty()) {
      config.orders = parse_orders(orders);
    }
    result.config = config;
  } catch (const CLI::ParseError& e) {
    std::ostringstream out;
    std::ostringstream err;
    result.exit_code = app.exit(e, out, err);
    result.message = out.str() + err.str();
  }
  return result;
}

int run(const AdaptiveConfig& config) {
  RunWriter writer(config.out_dir, config);
  std::cout << "level        N          eta         zeta        h-h/2\n";
  auto observe = [&](const LevelView& v) {
    const ConvergenceRecord& r = v.record;
    writer.add_level(r, v.mesh);
    std::printf("%5d %8zu %12.5e %12.5e %12.5e\n", r.level, r.n, r.eta, r.zeta, r.hh2);
    std::fflush(stdout);
  };
  try {
    const auto records = run_adaptive(config, observe);
    writer.finish(true);
    if (records.size() >= 2) {
      const std::size_t w = std::min<std::size_t>(3, records.size());
      std::printf("slopes over the last %zu levels: eta %.3f  zeta %.3f", w,
                  fit_rate(records, w, Quantity::eta), fit_rate(records, w, Quantity::zeta));
      if (config.hh2) {
        std::printf("  h-h/2 %.3f", fit_rate(records, w, Quantity::hh2));
      }
      std::printf("\n");
    }
    return 0;
  } catch (const std::exception& e) {
    writer.finish(false, e.what());
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

} // namespace stbem::cli
