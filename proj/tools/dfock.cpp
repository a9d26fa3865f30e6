// dfock: runs the verification scenarios and writes one JSON report each.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dfock/experiment/config.hpp"
#include "dfock/experiment/scenarios.hpp"
#include "dfock/io.hpp"
#include "dfock/parallel.hpp"
#include "dfock/types.hpp"

namespace fs = std::filesystem;
using namespace dfock;
using namespace dfock::experiment;

namespace {

struct Options {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  int threads = 0;
};

Config effective_config(const Options& o) {
  nlohmann::json j = o.config.empty() ? nlohmann::json::object() : io::read_json(o.config);
  if (o.seed) j["seed"] = *o.seed;
  const fs::path base = o.config.empty() ? fs::path(".") : fs::path(o.config).parent_path();
  return parse_config(j, base.empty() ? fs::path(".") : base);
}

int run(const std::vector<std::string>& names, const Options& o) {
  kernels::set_threads(o.threads);
  Config c;
  try {
    c = effective_config(o);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  RunOptions ro;
  ro.out_dir = o.out;
  bool all_pass = true;
  for (const auto& name : names) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const Report r = run_scenario(name, c, ro);
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::cout << name << ": " << (r.passed() ? "PASS" : "FAIL") << " (" << secs << " s)\n";
      for (const auto& [flag, v] : r.to_json()["flags"].items())
        if (!v["pass"].get<bool>()) std::cout << "  failed: " << flag << "\n";
      all_pass = all_pass && r.passed();
    } catch (const std::exception& e) {
      std::cout << name << ": ERROR " << e.what() << "\n";
      all_pass = false;
    }
  }
  std::cout << "reports written to " << fs::absolute(ro.out_dir).string() << "\n";
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks for Fock spaces with doubling weights"};
  app.require_subcommand(1);
  Options o;
  std::uint64_t seed = 0;
  auto add_flags = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "Output directory")->capture_default_str();
    sub->add_option("--seed", seed, "Seed for random test functions (overrides config)");
    sub->add_option("--threads", o.threads, "OpenMP threads (0 = runtime default)")
        ->check(CLI::NonNegativeNumber);
  };

  std::vector<std::string> names;
  for (const auto& n : scenario_names()) {
    auto* sub = app.add_subcommand(n, "Run the " + n + " scenario");
    add_flags(sub);
    sub->callback([&, n, sub] {
      if (sub->count("--seed")) o.seed = seed;
      names = {n};
    });
  }
  auto* all = app.add_subcommand("all", "Run every scenario");
  add_flags(all);
  all->callback([&] {
    if (all->count("--seed")) o.seed = seed;
    names = scenario_names();
  });

  CLI11_PARSE(app, argc, argv);
  return run(names, o);
}
