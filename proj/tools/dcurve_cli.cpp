#include <dcurve/dcurve.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace {

int list_experiments() {
  std::size_t width = 0;
  for (const auto& e : dcurve::experiment_registry()) width = std::max(width, e.name.size());
  for (const auto& e : dcurve::experiment_registry())
    std::cout << std::left << std::setw(static_cast<int>(width) + 2) << e.name << e.claim << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dirichlet curve experiments"};
  std::string experiment, config_path, seed, n, t, out, confidence;
  std::vector<std::string> overrides;
  app.add_option("experiment", experiment, "experiment name, or 'list'")->required();
  app.add_option("--config", config_path, "key=value config file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "RNG seed (required here or in the config)");
  app.add_option("--n", n, "sample size");
  app.add_option("--t", t, "comma-separated intensity grid");
  app.add_option("--out", out, "CSV output path");
  app.add_option("--confidence", confidence, "confidence level for interval checks");
  app.add_option("--set", overrides, "extra key=value setting, repeatable");
  CLI11_PARSE(app, argc, argv);

  if (experiment == "list") return list_experiments();

  const dcurve::ExperimentInfo* info = dcurve::find_experiment(experiment);
  if (!info) {
    std::cerr << "unknown experiment '" << experiment << "' (try 'dcurve list')\n";
    return 2;
  }

  dcurve::ExperimentConfig config;
  try {
    dcurve::KeyValues keys;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      keys = dcurve::config::parse(in);
    }
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw dcurve::ConfigError("--set expects key=value, got '" + kv + "'");
      keys.set(dcurve::config::trim(kv.substr(0, eq)), dcurve::config::trim(kv.substr(eq + 1)));
    }
    const std::pair<const char*, const std::string*> flags[] = {
        {"seed", &seed}, {"n", &n}, {"t", &t}, {"out", &out}, {"confidence", &confidence}};
    for (const auto& [key, value] : flags)
      if (app.count(std::string("--") + key)) keys.set(key, *value);
    config = dcurve::resolve_config(experiment, keys, info->default_t_grid);
  } catch (const dcurve::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  std::ostringstream csv;
  std::vector<dcurve::Check> checks;
  try {
    checks = info->run(config, csv);
  } catch (const dcurve::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }

  std::ofstream file(config.out, std::ios::binary);
  if (!file) {
    std::cerr << "cannot write " << config.out << '\n';
    return 2;
  }
  file << csv.str();

  bool all = true;
  std::cout << experiment << ": " << info->claim << '\n';
  for (const auto& c : checks) {
    all = all && c.pass;
    std::cout << (c.pass ? "  PASS  " : "  FAIL  ") << c.name;
    if (!c.detail.empty()) std::cout << "  [" << c.detail << ']';
    std::cout << '\n';
  }
  std::cout << (all ? "all checks passed" : "some checks failed") << " (" << checks.size() << " checks, csv: "
            << config.out << ")\n";
  return all ? 0 : 1;
}
