// Experiment driver: qapprox <command> [--config PATH] [--seed INT] [--out DIR] [--trials INT]

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qapprox/errors.hpp"
#include "qapprox/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Seeded experiments for quantum approximation of embeddings"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::string out_dir = ".";
  std::vector<std::string> overrides;

  const std::map<std::string, std::string> blurbs{
      {"threshold-sweep", "threshold search over an (N, n, p, q) grid"},
      {"bounds-table", "upper and lower rate bounds with the comparison table"},
      {"boost-demo", "failure rate of repeated runs against the Hoeffding bound"},
      {"compose-check", "query count and error chain of composed algorithms"},
      {"lowerbound-cert", "Condition (I) and separation certificates for spike families"},
  };
  for (const auto& name : qapprox::experiment_commands()) {
    auto* sub = app.add_subcommand(name, blurbs.count(name) ? blurbs.at(name) : "");
    sub->add_option("--config", config_path, "flat key = value config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "seed, overrides the config");
    sub->add_option("--trials", trials, "trial count, overrides the config");
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--set", overrides, "extra key=value overrides");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    qapprox::ExperimentConfig config;
    if (!config_path.empty()) config = qapprox::ExperimentConfig::load(config_path);
    if (config.has("command") && config.get("command") != command) {
      throw qapprox::ConfigError("config is for '" + config.get("command") + "', not '" +
                                 command + "'");
    }
    config.set("command", command);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw qapprox::ConfigError("--set expects key=value");
      config.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed) config.set("seed", std::to_string(*seed));
    if (trials) config.set("trials", std::to_string(*trials));

    const auto output = qapprox::run_experiment(config);
    qapprox::write_output(output, out_dir);
    for (const auto& [name, content] : output.files) std::cout << out_dir << "/" << name << '\n';
  } catch (const qapprox::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const qapprox::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
