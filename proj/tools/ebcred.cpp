#include <exception>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ebcred/errors.hpp"
#include "ebcred/experiments.hpp"
#include "ebcred/io.hpp"

namespace {

std::vector<double> parse_n_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ebcred::ConfigError("--n: cannot parse '" + item + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Empirical Bayes credible sets for the ill-posed Gaussian sequence model"};
  std::string mode_name, config;
  std::optional<ebcred::Seed> seed;
  std::optional<int> reps;
  std::optional<std::string> out, n_list, truth;
  std::optional<double> L;
  std::optional<unsigned> threads;
  app.add_option("mode", mode_name, "coverage | figures | diagnose | prior-check | minimax")->required();
  app.add_option("--config", config, "experiment config (JSON)")->required();
  app.add_option("--seed", seed, "master seed");
  app.add_option("--reps", reps, "replications");
  app.add_option("--out", out, "output directory");
  app.add_option("--n", n_list, "comma-separated sample sizes");
  app.add_option("--truth", truth, "truth name");
  app.add_option("--L", L, "radius inflation factor");
  app.add_option("--threads", threads, "worker threads (0: hardware)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    ebcred::ExperimentSpec spec = ebcred::load_spec(config);
    spec.mode = ebcred::parse_mode(mode_name);
    if (seed) spec.seed = *seed;
    if (reps) spec.reps = *reps;
    if (out) spec.out = *out;
    if (n_list) spec.n_list = parse_n_list(*n_list);
    if (truth) spec.truth.name = *truth;
    if (L) spec.L = *L;
    if (threads) spec.threads = *threads;
    ebcred::run_experiment(spec);
    return 0;
  } catch (const ebcred::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ebcred::PreconditionError& e) {
    std::cerr << "precondition error: " << e.what() << '\n';
    return 2;
  } catch (const ebcred::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
