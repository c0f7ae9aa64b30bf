#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "hardylab/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"hardy-lab: fractal-boundary Hardy inequality experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  int jobs = 0;
  std::optional<uint64_t> seed;

  const char* tasks[] = {"whitney",    "dimension",   "porosity",
                         "chains",     "hardy-sweep", "extension",
                         "multiplier", "homogeneity"};
  for (const char* t : tasks) {
    CLI::App* sub = app.add_subcommand(t);
    sub->add_option("--config", config_path, "experiment config (JSON)")
        ->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--jobs", jobs, "parallelism degree (0 = cores)");
    sub->add_option(
        "--seed",
        [&seed](const std::vector<std::string>& v) {
          seed = std::stoull(v[0]);
          return true;
        },
        "seed override");
  }

  CLI11_PARSE(app, argc, argv);

  std::string task = app.get_subcommands()[0]->get_name();
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "error: cannot read config " << config_path << "\n";
    return 1;
  }
  std::stringstream ss;
  ss << in.rdbuf();

  std::string diag;
  int code = hardylab::run_experiment(ss.str(), out_dir, jobs, seed, &diag, task);
  if (code != 0) std::cerr << "error: " << diag << "\n";
  return code;
}
