// nose: change-point detection from the command line.
//   nose detect    --input data.csv --output result.json [--scenario gauss-mean] [sampler flags]
//   nose simulate  --setting S1 --seed 7 --output s1.csv   (also writes s1.csv.truth.json)
//   nose benchmark --setting S1 --replicates 30 --output report.json
//   nose plot      --input result.json [--data data.csv] --output plot.svg
// Exit codes: 0 ok, 1 usage/other error, 2 malformed or missing input, 3 MCMC abort.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "nose/detect.hpp"
#include "nose/evalsim.hpp"
#include "nose/io.hpp"
#include "nose/sampler.hpp"

namespace {

const nose::Hyperparameters kDefaults;

struct Options {
  std::string input, output, data, scenario = "gauss-mean", slab = "cauchy", setting = "S1";
  int L = kDefaults.truncation, D = kDefaults.min_distance, chains = kDefaults.mcmc.chains,
      iters = kDefaults.mcmc.iterations, burnin = kDefaults.mcmc.burn_in, thin = kDefaults.mcmc.thin, replicates = 30;
  double a = kDefaults.shape, b = kDefaults.scale, lambda = 0.0;
  long window = 10;
  std::uint64_t seed = kDefaults.mcmc.seed;
};

void add_sampler_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--L", o.L, "truncation level");
  cmd->add_option("--D", o.D, "minimum distance between change-points");
  cmd->add_option("--a", o.a, "Gamma shape of alpha");
  cmd->add_option("--b", o.b, "Gamma scale of alpha");
  cmd->add_option("--slab", o.slab, "slab density")->check(CLI::IsMember({"laplace", "cauchy"}));
  cmd->add_option("--lambda", o.lambda, "Laplace precision (0 = adaptive, delta = 1)");
  cmd->add_option("--chains", o.chains);
  cmd->add_option("--iters", o.iters, "iterations per chain, including burn-in");
  cmd->add_option("--burnin", o.burnin);
  cmd->add_option("--thin", o.thin);
  cmd->add_option("--seed", o.seed);
}

nose::Hyperparameters hyper_from(const Options& o, const Eigen::VectorXd* y) {
  nose::Hyperparameters h;
  h.truncation = o.L;
  h.min_distance = o.D;
  h.shape = o.a;
  h.scale = o.b;
  if (o.slab == "laplace") {
    double rate = o.lambda;
    if (rate <= 0.0) {
      if (y == nullptr) throw nose::DomainError("--lambda is required for the Laplace slab here");
      rate = nose::adaptive_lambda(*y, 1.0);
    }
    h.slab = nose::Slab::laplace(rate);
  }
  h.mcmc.chains = o.chains;
  h.mcmc.iterations = o.iters;
  h.mcmc.burn_in = o.burnin;
  h.mcmc.thin = o.thin;
  h.mcmc.seed = o.seed;
  h.validate();
  return h;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

int cmd_detect(const Options& o) {
  const nose::ScenarioSpec spec{nose::parse_scenario(o.scenario), {}};
  const nose::TimeSeries data = nose::read_csv(o.input, spec.kind);
  const nose::Hyperparameters h = hyper_from(o, &data.y);
  const nose::PosteriorDraws draws = nose::run_chains(data, spec, h);
  const nose::DetectionResult r = nose::detect(draws, data, spec, h);
  write_text(o.output, nose::dump(nose::to_json(r, draws)));
  return 0;
}

int cmd_simulate(const Options& o) {
  const nose::Setting s = nose::parse_setting(o.setting);
  const nose::SimulatedData sim = nose::generate(s, o.seed);
  std::ostringstream csv;
  nose::write_csv(csv, sim.data);
  write_text(o.output, csv.str());
  if (!o.output.empty() && o.output != "-") write_text(o.output + ".truth.json", nose::dump(nose::to_json(sim.truth)));
  return 0;
}

int cmd_benchmark(const Options& o) {
  const nose::Setting s = nose::parse_setting(o.setting);
  const nose::Hyperparameters h = hyper_from(o, nullptr);
  const nose::BenchmarkReport rep = nose::run_benchmark(s, o.replicates, h, o.window);
  write_text(o.output, nose::dump(nose::to_json(rep)));
  return 0;
}

int cmd_plot(const Options& o) {
  const nose::PlotInput p = nose::plot_input_from_json(nose::read_json(o.input));
  std::optional<nose::TimeSeries> data;
  if (!o.data.empty()) data = nose::read_csv(o.data, nose::parse_scenario(o.scenario));
  write_text(o.output, nose::render_svg(p, data));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian multiple change-point detection"};
  app.require_subcommand(1);
  Options o;

  auto* det = app.add_subcommand("detect", "detect change-points in a CSV series");
  det->add_option("--input", o.input, "CSV with header t,y or t,y,x")->required();
  det->add_option("--output", o.output, "result JSON (default stdout)");
  det->add_option("--scenario", o.scenario, "gauss-mean, poisson, gauss-scale, ar1, linreg");
  add_sampler_flags(det, o);

  auto* sim = app.add_subcommand("simulate", "generate a benchmark dataset");
  sim->add_option("--setting", o.setting, "S1..S6, MS1..MS3, DRAIP");
  sim->add_option("--seed", o.seed);
  sim->add_option("--output", o.output, "CSV path; ground truth goes to <output>.truth.json");

  auto* bench = app.add_subcommand("benchmark", "run seeded replicates of a setting");
  bench->add_option("--setting", o.setting);
  bench->add_option("--replicates", o.replicates);
  bench->add_option("--window", o.window, "matching window for precision/recall");
  bench->add_option("--output", o.output);
  add_sampler_flags(bench, o);

  auto* plot = app.add_subcommand("plot", "render a detection result as SVG");
  plot->add_option("--input", o.input, "detection JSON")->required();
  plot->add_option("--data", o.data, "optional data CSV");
  plot->add_option("--scenario", o.scenario);
  plot->add_option("--output", o.output, "SVG path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*det) return cmd_detect(o);
    if (*sim) return cmd_simulate(o);
    if (*bench) return cmd_benchmark(o);
    if (*plot) return cmd_plot(o);
  } catch (const nose::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const nose::McmcError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const nose::DomainError& e) {
    // Unknown setting or scenario names are input errors.
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
