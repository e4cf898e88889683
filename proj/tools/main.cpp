// SPDX-License-Identifier: Apache-2.0
// Command-line front end: closed-form law evaluation, Monte Carlo sampling,
// validation campaigns, Feynman-Kac cross-checks and table sweeps. Every
// output file is paired with a <output>.manifest.json sidecar whose argv
// block replays the run byte-identically (given the same build).
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "meander/fkpde.hpp"
#include "meander/laws.hpp"
#include "meander/quad.hpp"
#include "meander/sim.hpp"
#include "meander/stats.hpp"
#include "meander/version.hpp"

using nlohmann::json;
using namespace meander;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitValidationFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&tt, &tm_utc);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

struct Options {
  std::string law;
  std::string sampler;  // validate only; defaults to law
  std::string family;   // sweep only
  double mu = 0.0;
  double t = 1.0;
  double l = 0.0;
  double u = 0.0;
  double x = 0.0;
  double beta = 1.0;
  std::int64_t paths = 100000;
  int steps = 4096;
  int grid = 200;
  double alpha = 0.01;
  std::uint64_t seed = 0;
  int streams = 8;
  std::string out;
  std::string format = "csv";
  std::vector<double> ratios{0.0, 0.25, 0.5};
  std::vector<double> ts{10.0, 100.0, 1000.0};
};

json params_json(const Options& o) {
  return json{{"law", o.law},     {"mu", o.mu},       {"t", o.t},
              {"l", o.l},         {"u", o.u},         {"x", o.x},
              {"beta", o.beta},   {"paths", o.paths}, {"steps", o.steps},
              {"grid", o.grid},   {"alpha", o.alpha}, {"seed", o.seed},
              {"streams", o.streams}};
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
  if (!out) throw std::runtime_error("failed writing output file: " + path);
}

void write_manifest(const std::string& command,
                    const std::vector<std::string>& argv, const Options& o,
                    const std::vector<std::string>& outputs,
                    const json& extra = json::object()) {
  json manifest{{"command", command},
                {"argv", argv},
                {"parameters", params_json(o)},
                {"seed", o.seed},
                {"timestamp", utc_timestamp()},
                {"version", meander::kVersion},
                {"outputs", outputs}};
  for (auto it = extra.begin(); it != extra.end(); ++it) {
    manifest[it.key()] = it.value();
  }
  write_file(outputs.front() + ".manifest.json", manifest.dump(2) + "\n");
}

// Law objects for the evaluation/validation surface (everything except the
// elastic transition kernel, which is not a probability law on a window).
laws::MixedSojournLaw build_law(const Options& o) {
  if (o.law == "bridge") {
    return o.u > 0.0 ? laws::bridge_sojourn_law_from_u(o.u, o.t)
                     : laws::bridge_sojourn_law(o.t);
  }
  if (o.law == "bridge-u") return laws::bridge_sojourn_law_from_u(o.u, o.t);
  if (o.law == "free") return laws::free_sojourn_law(o.mu, o.x, o.t);
  if (o.law == "meander-u") {
    return laws::meander_sojourn_law_finite_u(o.u, o.mu, o.l, o.t);
  }
  if (o.law == "meander-limit") {
    if (o.mu != 0.0) {
      throw std::invalid_argument("the meander-limit law is built for mu = 0");
    }
    return laws::meander_limit_law(o.l, o.t);
  }
  if (o.law == "excursion") return laws::excursion_sojourn_law(o.l, o.t);
  throw std::invalid_argument("unknown law: " + o.law);
}

double law_mean(const laws::MixedSojournLaw& law) {
  double mean =
      quad::integrate_sqrt_singular(
          [&law](double s) { return s * law.density(s); }, law.support_lo(),
          law.support_hi(), 1e-8, 1e-12)
          .value;
  for (const auto& a : law.atoms()) mean += a.location * a.mass;
  return mean;
}

int run_eval(const Options& o, const std::vector<std::string>& argv) {
  std::ostringstream csv;
  csv << "s,density,cdf\n";
  json atoms = json::array();
  json rows = json::array();

  if (o.law == "elastic") {
    // Transition kernel from start level u after time t, tabulated in the
    // arrival coordinate; the cdf column carries the (sub-probability)
    // cumulative mass.
    const double x_hi = o.u + std::max(0.0, o.mu) * o.t + 8.0 * std::sqrt(o.t);
    double cum = 0.0, prev = 0.0;
    for (int i = 0; i < o.grid; ++i) {
      const double x = x_hi * i / (o.grid - 1);
      cum += quad::integrate_finite(
                 [&o](double v) {
                   return laws::elastic_transition_density(o.mu, o.u, v, o.t);
                 },
                 prev, x, 1e-10, 1e-13)
                 .value;
      prev = x;
      const double dens = laws::elastic_transition_density(o.mu, o.u, x, o.t);
      csv << fmt17(x) << ',' << fmt17(dens) << ',' << fmt17(cum) << '\n';
      rows.push_back({x, dens, cum});
    }
  } else {
    const auto law = build_law(o);
    const double lo = law.support_lo(), hi = law.support_hi();
    for (int i = 0; i < o.grid; ++i) {
      const double s = lo + (hi - lo) * i / (o.grid - 1);
      const double dens = law.density(s);
      const double cdf = law.cdf_continuous(s);
      csv << fmt17(s) << ',' << fmt17(dens) << ',' << fmt17(cdf) << '\n';
      rows.push_back({s, dens, cdf});
    }
    for (const auto& a : law.atoms()) {
      atoms.push_back({{"location", a.location}, {"mass", a.mass}});
    }
  }

  if (o.format == "json") {
    json doc{{"columns", {"s", "density", "cdf"}}, {"rows", rows}};
    write_file(o.out, doc.dump(2) + "\n");
  } else {
    write_file(o.out, csv.str());
  }
  write_manifest("eval", argv, o, {o.out}, json{{"atoms", atoms}});
  return kExitPass;
}

sim::LawId sampler_id(const std::string& name) {
  if (name == "excursion-rejection") return sim::LawId::excursion_rejection;
  return sim::law_id_from_string(name);
}

laws::ProcessParams process_params(const Options& o) {
  laws::ProcessParams p;
  p.mu = o.mu;
  p.t = o.t;
  p.l = o.l;
  p.u = o.u;
  p.x = o.x;
  return p;
}

int run_sample(const Options& o, const std::vector<std::string>& argv) {
  const auto id = sampler_id(o.law);
  sim::SimConfig cfg{o.paths, o.steps, o.seed, o.streams};
  const auto emp = sim::run_campaign(id, process_params(o), cfg);

  std::ostringstream csv;
  csv << "gamma,atom_event\n";
  json rows = json::array();
  for (double g : emp.continuous_samples) {
    csv << fmt17(g) << ",0\n";
    rows.push_back({g, 0});
  }
  const double window = o.t - (id == sim::LawId::free_motion ? 0.0 : o.l);
  for (std::int64_t i = 0; i < emp.atom_count; ++i) {
    csv << fmt17(window) << ",1\n";
    rows.push_back({window, 1});
  }
  if (o.format == "json") {
    json doc{{"columns", {"gamma", "atom_event"}}, {"rows", rows}};
    write_file(o.out, doc.dump(2) + "\n");
  } else {
    write_file(o.out, csv.str());
  }
  write_manifest("sample", argv, o, {o.out});
  return kExitPass;
}

int run_validate(const Options& o, const std::vector<std::string>& argv) {
  const std::string sampler_name = o.sampler.empty() ? o.law : o.sampler;
  const auto id = sampler_id(sampler_name);
  sim::SimConfig cfg{o.paths, o.steps, o.seed, o.streams};
  const auto emp = sim::run_campaign(id, process_params(o), cfg);
  const auto law = build_law(o);
  const auto report = stats::ks_test_continuous(emp, law, o.alpha);

  double sum = 0.0;
  for (double g : emp.continuous_samples) sum += g;
  sum += law.support_hi() * static_cast<double>(emp.atom_count);
  const double sample_mean = sum / static_cast<double>(emp.n_total);

  json doc{{"law", o.law},
           {"sampler", sampler_name},
           {"parameters", params_json(o)},
           {"n_continuous", emp.continuous_samples.size()},
           {"ks_stat", report.ks_stat},
           {"ks_critical", report.ks_critical},
           {"atom_freq", report.atom_freq},
           {"atom_ci", {report.atom_ci.first, report.atom_ci.second}},
           {"law_atom_mass", law.atom_mass_total()},
           {"sample_mean", sample_mean},
           {"law_mean", law_mean(law)},
           {"pass", report.pass}};
  const std::string text = doc.dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << text;
  } else {
    write_file(o.out, text);
    write_manifest("validate", argv, o, {o.out});
  }
  return report.pass ? kExitPass : kExitValidationFail;
}

int run_fk_check(const Options& o, const std::vector<std::string>& argv) {
  fkpde::FkGrid grid;
  grid.x_min = -10.0 * std::sqrt(o.t);
  grid.x_max = 10.0 * std::sqrt(o.t);
  grid.nx = 2001;
  grid.dt = o.t / 2000.0;
  grid.mu = o.mu;
  grid.beta = o.beta;
  const auto sol = fkpde::solve_fk(grid, o.t);
  const double solver_value = sol.value_at(o.x);
  const auto law = laws::free_sojourn_law(o.mu, o.x, o.t);
  const double laplace_value = fkpde::laplace_of_law(law, o.beta);
  const double discrepancy = std::fabs(solver_value - laplace_value);
  const bool pass = discrepancy <= 1e-3;

  json doc{{"mu", o.mu},
           {"beta", o.beta},
           {"x", o.x},
           {"t", o.t},
           {"solver_value", solver_value},
           {"laplace_value", laplace_value},
           {"discrepancy", discrepancy},
           {"pass", pass}};
  const std::string text = doc.dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << text;
  } else {
    write_file(o.out, text);
    write_manifest("fk-check", argv, o, {o.out});
  }
  return pass ? kExitPass : kExitValidationFail;
}

int run_sweep(const Options& o, const std::vector<std::string>& argv) {
  std::ostringstream csv;
  csv << "ratio,s,value\n";

  if (o.family == "uniformity") {
    // Deviation of the rescaled occupation time from uniformity for a fixed
    // window length and growing horizons.
    for (double t : o.ts) {
      if (!(o.l < t)) {
        throw std::invalid_argument("uniformity sweep needs l < t for every horizon");
      }
      double sup = 0.0;
      for (int i = 0; i < o.grid; ++i) {
        const double z = static_cast<double>(i) / (o.grid - 1);
        const double cdf = z * t >= t - o.l
                               ? 1.0
                               : laws::excursion_sojourn_cdf(o.l, t, z * t);
        const double dev = std::fabs(cdf - z);
        sup = std::max(sup, dev);
        csv << fmt17(o.l / t) << ',' << fmt17(z) << ',' << fmt17(dev) << '\n';
      }
      std::cout << "t=" << t << " sup|P(G/t<=z)-z|=" << sup << "\n";
    }
  } else if (o.family == "excursion-density" || o.family == "excursion-cdf" ||
             o.family == "meander-cdf") {
    for (double ratio : o.ratios) {
      if (!(ratio >= 0.0 && ratio < 1.0)) {
        throw std::invalid_argument("sweep ratios must satisfy 0 <= l/t < 1");
      }
      const double lw = ratio * o.t;
      const double tau = o.t - lw;
      const auto law = o.family == "excursion-cdf" || o.family == "excursion-density"
                           ? laws::excursion_sojourn_law(lw, o.t)
                           : laws::meander_limit_law(lw, o.t);
      for (int i = 0; i < o.grid; ++i) {
        const double s = tau * i / (o.grid - 1);
        double value = 0.0;
        if (o.family == "excursion-density") {
          value = law.density(s);
        } else if (o.family == "excursion-cdf") {
          value = laws::excursion_sojourn_cdf(lw, o.t, s);
        } else {
          value = laws::meander_limit_cdf(lw, o.t, s);
        }
        csv << fmt17(ratio) << ',' << fmt17(s) << ',' << fmt17(value) << '\n';
      }
    }
  } else {
    throw std::invalid_argument("unknown sweep family: " + o.family);
  }

  write_file(o.out, csv.str());
  write_manifest("sweep", argv, o, {o.out});
  return kExitPass;
}

int dispatch(const std::vector<std::string>& args);

int run_replay(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) {
    std::cerr << "replay: cannot open manifest " << manifest_path << "\n";
    return kExitUsage;
  }
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    std::cerr << "replay: malformed manifest: " << e.what() << "\n";
    return kExitUsage;
  }
  if (!manifest.contains("argv") || !manifest["argv"].is_array()) {
    std::cerr << "replay: manifest carries no argv block\n";
    return kExitUsage;
  }
  std::vector<std::string> args;
  for (const auto& a : manifest["argv"]) args.push_back(a.get<std::string>());
  return dispatch(args);
}

void add_common_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--mu", o.mu, "drift");
  cmd->add_option("--t", o.t, "horizon");
  cmd->add_option("--l", o.l, "conditioned window length");
  cmd->add_option("--u", o.u, "start level");
  cmd->add_option("--x", o.x, "start/evaluation level");
  cmd->add_option("--beta", o.beta, "Laplace rate");
  cmd->add_option("--paths", o.paths, "number of Monte Carlo paths");
  cmd->add_option("--steps", o.steps, "time steps per path");
  cmd->add_option("--grid", o.grid, "output grid points");
  cmd->add_option("--alpha", o.alpha, "test level");
  cmd->add_option("--seed", o.seed, "master RNG seed");
  cmd->add_option("--streams", o.streams, "logical worker streams");
  cmd->add_option("--out", o.out, "output file");
  cmd->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
}

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"Sojourn-time laws of conditioned Brownian paths: evaluation, "
               "simulation and cross-validation"};
  app.require_subcommand(1);

  Options o;
  std::string manifest_path;

  auto* eval = app.add_subcommand("eval", "tabulate density and cdf of a law");
  eval->add_option("--law", o.law, "law id")
      ->required()
      ->check(CLI::IsMember({"bridge", "bridge-u", "free", "meander-u",
                             "meander-limit", "excursion", "elastic"}));
  add_common_flags(eval, o);
  eval->get_option("--out")->required();

  auto* sample =
      app.add_subcommand("sample", "dump Monte Carlo occupation draws");
  sample->add_option("--law", o.law, "sampler id")
      ->required()
      ->check(CLI::IsMember({"bridge", "free", "meander-u", "meander-limit",
                             "excursion", "excursion-rejection"}));
  add_common_flags(sample, o);
  sample->get_option("--out")->required();

  auto* validate =
      app.add_subcommand("validate", "campaign + goodness-of-fit report");
  validate->add_option("--law", o.law, "law id to test against")
      ->required()
      ->check(CLI::IsMember({"bridge", "bridge-u", "free", "meander-u",
                             "meander-limit", "excursion"}));
  validate
      ->add_option("--sampler", o.sampler, "sampler id (defaults to --law)")
      ->check(CLI::IsMember({"bridge", "free", "meander-u", "meander-limit",
                             "excursion", "excursion-rejection"}));
  add_common_flags(validate, o);

  auto* fk = app.add_subcommand("fk-check",
                                "PDE solver vs Laplace transform of the law");
  add_common_flags(fk, o);

  auto* sweep = app.add_subcommand("sweep", "long-format table families");
  sweep->add_option("--family", o.family, "sweep family")
      ->required()
      ->check(CLI::IsMember({"excursion-density", "excursion-cdf",
                             "meander-cdf", "uniformity"}));
  sweep->add_option("--ratios", o.ratios, "l/t ratios")->delimiter(',');
  sweep->add_option("--ts", o.ts, "horizons for the uniformity family")
      ->delimiter(',');
  add_common_flags(sweep, o);
  sweep->get_option("--out")->required();

  auto* replay = app.add_subcommand(
      "replay", "re-run the command recorded in a manifest");
  replay->add_option("manifest", manifest_path, "manifest json path")
      ->required();

  std::vector<char*> argv;
  std::string prog = "meander-sojourn";
  argv.push_back(prog.data());
  std::vector<std::string> owned(args);
  for (auto& a : owned) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (eval->parsed()) return run_eval(o, args);
    if (sample->parsed()) return run_sample(o, args);
    if (validate->parsed()) return run_validate(o, args);
    if (fk->parsed()) return run_fk_check(o, args);
    if (sweep->parsed()) return run_sweep(o, args);
    if (replay->parsed()) return run_replay(manifest_path);
  } catch (const std::domain_error& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(args);
}
