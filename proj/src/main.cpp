#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "unimix/base_measure.hpp"
#include "unimix/experiments.hpp"
#include "unimix/io.hpp"
#include "unimix/partition_posterior.hpp"
#include "unimix/paths.hpp"
#include "unimix/posterior.hpp"
#include "unimix/samplers.hpp"
#include "unimix/species.hpp"

namespace {

using nlohmann::json;
using namespace unimix;

double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

struct ModelOpts {
  double pd_a = 0.0;
  double pd_b = 1.0;
  double pareto_alpha = 1e-6;
  double pareto_delta = 1e-6;
};

void add_model_opts(CLI::App* cmd, ModelOpts& m) {
  cmd->add_option("--pd-a", m.pd_a, "Poisson-Dirichlet discount, 0 <= a < 1")
      ->capture_default_str();
  cmd->add_option("--pd-b", m.pd_b, "Poisson-Dirichlet strength, b > -a")
      ->capture_default_str();
  cmd->add_option("--pareto-alpha", m.pareto_alpha,
                  "Pareto shape of the base measure")
      ->capture_default_str();
  cmd->add_option("--pareto-delta", m.pareto_delta,
                  "Pareto gap radius of the base measure")
      ->capture_default_str();
}

json model_json(const ModelOpts& m) {
  return {{"pd_a", m.pd_a},
          {"pd_b", m.pd_b},
          {"pareto_alpha", m.pareto_alpha},
          {"pareto_delta", m.pareto_delta}};
}

struct SamplerOpts {
  int draws = 1000;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string trial = "exact";
  std::string rho;
  double prior_width = 1.0;
  std::optional<double> mode_known;
};

void add_sampler_opts(CLI::App* cmd, SamplerOpts& s) {
  cmd->add_option("--draws", s.draws, "Monte Carlo size M")->capture_default_str();
  cmd->add_option("--seed", s.seed, "64-bit master seed")->capture_default_str();
  cmd->add_option("--threads", s.threads, "Worker threads; 0 = hardware count")
      ->capture_default_str();
  cmd->add_option("--trial", s.trial, "Coordinate trial form: exact|approximate")
      ->capture_default_str();
  cmd->add_option("--rho", s.rho,
                  "Mode proposal: normal:MEAN,SD | uniform:LO,HI; default is "
                  "normal at the sample median with sd 0.25");
  cmd->add_option("--prior-width", s.prior_width,
                  "Mode prior half-width in sample standard deviations beyond "
                  "the data range")
      ->capture_default_str();
  cmd->add_option("--mode-known", s.mode_known,
                  "Fix the mode at this value instead of sampling it");
}

TrialForm parse_trial(const std::string& text) {
  if (text == "exact") return TrialForm::exact;
  if (text == "approximate") return TrialForm::approximate;
  throw std::runtime_error("--trial must be exact or approximate");
}

RhoSpec parse_rho(const std::string& text, const std::vector<double>& obs) {
  if (text.empty() || text == "default") return default_rho(obs);
  const std::size_t colon = text.find(':');
  const std::size_t comma =
      colon == std::string::npos ? std::string::npos : text.find(',', colon);
  if (comma == std::string::npos)
    throw std::runtime_error(
        "--rho must be normal:MEAN,SD or uniform:LO,HI, got \"" + text + "\"");
  const std::string kind = text.substr(0, colon);
  const double x = parse_double(text.substr(colon + 1, comma - colon - 1));
  const double y = parse_double(text.substr(comma + 1));
  if (kind == "normal") return RhoSpec::normal(x, y);
  if (kind == "uniform") return RhoSpec::uniform(x, y);
  throw std::runtime_error("--rho kind must be normal or uniform, got \"" +
                           kind + "\"");
}

json rho_json(const RhoSpec& rho) {
  return {{"kind", rho.kind == RhoSpec::Kind::normal ? "normal" : "uniform"},
          {"p1", rho.p1},
          {"p2", rho.p2}};
}

std::string with_commas(const BigInt& value) {
  const std::string digits = value.str();
  std::string out;
  const std::size_t lead = digits.size() % 3 == 0 ? 3 : digits.size() % 3;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i >= lead && (i - lead) % 3 == 0) out += ',';
    out += digits[i];
  }
  return out;
}

int count_dead(const std::vector<SisDraw>& draws) {
  return static_cast<int>(
      std::count_if(draws.begin(), draws.end(),
                    [](const SisDraw& d) { return d.log_w == neg_inf; }));
}

struct SimulateOpts {
  std::string density = "lambda1";
  int n = 500;
  std::uint64_t seed = 1;
  std::optional<std::string> out_dir;
  std::string output;
};

int cmd_simulate(const SimulateOpts& o) {
  const TestDensity density = TestDensity::by_name(o.density);
  Rng rng(o.seed);
  const std::vector<double> obs = density.sample(o.n, rng);
  const std::string name =
      o.output.empty() ? "sample_" + o.density + "_n" + std::to_string(o.n) +
                             "_s" + std::to_string(o.seed) + ".csv"
                       : o.output;
  const std::filesystem::path file = resolve_results_dir(o.out_dir) / name;
  std::string content = "# " + o.density + " n=" + std::to_string(o.n) +
                        " seed=" + std::to_string(o.seed) + "\n";
  for (const double x : obs) content += format_double(x) + "\n";
  write_text_file(file, content);
  std::cout << json{{"output", file.string()},
                    {"density", o.density},
                    {"n", o.n},
                    {"seed", o.seed}}
                   .dump(2)
            << "\n";
  return 0;
}

struct EstimateOpts {
  std::string data;
  ModelOpts model;
  SamplerOpts sampler;
  std::string grid = "-10:10:0.01";
  std::optional<std::string> out_dir;
  std::string output;
};

int cmd_estimate(const EstimateOpts& o, bool with_density) {
  const std::vector<double> obs = read_observations(o.data);
  const PitmanYor model(o.model.pd_a, o.model.pd_b);
  const ParetoMixture base(o.model.pareto_alpha, o.model.pareto_delta);
  const ModePrior prior = default_mode_prior(obs, o.sampler.prior_width);
  const RhoSpec rho = parse_rho(o.sampler.rho, obs);
  SisConfig cfg;
  cfg.draws = o.sampler.draws;
  cfg.seed = o.sampler.seed;
  cfg.threads = o.sampler.threads;
  cfg.trial = parse_trial(o.sampler.trial);
  cfg.mode_known = o.sampler.mode_known;
  const std::vector<double> grid_points =
      with_density ? GridSpec::parse(o.grid).points() : std::vector<double>{};
  const auto start = std::chrono::steady_clock::now();
  const std::vector<SisDraw> draws = run_sis(model, base, obs, prior, rho, cfg);
  const SisEstimates est = sis_estimates(model, base, obs, draws, grid_points);
  const double runtime = ms_since(start);
  json summary = {
      {"theta_hat", est.theta_hat},
      {"theta_stderr", est.theta_stderr},
      {"ess", est.ess},
      {"draws", cfg.draws},
      {"dead_draws", count_dead(draws)},
      {"seed", cfg.seed},
      {"runtime_ms", runtime},
      {"n", obs.size()},
      {"config",
       {{"data", o.data},
        {"model", model_json(o.model)},
        {"rho", rho_json(rho)},
        {"prior", {{"lo", prior.lo}, {"hi", prior.hi}}},
        {"trial", o.sampler.trial},
        {"threads", o.sampler.threads},
        {"mode_known",
         o.sampler.mode_known ? json(*o.sampler.mode_known) : json(nullptr)},
        {"grid", with_density ? json(o.grid) : json(nullptr)}}}};
  if (with_density) {
    const std::string name =
        o.output.empty() ? "density_estimate.csv" : o.output;
    const std::filesystem::path file = resolve_results_dir(o.out_dir) / name;
    write_density_csv(file, est.density);
    summary["output"] = file.string();
    json sidecar = summary;
    write_text_file(file.parent_path() /
                        (file.stem().string() + "_summary.json"),
                    sidecar.dump(2) + "\n");
  } else if (!o.output.empty()) {
    const std::filesystem::path file = resolve_results_dir(o.out_dir) / o.output;
    write_text_file(file, summary.dump(2) + "\n");
    summary["output"] = file.string();
  }
  std::cout << summary.dump(2) << "\n";
  return 0;
}

struct ExactOpts {
  std::string data;
  ModelOpts model;
  std::string grid = "-10:10:0.01";
  std::optional<double> theta;
  int theta_count = 201;
  double prior_width = 1.0;
  int path_cap = 14;
  bool mode_posterior = false;
  std::optional<std::string> out_dir;
  std::string output;
};

int cmd_exact(const ExactOpts& o) {
  const std::vector<double> obs = read_observations(o.data);
  const PitmanYor model(o.model.pd_a, o.model.pd_b);
  const ParetoMixture base(o.model.pareto_alpha, o.model.pareto_delta);
  const std::vector<double> grid_points = GridSpec::parse(o.grid).points();
  const auto start = std::chrono::steady_clock::now();
  json summary = {{"n", obs.size()},
                  {"points", grid_points.size()},
                  {"config",
                   {{"data", o.data},
                    {"model", model_json(o.model)},
                    {"grid", o.grid},
                    {"path_cap", o.path_cap}}}};
  DensityGrid density;
  const std::filesystem::path dir = resolve_results_dir(o.out_dir);
  const std::string name = o.output.empty() ? "exact_density.csv" : o.output;
  const std::filesystem::path file = dir / name;
  if (o.theta) {
    const CenteredData data = center(obs, *o.theta);
    density = exact_density_given_theta(model, base, data, grid_points, o.path_cap);
    summary["theta"] = *o.theta;
  } else {
    const ModePrior prior = default_mode_prior(obs, o.prior_width);
    const std::vector<double> theta_grid =
        make_theta_grid(prior, obs, o.theta_count);
    density = exact_density_unknown_theta(model, base, obs, prior, theta_grid,
                                          grid_points, o.path_cap);
    summary["prior"] = {{"lo", prior.lo}, {"hi", prior.hi}};
    summary["theta_nodes"] = theta_grid.size();
    if (o.mode_posterior) {
      const ModePosterior mode =
          exact_mode_posterior(model, base, obs, prior, theta_grid, o.path_cap);
      std::string csv = "theta,density\n";
      for (std::size_t i = 0; i < mode.theta.size(); ++i)
        csv += format_double(mode.theta[i]) + "," +
               format_double(mode.density[i]) + "\n";
      const std::filesystem::path mode_file =
          dir / (file.stem().string() + "_mode.csv");
      write_text_file(mode_file, csv);
      summary["theta_posterior_mean"] = mode.mean;
      summary["mode_output"] = mode_file.string();
    }
  }
  write_density_csv(file, density);
  summary["output"] = file.string();
  summary["runtime_ms"] = ms_since(start);
  std::cout << summary.dump(2) << "\n";
  return 0;
}

struct OracleOpts {
  std::string data;
  ModelOpts model;
  std::string grid = "-10:10:0.01";
  double theta = 0.0;
  int path_cap = 14;
  int partition_cap = 12;
  double tol = 1e-10;
  double uniformity_tol = 1e-12;
};

int cmd_oracle_compare(const OracleOpts& o) {
  const std::vector<double> obs = read_observations(o.data);
  const PitmanYor model(o.model.pd_a, o.model.pd_b);
  const ParetoMixture base(o.model.pareto_alpha, o.model.pareto_delta);
  const std::vector<double> grid_points = GridSpec::parse(o.grid).points();
  const CenteredData data = center(obs, o.theta);
  const auto start = std::chrono::steady_clock::now();
  const DensityGrid by_path =
      exact_density_given_theta(model, base, data, grid_points, o.path_cap);
  const DensityGrid by_partition =
      exact_density(model, base, data, grid_points, o.partition_cap);
  double max_rel = 0.0;
  for (std::size_t i = 0; i < grid_points.size(); ++i) {
    const double a = by_path.estimate[i];
    const double b = by_partition.estimate[i];
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    max_rel = std::max(max_rel, std::abs(a - b) / scale);
  }
  const double uniformity =
      conditional_uniformity_check(model, base, data, o.partition_cap);
  const bool pass = max_rel <= o.tol && uniformity <= o.uniformity_tol;
  std::cout << json{{"max_rel_deviation", max_rel},
                    {"uniformity_max_deviation", uniformity},
                    {"tol", o.tol},
                    {"uniformity_tol", o.uniformity_tol},
                    {"pass", pass},
                    {"points", grid_points.size()},
                    {"n_plus", data.n_plus()},
                    {"n_minus", data.n_minus()},
                    {"theta", o.theta},
                    {"runtime_ms", ms_since(start)}}
                   .dump(2)
            << "\n";
  return pass ? 0 : 1;
}

int cmd_count(int total) {
  const std::vector<CountRow> rows = count_table(total);
  std::printf("%3s %5s %24s %24s %10s\n", "n", "N-n", "paths", "partitions",
              "ratio(%)");
  for (const CountRow& row : rows)
    std::printf("%3d %5d %24s %24s %10.3f\n", row.n_plus, row.n_minus,
                with_commas(row.path_product).c_str(),
                with_commas(row.partition_product).c_str(), row.ratio * 100.0);
  return 0;
}

struct DiagOpts {
  std::string data;
  ModelOpts model;
  double theta = 0.0;
  int draws = 1000;
  std::uint64_t seed = 1;
};

int cmd_sip_diag(const DiagOpts& o) {
  const std::vector<double> obs = read_observations(o.data);
  const PitmanYor model(o.model.pd_a, o.model.pd_b);
  const ParetoMixture base(o.model.pareto_alpha, o.model.pareto_delta);
  const CenteredData data = center(obs, o.theta);
  if (data.zero_gaps > 0)
    throw std::domain_error("an observation sits exactly at the mode");
  const auto h = [](const SPath& s) {
    return static_cast<double>(s.block_count());
  };
  json sides = json::array();
  std::uint64_t stream = 0;
  for (const bool plus : {true, false}) {
    const PathTarget target(model, base, plus ? data.y : data.z_abs);
    json schemes = json::array();
    for (const char* scheme_name : {"exact", "approximate", "naive"}) {
      const std::string scheme = scheme_name;
      Rng rng(substream_seed(o.seed, stream++));
      const bool naive = scheme == "naive";
      const PathEstimate pe = path_expectation(
          target, h, o.draws, rng,
          naive ? TrialForm::exact : parse_trial(scheme), naive);
      schemes.push_back({{"scheme", scheme},
                         {"mean_blocks", pe.estimate},
                         {"stderr", pe.stderr_value},
                         {"ess", pe.ess}});
    }
    sides.push_back({{"side", plus ? "plus" : "minus"},
                     {"n", plus ? data.n_plus() : data.n_minus()},
                     {"schemes", schemes}});
  }
  std::cout << json{{"draws", o.draws},
                    {"seed", o.seed},
                    {"theta", o.theta},
                    {"sides", sides}}
                   .dump(2)
            << "\n";
  return 0;
}

struct ExperimentOpts {
  std::string preset;
  int draws = 1000;
  std::uint64_t seed = 1;
  int threads = 0;
  int replications = 2000;
  int seeds = 5;
  std::vector<int> sizes;
  bool emit_densities = false;
  std::optional<std::string> out_dir;
};

const char* modal_set(const std::string& density) {
  if (density == "lambda1") return "[-1;0]";
  if (density == "lambda2") return "[0;0.1]";
  return "0";
}

std::string rho_label(double sd) {
  if (sd == 1.0) return "N(0,1)";
  char buf[48];
  std::snprintf(buf, sizeof buf, "N(0,%g^2)", sd);
  return buf;
}

int cmd_experiment(const ExperimentOpts& o) {
  const std::filesystem::path dir = resolve_results_dir(o.out_dir);
  DensitySink sink;
  if (o.emit_densities)
    sink = [&dir](const std::string& label, const DensityGrid& grid) {
      write_density_csv(dir / (label + ".csv"), grid);
    };
  json summary = {{"preset", o.preset}, {"seed", o.seed}, {"draws", o.draws}};
  if (o.preset == "convergence") {
    ConvergenceSpec spec;
    spec.draws = o.draws;
    spec.seed = o.seed;
    spec.threads = o.threads;
    spec.seeds = o.seeds;
    if (!o.sizes.empty()) spec.sizes = o.sizes;
    const std::vector<ConvergenceRow> rows = convergence_experiment(spec, sink);
    std::string csv = "theta0,pd_a,pd_b,size,seed_index,l1,ess\n";
    std::string timing = "theta0,pd_a,pd_b,size,seed_index,runtime_ms\n";
    for (const ConvergenceRow& r : rows) {
      const std::string key = format_double(r.theta0) + "," +
                              format_double(r.pd_a) + "," +
                              format_double(r.pd_b) + "," +
                              std::to_string(r.size) + "," +
                              std::to_string(r.seed_index);
      csv += key + "," + format_double(r.l1) + "," + format_double(r.ess) + "\n";
      timing += key + "," + format_double(r.runtime_ms) + "\n";
    }
    write_text_file(dir / "convergence.csv", csv);
    write_text_file(dir / "convergence_timings.csv", timing);
    summary["rows"] = rows.size();
    summary["output"] = (dir / "convergence.csv").string();
  } else if (o.preset == "mode-recovery") {
    ModeRecoverySpec spec;
    spec.draws = o.draws;
    spec.seed = o.seed;
    spec.threads = o.threads;
    if (!o.sizes.empty()) spec.sizes = o.sizes;
    const std::vector<ModeRecoveryRow> rows =
        mode_recovery_experiment(spec, sink);
    std::string csv = "density,rho_sd,size,theta_hat,ess,l1\n";
    std::string timing = "density,rho_sd,size,runtime_ms\n";
    for (const ModeRecoveryRow& r : rows) {
      csv += r.density + "," + format_double(r.rho_sd) + "," +
             std::to_string(r.size) + "," + format_double(r.theta_hat) + "," +
             format_double(r.ess) + "," + format_double(r.l1) + "\n";
      timing += r.density + "," + format_double(r.rho_sd) + "," +
                std::to_string(r.size) + "," + format_double(r.runtime_ms) +
                "\n";
    }
    // Pivot shaped like the published mode-estimate table: proposal rows by
    // size, one column per test density, true modal sets last.
    std::string pivot = "rho,N";
    std::vector<std::string> names;
    for (const TestDensity::Kind kind : spec.densities) {
      names.emplace_back(TestDensity(kind).name());
      pivot += "," + names.back();
    }
    pivot += "\n";
    for (const double sd : spec.rho_sds)
      for (const int n : spec.sizes) {
        pivot += rho_label(sd) + "," + std::to_string(n);
        for (const std::string& name : names) {
          const auto it = std::find_if(
              rows.begin(), rows.end(), [&](const ModeRecoveryRow& r) {
                return r.density == name && r.rho_sd == sd && r.size == n;
              });
          pivot += "," + (it == rows.end() ? std::string("")
                                           : format_double(it->theta_hat));
        }
        pivot += "\n";
      }
    pivot += "true_mode,";
    for (const std::string& name : names) pivot += std::string(",") + modal_set(name);
    pivot += "\n";
    write_text_file(dir / "recovery.csv", csv);
    write_text_file(dir / "recovery_table.csv", pivot);
    write_text_file(dir / "recovery_timings.csv", timing);
    summary["rows"] = rows.size();
    summary["output"] = (dir / "recovery.csv").string();
    summary["table"] = (dir / "recovery_table.csv").string();
  } else if (o.preset == "mode-histogram") {
    HistogramSpec spec;
    spec.draws = o.draws;
    spec.seed = o.seed;
    spec.threads = o.threads;
    spec.replications = o.replications;
    if (!o.sizes.empty()) spec.size = o.sizes.front();
    const HistogramResult result = mode_histogram_experiment(spec);
    std::string csv = "rho_sd,replication,theta_hat,ess\n";
    for (const HistogramRow& r : result.rows)
      csv += format_double(r.rho_sd) + "," + std::to_string(r.replication) +
             "," + format_double(r.theta_hat) + "," + format_double(r.ess) +
             "\n";
    json summaries = json::array();
    for (const HistogramSummary& s : result.summaries)
      summaries.push_back({{"rho_sd", s.rho_sd},
                           {"median_abs", s.median_abs},
                           {"frac_within_half", s.frac_within_half},
                           {"mad", s.mad}});
    write_text_file(dir / "histogram.csv", csv);
    write_text_file(dir / "histogram_summary.json", summaries.dump(2) + "\n");
    summary["replications"] = spec.replications;
    summary["summaries"] = summaries;
    summary["output"] = (dir / "histogram.csv").string();
  } else {
    throw std::runtime_error(
        "--preset must be convergence, mode-recovery, or mode-histogram");
  }
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int fail_json(const char* type, const std::string& message) {
  std::cerr << json{{"error", {{"type", type}, {"message", message}}}}.dump()
            << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Bayes estimation of a unimodal density under species sampling mixture "
      "priors"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "INI config file; command-line flags override its values");

  SimulateOpts sim;
  CLI::App* c_sim = app.add_subcommand(
      "simulate", "Draw observations from a test density (inverse CDF; a "
                  "longer run with the same seed extends a shorter one)");
  c_sim->add_option("--density", sim.density, "lambda1|lambda2|lambda3")
      ->capture_default_str();
  c_sim->add_option("--n", sim.n, "Sample size")->capture_default_str();
  c_sim->add_option("--seed", sim.seed, "Data seed")->capture_default_str();
  c_sim->add_option("--out", sim.out_dir, "Results directory");
  c_sim->add_option("--output", sim.output, "Output file name");

  EstimateOpts est_density;
  CLI::App* c_estd = app.add_subcommand(
      "estimate-density",
      "Posterior-mean density estimate by sequential importance sampling");
  c_estd->add_option("--data", est_density.data, "Observation file")->required();
  add_model_opts(c_estd, est_density.model);
  add_sampler_opts(c_estd, est_density.sampler);
  c_estd->add_option("--grid", est_density.grid, "Evaluation grid lo:hi:step")
      ->capture_default_str();
  c_estd->add_option("--out", est_density.out_dir, "Results directory");
  c_estd->add_option("--output", est_density.output, "Density CSV name");

  EstimateOpts est_mode;
  CLI::App* c_estm = app.add_subcommand(
      "estimate-mode", "Posterior-mean mode estimate by sequential importance "
                       "sampling");
  c_estm->add_option("--data", est_mode.data, "Observation file")->required();
  add_model_opts(c_estm, est_mode.model);
  add_sampler_opts(c_estm, est_mode.sampler);
  c_estm->add_option("--out", est_mode.out_dir, "Results directory");
  c_estm->add_option("--output", est_mode.output, "Summary JSON file name");

  ExactOpts exact;
  CLI::App* c_exact = app.add_subcommand(
      "exact", "Exact small-sample posterior-mean density by full path "
               "enumeration; mode integrated out unless --theta is given");
  c_exact->add_option("--data", exact.data, "Observation file")->required();
  add_model_opts(c_exact, exact.model);
  c_exact->add_option("--grid", exact.grid, "Evaluation grid lo:hi:step")
      ->capture_default_str();
  c_exact->add_option("--theta", exact.theta, "Fix the mode at this value");
  c_exact->add_option("--theta-grid", exact.theta_count,
                      "Quadrature node count for the unknown mode")
      ->capture_default_str();
  c_exact->add_option("--prior-width", exact.prior_width,
                      "Mode prior half-width in sample standard deviations")
      ->capture_default_str();
  c_exact->add_option("--path-cap", exact.path_cap,
                      "Largest per-side size enumerated exactly")
      ->capture_default_str();
  c_exact->add_flag("--mode-posterior", exact.mode_posterior,
                    "Also write the mode's posterior density CSV");
  c_exact->add_option("--out", exact.out_dir, "Results directory");
  c_exact->add_option("--output", exact.output, "Density CSV name");

  OracleOpts oracle;
  CLI::App* c_oracle = app.add_subcommand(
      "oracle-compare", "Check the path-based exact density against the "
                        "partition-based oracle and conditional uniformity");
  c_oracle->add_option("--data", oracle.data, "Observation file")->required();
  add_model_opts(c_oracle, oracle.model);
  c_oracle->add_option("--theta", oracle.theta, "Mode location")->required();
  c_oracle->add_option("--grid", oracle.grid, "Evaluation grid lo:hi:step")
      ->capture_default_str();
  c_oracle->add_option("--path-cap", oracle.path_cap, "Path enumeration cap")
      ->capture_default_str();
  c_oracle
      ->add_option("--partition-cap", oracle.partition_cap,
                   "Partition enumeration cap")
      ->capture_default_str();
  c_oracle->add_option("--tol", oracle.tol, "Relative deviation tolerance")
      ->capture_default_str();
  c_oracle
      ->add_option("--uniformity-tol", oracle.uniformity_tol,
                   "Conditional uniformity tolerance")
      ->capture_default_str();

  int count_total = 20;
  CLI::App* c_count = app.add_subcommand(
      "count", "Print the path-versus-partition complexity table");
  c_count->add_option("--table1", count_total,
                      "Total sample size N; rows split it as (n, N-n)")
      ->required();

  DiagOpts diag;
  CLI::App* c_diag = app.add_subcommand(
      "sip-diag", "Compare trial forms and the left-to-right baseline on one "
                  "dataset's two path targets");
  c_diag->add_option("--data", diag.data, "Observation file")->required();
  add_model_opts(c_diag, diag.model);
  c_diag->add_option("--theta", diag.theta, "Mode location")->required();
  c_diag->add_option("--draws", diag.draws, "Draws per scheme")
      ->capture_default_str();
  c_diag->add_option("--seed", diag.seed, "Master seed")->capture_default_str();

  ExperimentOpts exp;
  CLI::App* c_exp = app.add_subcommand(
      "experiment", "Run a scripted study preset and write its CSV/JSON "
                    "reports (timings go to a separate non-reproducible file)");
  c_exp->add_option("--preset", exp.preset,
                    "convergence|mode-recovery|mode-histogram")
      ->required();
  c_exp->add_option("--draws", exp.draws, "Monte Carlo size M per run")
      ->capture_default_str();
  c_exp->add_option("--seed", exp.seed, "Master seed")->capture_default_str();
  c_exp->add_option("--threads", exp.threads, "Worker threads; 0 = hardware")
      ->capture_default_str();
  c_exp->add_option("--replications", exp.replications,
                    "Replications for mode-histogram")
      ->capture_default_str();
  c_exp->add_option("--data-seeds", exp.seeds, "Data seeds for convergence")
      ->capture_default_str();
  c_exp->add_option("--sizes", exp.sizes, "Sample sizes override")
      ->delimiter(',');
  c_exp->add_flag("--emit-densities", exp.emit_densities,
                  "Also write every run's density estimate CSV");
  c_exp->add_option("--out", exp.out_dir, "Results directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << json{{"error", {{"type", "usage"}, {"message", e.what()}}}}
                     .dump()
              << "\n";
    return e.get_exit_code();
  }

  try {
    if (c_sim->parsed()) return cmd_simulate(sim);
    if (c_estd->parsed()) return cmd_estimate(est_density, true);
    if (c_estm->parsed()) return cmd_estimate(est_mode, false);
    if (c_exact->parsed()) return cmd_exact(exact);
    if (c_oracle->parsed()) return cmd_oracle_compare(oracle);
    if (c_count->parsed()) return cmd_count(count_total);
    if (c_diag->parsed()) return cmd_sip_diag(diag);
    if (c_exp->parsed()) return cmd_experiment(exp);
  } catch (const std::invalid_argument& e) {
    return fail_json("invalid_argument", e.what());
  } catch (const std::domain_error& e) {
    return fail_json("domain_error", e.what());
  } catch (const std::length_error& e) {
    return fail_json("length_error", e.what());
  } catch (const std::runtime_error& e) {
    return fail_json("runtime_error", e.what());
  } catch (const std::exception& e) {
    return fail_json("error", e.what());
  }
  return 0;
}
