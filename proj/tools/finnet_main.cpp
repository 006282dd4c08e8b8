#include "finnet/classical.hpp"
#include "finnet/failing.hpp"
#include "finnet/fair_sampling.hpp"
#include "finnet/finner.hpp"
#include "finnet/io.hpp"
#include "finnet/network.hpp"
#include "finnet/quantum.hpp"
#include "finnet/rgb4.hpp"
#include "finnet/spdc.hpp"
#include "finnet/types.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace finnet;

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitInvalid = 4;
constexpr int kExitDimension = 5;
constexpr int kExitFairSampling = 6;
constexpr int kExitDomain = 7;

double default_tol() {
  if (const char* env = std::getenv("FINNET_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && v > 0.0) return v;
  }
  return tol::analytic;
}

RealVector to_real_vector(const std::vector<double>& v) {
  return Eigen::Map<const RealVector>(v.data(), static_cast<long>(v.size()));
}

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += io::format_double(v[i]);
  }
  return out;
}

io::FileHeader make_header(const std::string& config, std::uint64_t seed = 0) {
  io::FileHeader header;
  header.seed = seed;
  header.config_hash = io::fnv1a_hex(config);
  return header;
}

io::json with_header(const io::FileHeader& header, io::json body) {
  io::json file;
  file["header"] = io::to_json(header);
  for (auto& [key, value] : body.items()) file[key] = std::move(value);
  return file;
}

// Every command prints its full result to stdout and mirrors it to --out.
void emit_json(const io::FileHeader& header, io::json body, const std::string& out) {
  const std::string text = with_header(header, std::move(body)).dump(2) + "\n";
  std::cout << text;
  if (!out.empty()) io::write_text_file(out, text);
}

void emit_text(const std::string& text, const std::string& out) {
  std::cout << text;
  if (!out.empty()) io::write_text_file(out, text);
}

QuantumNetworkModel load_model(const std::string& path) {
  QuantumNetworkModel model = io::model_from_json(io::load_json_file(path));
  model.check();
  return model;
}

double two_pi_mod(double angle) {
  constexpr double two_pi = 6.28318530717958647692;
  double m = std::fmod(angle, two_pi);
  if (m < 0.0) m += two_pi;
  return m;
}

// --- subcommand options ------------------------------------------------------

struct ValidateOpts {
  std::string model, network, out;
};

struct SimulateOpts {
  std::string model, out, save_model, format = "json";
  std::vector<double> fail;
  bool flag_qubit = false;
};

struct FinnerOpts {
  std::string model, dist, network, out;
  std::vector<double> fail;
  bool with_g_oracle = false;
  double tol = 0.0;
};

struct RigidityOpts {
  std::string model, out;
  double tol = 0.0;
};

struct PostselectOpts {
  std::string model, out, report;
  double tol = 0.0;
};

struct OptimizeOpts {
  std::string objective = "standard_chsh", out;
  bool equal_t = true;
  bool zero_phases = false;
  double fix_t = 0.0;
  bool has_fix_t = false;
  int restarts = 200;
  int max_iters = 4000;
  std::uint64_t seed = 0;
};

struct ScanOpts {
  std::string standard_objective = "standard_randomness";
  std::string ps_objective = "ps_randomness";
  std::string out;
  double t_min = 0.05, t_max = 0.95;
  int steps = 60;
  int restarts = 40;
  std::uint64_t seed = 0;
  bool zero_phases = false;
};

struct Rgb4Opts {
  double theta = 0.26;
  double fail_alpha = 0.0, fail_beta = 0.0, fail_gamma = 0.0;
  bool sweep = false;
  double theta_min = 0.0, theta_max = 0.78539816339744830961;
  int steps = 40;
  std::string out;
};

struct TablesOpts {
  std::uint64_t seed = 7;
  int restarts = 200;
  int scan_steps = 60;
  int scan_restarts = 40;
  std::string out_dir = ".";
};

// --- subcommand bodies -------------------------------------------------------

int run_validate(const ValidateOpts& o) {
  if (o.model.empty() == o.network.empty()) {
    std::cerr << "finnet: validate needs exactly one of --model / --network\n";
    return kExitUsage;
  }
  const std::string config = "validate model=" + o.model + " network=" + o.network;
  ValidationReport report;
  io::json body;
  if (!o.network.empty()) {
    const NetworkGraph graph = io::network_from_json(io::load_json_file(o.network));
    report = validate(graph);
    body["n_sources"] = graph.n_sources();
    body["n_parties"] = graph.n_parties();
  } else {
    QuantumNetworkModel model = io::model_from_json(io::load_json_file(o.model));
    report = validate(model.graph);
    try {
      model.check();
    } catch (const std::exception& e) {
      report.violations.emplace_back(e.what());
    }
    body["n_sources"] = model.graph.n_sources();
    body["n_parties"] = model.graph.n_parties();
  }
  io::json report_json = io::to_json(report);
  for (auto& [key, value] : report_json.items()) body[key] = std::move(value);
  emit_json(make_header(config), std::move(body), o.out);
  return report.valid() ? kExitOk : kExitInvalid;
}

int run_simulate(const SimulateOpts& o) {
  const std::string config = "simulate model=" + o.model + " fail=" + join_doubles(o.fail) +
                             " flag_qubit=" + (o.flag_qubit ? "1" : "0") +
                             " format=" + o.format;
  const io::FileHeader header = make_header(config);
  QuantumNetworkModel model = load_model(o.model);

  OutcomeDistribution dist = joint_distribution(model);
  if (!o.fail.empty()) {
    const RealVector e = to_real_vector(o.fail);
    if (o.flag_qubit) {
      model = flag_qubit_model(model, e);
      dist = joint_distribution(model);
    } else {
      dist = overlay_distribution(dist, model.graph, e);
    }
  }
  if (!o.save_model.empty())
    io::write_text_file(o.save_model,
                        with_header(header, io::to_json(model)).dump(2) + "\n");

  if (o.format == "csv") {
    emit_text(io::distribution_csv(dist, header), o.out);
  } else {
    io::json body;
    body["distribution"] = io::to_json(dist);
    emit_json(header, std::move(body), o.out);
  }
  return kExitOk;
}

int run_finner(const FinnerOpts& o) {
  if (o.model.empty() == (o.dist.empty() || o.network.empty())) {
    std::cerr << "finnet: finner-check needs --model or both --dist and --network\n";
    return kExitUsage;
  }
  const std::string config = "finner-check model=" + o.model + " dist=" + o.dist +
                             " network=" + o.network + " fail=" + join_doubles(o.fail) +
                             " g_oracle=" + (o.with_g_oracle ? "1" : "0") +
                             " tol=" + io::format_double(o.tol);
  io::json body;
  FinnerReport report;
  if (!o.model.empty()) {
    const QuantumNetworkModel model = load_model(o.model);
    OutcomeDistribution dist = joint_distribution(model);
    if (!o.fail.empty())
      dist = overlay_distribution(dist, model.graph, to_real_vector(o.fail));
    report = finner_check(dist, model.graph, o.tol);
    if (o.with_g_oracle) body["g_oracle"] = io::to_json(g_oracle(model));
  } else {
    const NetworkGraph graph = io::network_from_json(io::load_json_file(o.network));
    OutcomeDistribution dist = io::distribution_from_json(io::load_json_file(o.dist));
    if (!o.fail.empty()) dist = overlay_distribution(dist, graph, to_real_vector(o.fail));
    report = finner_check(dist, graph, o.tol);
  }
  io::json merged = io::to_json(report);
  for (auto& [key, value] : body.items()) merged[key] = std::move(value);
  emit_json(make_header(config), std::move(merged), o.out);
  return kExitOk;
}

int run_rigidity(const RigidityOpts& o) {
  const std::string config =
      "rigidity model=" + o.model + " tol=" + io::format_double(o.tol);
  const QuantumNetworkModel model = load_model(o.model);
  const RigidityVerdict verdict = rigidity_verify(model, o.tol);
  emit_json(make_header(config), io::to_json(verdict), o.out);
  return kExitOk;
}

int run_postselect(const PostselectOpts& o) {
  const std::string config =
      "postselect model=" + o.model + " tol=" + io::format_double(o.tol);
  const io::FileHeader header = make_header(config);
  const QuantumNetworkModel model = load_model(o.model);

  io::json parties = io::json::array();
  bool all_product = true;
  for (int j = 0; j < model.graph.n_parties(); ++j) {
    std::vector<int> dims;
    for (int s : model.graph.sources_of_party(j)) dims.push_back(model.edge_dim(s, j));
    const ProductTestResult pt =
        product_test(model.povms[j].conclusive_sum(), dims, o.tol);
    io::json pj;
    pj["fair_sampling"] = pt.is_product;
    pj["second_singular"] = pt.second_singular;
    if (!pt.is_product) pj["failing_cut"] = pt.failing_cut;
    parties.push_back(std::move(pj));
    all_product = all_product && pt.is_product;
  }

  io::json body;
  std::string error;
  if (all_product) {
    try {
      const PostselectResult result = postselect_transform(model, o.tol);
      body = io::to_json(result);
      for (std::size_t j = 0; j < parties.size(); ++j)
        body["parties"][j]["second_singular"] = parties[j]["second_singular"];
      if (!o.out.empty())
        io::write_text_file(o.out,
                            with_header(header, io::to_json(result.filtered)).dump(2) + "\n");
    } catch (const fair_sampling_error& e) {
      error = e.what();
    }
  } else {
    error = "conclusive element is not a product across edges";
  }
  if (!error.empty()) {
    body["parties"] = std::move(parties);
    body["error"] = error;
  }
  const std::string text = with_header(header, std::move(body)).dump(2) + "\n";
  std::cout << text;
  if (!o.report.empty()) io::write_text_file(o.report, text);
  return error.empty() ? kExitOk : kExitFairSampling;
}

OptimizeOptions to_options(const OptimizeOpts& o) {
  OptimizeOptions options;
  options.objective = objective_from_string(o.objective);
  options.equal_t = o.equal_t;
  options.zero_phases = o.zero_phases;
  if (o.has_fix_t) options.fixed_t = o.fix_t;
  options.restarts = o.restarts;
  options.max_iters = o.max_iters;
  options.seed = o.seed;
  return options;
}

std::string optimize_config(const OptimizeOptions& options) {
  return "spdc-optimize objective=" + to_string(options.objective) +
         " equal_t=" + (options.equal_t ? "1" : "0") +
         " fixed_t=" + (options.fixed_t ? io::format_double(*options.fixed_t) : "none") +
         " zero_phases=" + (options.zero_phases ? "1" : "0") +
         " restarts=" + std::to_string(options.restarts) +
         " max_iters=" + std::to_string(options.max_iters) +
         " seed=" + std::to_string(options.seed);
}

int run_spdc_optimize(const OptimizeOpts& o) {
  const OptimizeOptions options = to_options(o);
  const OptimizeResult result = optimize(options);
  emit_json(make_header(optimize_config(options), options.seed),
            io::to_json(result, options), o.out);
  return kExitOk;
}

int run_spdc_scan(const ScanOpts& o) {
  ScanOptions options;
  options.t_min = o.t_min;
  options.t_max = o.t_max;
  options.steps = o.steps;
  options.restarts = o.restarts;
  options.seed = o.seed;
  options.zero_phases = o.zero_phases;
  options.standard_objective = objective_from_string(o.standard_objective);
  options.ps_objective = objective_from_string(o.ps_objective);
  const std::string config =
      "spdc-scan t_min=" + io::format_double(o.t_min) + " t_max=" +
      io::format_double(o.t_max) + " steps=" + std::to_string(o.steps) +
      " restarts=" + std::to_string(o.restarts) + " seed=" + std::to_string(o.seed) +
      " zero_phases=" + (o.zero_phases ? "1" : "0") +
      " standard=" + o.standard_objective + " ps=" + o.ps_objective;

  const std::vector<ScanRow> rows = scan(options);
  io::CsvWriter csv(make_header(config, o.seed));
  csv.comment("standard = " + o.standard_objective);
  csv.comment("ps = " + o.ps_objective);
  csv.row({"t", "standard", "ps"});
  for (const ScanRow& r : rows)
    csv.row({io::format_double(r.t), io::format_double(r.standard_value),
             io::format_double(r.ps_value)});
  emit_text(csv.text(), o.out);
  return kExitOk;
}

int run_rgb4(const Rgb4Opts& o) {
  const std::string config =
      "rgb4-bound theta=" + io::format_double(o.theta) +
      " fail_alpha=" + io::format_double(o.fail_alpha) +
      " fail_beta=" + io::format_double(o.fail_beta) +
      " fail_gamma=" + io::format_double(o.fail_gamma) +
      " sweep=" + (o.sweep ? "1" : "0") + " theta_min=" + io::format_double(o.theta_min) +
      " theta_max=" + io::format_double(o.theta_max) + " steps=" + std::to_string(o.steps);
  const io::FileHeader header = make_header(config);

  if (o.sweep) {
    if (o.steps < 2) {
      std::cerr << "finnet: rgb4-bound sweep needs --steps >= 2\n";
      return kExitUsage;
    }
    io::CsvWriter csv(header);
    csv.row({"theta", "r_raw", "r_clamped", "entropy_L", "scaled_bound", "naive_bound"});
    for (int i = 0; i < o.steps; ++i) {
      const double theta =
          o.theta_min + (o.theta_max - o.theta_min) * i / (o.steps - 1.0);
      const RandomnessBoundReport r =
          scaled_randomness_bound(theta, o.fail_beta, o.fail_gamma, o.fail_alpha);
      csv.row({io::format_double(r.theta), io::format_double(r.r_raw),
               io::format_double(r.r_clamped), io::format_double(r.entropy_L),
               io::format_double(r.scaled_bound), io::format_double(r.naive_bound)});
    }
    emit_text(csv.text(), o.out);
    return kExitOk;
  }

  const RandomnessBoundReport report =
      scaled_randomness_bound(o.theta, o.fail_beta, o.fail_gamma, o.fail_alpha);
  io::json body = io::to_json(report);
  const FailingRGB4 failing =
      failing_rgb4(o.theta, Eigen::Vector3d(o.fail_alpha, o.fail_beta, o.fail_gamma));
  body["finner"] = io::to_json(failing.finner);
  emit_json(header, std::move(body), o.out);
  return kExitOk;
}

int run_tables(const TablesOpts& o) {
  const std::string config = "reproduce-tables seed=" + std::to_string(o.seed) +
                             " restarts=" + std::to_string(o.restarts) +
                             " scan_steps=" + std::to_string(o.scan_steps) +
                             " scan_restarts=" + std::to_string(o.scan_restarts);
  const io::FileHeader header = make_header(config, o.seed);
  std::filesystem::create_directories(o.out_dir);

  // The reference tables live in the zero-phase parameter space.
  const auto run = [&](Objective objective, bool equal_t,
                       std::uint64_t seed) -> OptimizeResult {
    OptimizeOptions options;
    options.objective = objective;
    options.equal_t = equal_t;
    options.zero_phases = true;
    options.restarts = o.restarts;
    options.seed = seed;
    return optimize(options);
  };
  const auto angle_cells = [](const OptimizeResult& r, bool equal_t) {
    std::vector<std::string> cells;
    cells.push_back(io::format_double(r.params.t1));
    if (!equal_t) cells.push_back(io::format_double(r.params.t2));
    cells.push_back(io::format_double(two_pi_mod(r.params.alice[0].theta)));
    cells.push_back(io::format_double(two_pi_mod(r.params.alice[1].theta)));
    if (!equal_t) cells.push_back(io::format_double(two_pi_mod(r.params.bob[0].theta)));
    cells.push_back(io::format_double(two_pi_mod(r.params.bob[1].theta)));
    return cells;
  };
  const auto table_csv = [&](const OptimizeResult& standard,
                             const OptimizeResult& ps, bool equal_t) {
    io::CsvWriter csv(header);
    std::vector<std::string> head = {"setting"};
    if (equal_t)
      head.insert(head.end(), {"t", "alpha0", "alpha1", "beta1"});
    else
      head.insert(head.end(), {"t1", "t2", "alpha0", "alpha1", "beta0", "beta1"});
    head.insert(head.end(), {"chsh", "p_succ", "randomness"});
    csv.row(head);
    for (const auto* r : {&standard, &ps}) {
      std::vector<std::string> row = {r == &standard ? "standard" : "post_selected"};
      const auto angles = angle_cells(*r, equal_t);
      row.insert(row.end(), angles.begin(), angles.end());
      row.push_back(io::format_double(r->chsh));
      row.push_back(io::format_double(r->success_prob));
      row.push_back(io::format_double(r->randomness));
      csv.row(row);
    }
    return csv.text();
  };

  const OptimizeResult eq_std = run(Objective::standard_randomness, true, o.seed);
  const OptimizeResult eq_ps = run(Objective::ps_randomness, true, o.seed + 1);
  const OptimizeResult free_std = run(Objective::standard_randomness, false, o.seed + 2);
  const OptimizeResult free_ps = run(Objective::ps_randomness, false, o.seed + 3);

  const std::filesystem::path dir(o.out_dir);
  const std::string equal_path = (dir / "table_equal_t.csv").string();
  const std::string free_path = (dir / "table_free_t.csv").string();
  const std::string scan_path = (dir / "randomness_scan.csv").string();
  io::write_text_file(equal_path, table_csv(eq_std, eq_ps, true));
  io::write_text_file(free_path, table_csv(free_std, free_ps, false));

  ScanOptions scan_options;
  scan_options.steps = o.scan_steps;
  scan_options.restarts = o.scan_restarts;
  scan_options.seed = o.seed + 4;
  scan_options.zero_phases = true;
  const std::vector<ScanRow> rows = scan(scan_options);
  io::CsvWriter scan_csv(header);
  scan_csv.comment("standard = standard_randomness");
  scan_csv.comment("ps = ps_randomness");
  scan_csv.row({"t", "standard", "ps"});
  for (const ScanRow& r : rows)
    scan_csv.row({io::format_double(r.t), io::format_double(r.standard_value),
                  io::format_double(r.ps_value)});
  scan_csv.save(scan_path);

  io::json body;
  body["files"] = io::json::array({equal_path, free_path, scan_path});
  const auto summary = [](const OptimizeResult& r) {
    io::json j;
    j["chsh"] = r.chsh;
    j["randomness"] = r.randomness;
    j["success_prob"] = r.success_prob;
    return j;
  };
  body["equal_t"]["standard"] = summary(eq_std);
  body["equal_t"]["post_selected"] = summary(eq_ps);
  body["free_t"]["standard"] = summary(free_std);
  body["free_t"]["post_selected"] = summary(free_ps);
  body["scan_points"] = static_cast<int>(rows.size());
  emit_json(header, std::move(body), "");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finnet " + std::string(kVersion) +
               " - simulation and certification for quantum networks with "
               "failing sources"};
  app.require_subcommand(1);
  const double tol_default = default_tol();

  ValidateOpts validate_opts;
  auto* validate_cmd = app.add_subcommand(
      "validate", "Structural validation of a network or model file");
  validate_cmd->add_option("--model", validate_opts.model, "model JSON path");
  validate_cmd->add_option("--network", validate_opts.network, "network JSON path");
  validate_cmd->add_option("--out", validate_opts.out, "write report JSON here");

  SimulateOpts simulate_opts;
  auto* simulate_cmd =
      app.add_subcommand("simulate", "Exact outcome distribution of a model");
  simulate_cmd->add_option("--model", simulate_opts.model, "model JSON path")
      ->required();
  auto* simulate_fail =
      simulate_cmd
          ->add_option("--fail", simulate_opts.fail,
                       "per-source failure probabilities, e.g. 0.1,0.2,0.3")
          ->delimiter(',');
  simulate_cmd
      ->add_flag("--flag-qubit", simulate_opts.flag_qubit,
                 "realize failures with flag qubits instead of overlaying")
      ->needs(simulate_fail);
  simulate_cmd->add_option("--save-model", simulate_opts.save_model,
                           "write the simulated model JSON here");
  simulate_cmd->add_option("--format", simulate_opts.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  simulate_cmd->add_option("--out", simulate_opts.out, "write distribution here");

  FinnerOpts finner_opts;
  finner_opts.tol = tol_default;
  auto* finner_cmd = app.add_subcommand(
      "finner-check", "Joint-vs-marginal inequality scorecard for a distribution");
  finner_cmd->add_option("--model", finner_opts.model, "model JSON path");
  finner_cmd->add_option("--dist", finner_opts.dist, "distribution JSON path");
  finner_cmd->add_option("--network", finner_opts.network, "network JSON path");
  finner_cmd
      ->add_option("--fail", finner_opts.fail, "overlay failure probabilities first")
      ->delimiter(',');
  finner_cmd->add_flag("--g-oracle", finner_opts.with_g_oracle,
                       "include the local-variable witness chain (model input only)");
  finner_cmd->add_option("--tol", finner_opts.tol, "saturation tolerance");
  finner_cmd->add_option("--out", finner_opts.out, "write report JSON here");

  RigidityOpts rigidity_opts;
  rigidity_opts.tol = tol_default;
  auto* rigidity_cmd = app.add_subcommand(
      "rigidity", "Structural certificate for inequality-saturating models");
  rigidity_cmd->add_option("--model", rigidity_opts.model, "model JSON path")
      ->required();
  rigidity_cmd->add_option("--tol", rigidity_opts.tol, "check tolerance");
  rigidity_cmd->add_option("--out", rigidity_opts.out, "write verdict JSON here");

  PostselectOpts postselect_opts;
  postselect_opts.tol = tol_default;
  auto* postselect_cmd = app.add_subcommand(
      "postselect", "Filter a fair-sampling model onto its conclusive block");
  postselect_cmd->add_option("--model", postselect_opts.model, "model JSON path")
      ->required();
  postselect_cmd->add_option("--out", postselect_opts.out,
                             "write the filtered model JSON here");
  postselect_cmd->add_option("--report", postselect_opts.report,
                             "write the verdict JSON here");
  postselect_cmd->add_option("--tol", postselect_opts.tol, "product-test tolerance");

  OptimizeOpts optimize_opts;
  auto* optimize_cmd = app.add_subcommand(
      "spdc-optimize", "Optimize photon-pair CHSH or randomness objectives");
  optimize_cmd
      ->add_option("--objective", optimize_opts.objective,
                   "standard_chsh | standard_randomness | ps_chsh | ps_randomness")
      ->check(CLI::IsMember(
          {"standard_chsh", "standard_randomness", "ps_chsh", "ps_randomness"}));
  optimize_cmd->add_flag("--equal-t,!--free-t", optimize_opts.equal_t,
                         "constrain the two pump amplitudes to be equal");
  optimize_cmd->add_flag("--zero-phases", optimize_opts.zero_phases,
                         "search wave-plate rotation angles only, phases fixed to 0");
  auto* fix_t_opt = optimize_cmd->add_option("--fix-t", optimize_opts.fix_t,
                                             "pin both pump amplitudes to a value");
  optimize_cmd->add_option("--restarts", optimize_opts.restarts, "random restarts")
      ->check(CLI::PositiveNumber);
  optimize_cmd->add_option("--max-iters", optimize_opts.max_iters,
                           "simplex iterations per restart");
  optimize_cmd->add_option("--seed", optimize_opts.seed, "random seed");
  optimize_cmd->add_option("--out", optimize_opts.out, "write result JSON here");

  ScanOpts scan_opts;
  auto* scan_cmd = app.add_subcommand(
      "spdc-scan", "Standard-vs-post-selected objective curves over pump amplitude");
  scan_cmd->add_option("--t-min", scan_opts.t_min, "lowest pump amplitude");
  scan_cmd->add_option("--t-max", scan_opts.t_max, "highest pump amplitude");
  scan_cmd->add_option("--steps", scan_opts.steps, "grid points")
      ->check(CLI::Range(2, 100000));
  scan_cmd->add_option("--restarts", scan_opts.restarts, "restarts per grid point")
      ->check(CLI::PositiveNumber);
  scan_cmd->add_option("--seed", scan_opts.seed, "random seed");
  scan_cmd->add_flag("--zero-phases", scan_opts.zero_phases,
                     "search wave-plate rotation angles only, phases fixed to 0");
  scan_cmd
      ->add_option("--standard-objective", scan_opts.standard_objective,
                   "objective for the unconditioned curve")
      ->check(CLI::IsMember({"standard_chsh", "standard_randomness"}));
  scan_cmd
      ->add_option("--ps-objective", scan_opts.ps_objective,
                   "objective for the post-selected curve")
      ->check(CLI::IsMember({"ps_chsh", "ps_randomness"}));
  scan_cmd->add_option("--out", scan_opts.out, "write CSV here");

  Rgb4Opts rgb4_opts;
  auto* rgb4_cmd = app.add_subcommand(
      "rgb4-bound", "Randomness bound for the triangle four-outcome distribution");
  rgb4_cmd->add_option("--theta", rgb4_opts.theta, "splitting angle in [0, pi/4]");
  rgb4_cmd->add_option("--fail-alpha", rgb4_opts.fail_alpha,
                       "failure probability of the source opposite the first party");
  rgb4_cmd->add_option("--fail-beta", rgb4_opts.fail_beta,
                       "failure probability of the second source");
  rgb4_cmd->add_option("--fail-gamma", rgb4_opts.fail_gamma,
                       "failure probability of the third source");
  rgb4_cmd->add_flag("--sweep", rgb4_opts.sweep, "emit a CSV over a theta grid");
  rgb4_cmd->add_option("--theta-min", rgb4_opts.theta_min, "sweep start");
  rgb4_cmd->add_option("--theta-max", rgb4_opts.theta_max, "sweep end");
  rgb4_cmd->add_option("--steps", rgb4_opts.steps, "sweep grid points");
  rgb4_cmd->add_option("--out", rgb4_opts.out, "write report (JSON) or sweep (CSV) here");

  TablesOpts tables_opts;
  auto* tables_cmd = app.add_subcommand(
      "reproduce-tables", "Regenerate the optimization tables and the scan curve");
  tables_cmd->add_option("--seed", tables_opts.seed, "base random seed");
  tables_cmd->add_option("--restarts", tables_opts.restarts, "restarts per table entry")
      ->check(CLI::PositiveNumber);
  tables_cmd->add_option("--scan-steps", tables_opts.scan_steps, "scan grid points")
      ->check(CLI::Range(2, 100000));
  tables_cmd
      ->add_option("--scan-restarts", tables_opts.scan_restarts,
                   "restarts per scan point")
      ->check(CLI::PositiveNumber);
  tables_cmd->add_option("--out-dir", tables_opts.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  optimize_opts.has_fix_t = fix_t_opt->count() > 0;

  try {
    if (validate_cmd->parsed()) return run_validate(validate_opts);
    if (simulate_cmd->parsed()) return run_simulate(simulate_opts);
    if (finner_cmd->parsed()) return run_finner(finner_opts);
    if (rigidity_cmd->parsed()) return run_rigidity(rigidity_opts);
    if (postselect_cmd->parsed()) return run_postselect(postselect_opts);
    if (optimize_cmd->parsed()) return run_spdc_optimize(optimize_opts);
    if (scan_cmd->parsed()) return run_spdc_scan(scan_opts);
    if (rgb4_cmd->parsed()) return run_rgb4(rgb4_opts);
    if (tables_cmd->parsed()) return run_tables(tables_opts);
  } catch (const io::io_error& e) {
    std::cerr << "finnet: " << e.what() << "\n";
    return kExitIo;
  } catch (const dimension_error& e) {
    std::cerr << "finnet: " << e.what() << "\n";
    return kExitDimension;
  } catch (const fair_sampling_error& e) {
    std::cerr << "finnet: " << e.what() << "\n";
    return kExitFairSampling;
  } catch (const std::domain_error& e) {
    std::cerr << "finnet: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::invalid_argument& e) {
    std::cerr << "finnet: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "finnet: " << e.what() << "\n";
    return kExitOther;
  }
  return kExitUsage;
}
