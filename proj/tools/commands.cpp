#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "drt/error.hpp"
#include "drt/lp_oracle.hpp"
#include "drt/mixture.hpp"
#include "drt/monte_carlo.hpp"
#include "drt/radar.hpp"
#include "drt/random.hpp"
#include "drt/rate.hpp"
#include "drt/records.hpp"
#include "drt/scenario_io.hpp"
#include "drt/tradeoff.hpp"

namespace drt::cli {

namespace {

constexpr std::uint64_t kDefaultSeed = 1;
constexpr std::size_t kMaxTrials = 100'000'000;

struct GlobalOptions {
  std::uint64_t seed = kDefaultSeed;
  std::string out;
  std::string format = "csv";
  std::optional<double> tolerance;
};

struct FrontOptions {
  std::string grid;
  std::string scenario;
  std::size_t resolution = 400;
  double p_max = 20.0;
  bool insert_tangent = false;
};

struct PlanOptions {
  std::string scenario;
  std::vector<double> budgets;
  std::vector<double> allocation;
};

struct SimulateOptions {
  std::string scenario;
  std::size_t trials = 100'000;
  std::optional<double> power;
  std::optional<double> rho;
  bool mixture = false;
};

struct VerifyOptions {
  std::size_t fuzz_cases = 1000;
  std::size_t grid_size = 200;
  std::size_t trials = 100'000;
  std::string inject_fault = "none";
};

struct FuzzOptions {
  std::size_t cases = 1000;
  std::size_t grid_size = 200;
  std::string shape = "mixed";
};

void emit(const GlobalOptions& g, const Table& table, std::ostream& out) {
  std::ostringstream buf;
  if (g.format == "json")
    buf << table_to_json(table).dump(2) << '\n';
  else
    write_csv(buf, table);
  if (g.out.empty() || g.out == "-") {
    out << buf.str();
    return;
  }
  std::ofstream file(g.out, std::ios::binary);
  if (!file) throw ConfigError("--out", "cannot open '" + g.out + "' for writing");
  file << buf.str();
  if (!file) throw ConfigError("--out", "write failed for '" + g.out + "'");
}

DesignGrid load_grid(const FrontOptions& o) {
  if (o.grid.empty() == o.scenario.empty()) throw ConfigError("--grid", "give exactly one of --grid or --scenario");
  if (!o.grid.empty()) {
    std::ifstream in(o.grid);
    if (!in) throw ConfigError("--grid", "cannot open '" + o.grid + "'");
    return parse_design_grid(read_csv(in));
  }
  const ScenarioConfig cfg = load_scenario(o.scenario);
  const CurveGeometry geom = analyze_curve(DetectionCurve::from_scenario(cfg.radar));
  return radar_design_grid(geom, o.p_max, o.resolution, o.insert_tangent);
}

int cmd_front(const GlobalOptions& g, const FrontOptions& o, std::ostream& out) {
  const DesignGrid grid = load_grid(o);
  const FrontSample front = build_front(grid, g.tolerance);
  emit(g, front_table(front, lower_convex_envelope(front)), out);
  return kSuccess;
}

int cmd_envelope(const GlobalOptions& g, const FrontOptions& o, std::ostream& out) {
  const DesignGrid grid = load_grid(o);
  const FrontSample front = build_front(grid, g.tolerance);
  emit(g, envelope_table(lower_convex_envelope(front)), out);
  return kSuccess;
}

int cmd_plan(const GlobalOptions& g, const PlanOptions& o, std::ostream& out) {
  const ScenarioConfig cfg = load_scenario(o.scenario);
  std::vector<double> budgets = o.budgets;
  if (budgets.empty()) budgets.push_back(cfg.radar.power_budget());
  std::optional<std::vector<double>> allocation;
  if (!o.allocation.empty()) allocation = o.allocation;

  std::vector<RadarPlan> plans;
  for (double b : budgets) {
    if (!(b >= 0.0) || !std::isfinite(b)) throw ConfigError("--budgets", "budgets must be nonnegative");
    plans.push_back(sensing_optimal_distribution(cfg.radar.with_power_budget(b), allocation));
  }
  Table table = plan_table(plans);
  if (cfg.comm) {
    table.columns.push_back("mixture_rate");
    table.columns.push_back("waterfill_rate");
    std::size_t row = 0;
    for (const RadarPlan& plan : plans) {
      const auto mixture = plan.covariance_mixture();
      const double r_mix = mixture_rate(*cfg.comm, mixture);
      const double r_wf = gaussian_rate(*cfg.comm, water_filling(*cfg.comm, plan.budget));
      for (std::size_t k = 0; k < plan.atoms.size(); ++k, ++row) {
        table.rows[row].push_back(format_number(r_mix));
        table.rows[row].push_back(format_number(r_wf));
      }
    }
  }
  emit(g, table, out);
  return kSuccess;
}

int cmd_simulate(const GlobalOptions& g, const SimulateOptions& o, std::ostream& out) {
  if (o.trials < 1 || o.trials > kMaxTrials) throw ConfigError("--trials", "must lie in [1, 1e8]");
  const ScenarioConfig cfg = load_scenario(o.scenario);
  std::vector<McReport> reports;
  if (o.mixture) {
    const RadarPlan plan = sensing_optimal_distribution(cfg.radar);
    reports.push_back(estimate_mixture_pd(cfg.radar, plan.atoms, o.trials, g.seed));
  } else {
    if (o.power && o.rho) throw ConfigError("--rho", "give at most one of --power or --rho");
    const PrincipalEigen eig = principal_eigen(cfg.radar.gram());
    const double alpha = cfg.radar.snr_gain() * eig.lambda_max;
    double power = o.power.value_or(cfg.radar.power_budget());
    if (o.rho) {
      if (!(*o.rho > 0.0)) throw ConfigError("--rho", "must be positive");
      power = *o.rho / alpha;
    }
    if (!(power > 0.0)) throw ConfigError("--power", "must be positive (zero illumination)");
    SimConfig sim{cfg.radar, optimal_covariance(eig, power).covariance(), o.trials, g.seed};
    reports.push_back(estimate_pfa(sim));
    reports.push_back(estimate_pd(sim));
  }
  emit(g, mc_table(reports), out);
  return kSuccess;
}

struct CheckRow {
  std::string suite;
  std::string check;
  bool pass;
  double value;
  double bound;
  std::string detail;
};

std::string describe(const KktCertificate& cert) {
  // Support-side violations name every design; grid-wide ones are counted.
  std::vector<std::pair<std::string, std::size_t>> counts;
  std::string named;
  for (const KktViolation& v : cert.violations) {
    if (v.kind == "off_envelope" || v.kind == "support_not_collinear" || v.kind == "unknown_design") {
      named += (named.empty() ? "" : ";") + v.kind + "[" + v.design_id + "]";
      continue;
    }
    auto it = std::find_if(counts.begin(), counts.end(), [&](const auto& c) { return c.first == v.kind; });
    if (it == counts.end())
      counts.emplace_back(v.kind, 1);
    else
      ++it->second;
  }
  std::string s = named;
  for (const auto& [kind, n] : counts) s += (s.empty() ? "" : ";") + kind + (n > 1 ? "x" + std::to_string(n) : "");
  return s.empty() ? "ok" : s;
}

CMatrix random_complex(SplitMix64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> nd;
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = cdouble(nd(rng), nd(rng));
  return m;
}

int cmd_verify(const GlobalOptions& g, const VerifyOptions& o, std::ostream& out, std::ostream& err) {
  static const std::vector<std::string> faults{"none", "wrong-weights", "off-envelope"};
  if (std::find(faults.begin(), faults.end(), o.inject_fault) == faults.end())
    throw ConfigError("--inject-fault", "expected none, wrong-weights or off-envelope");
  const double rel_tol = g.tolerance.value_or(1e-9);
  std::vector<CheckRow> rows;

  // Tangent power of the reference curve.
  const CurveGeometry ref = analyze_curve(DetectionCurve(1.0, 1e-5));
  rows.push_back({"tangent", "p_t_alpha1_pfa1e-5", std::abs(ref.tangent - 9.4070) <= 5e-4, ref.tangent, 5e-4,
                  "target 9.4070"});

  // Oracle equivalence and KKT over random fronts.
  const FuzzReport fuzz = random_front_fuzz(g.seed, o.fuzz_cases, o.grid_size);
  std::size_t value_bad = 0;
  for (const FuzzRecord& r : fuzz.records)
    if (std::abs(r.delta) > rel_tol * std::max(1.0, std::abs(r.oracle_value))) ++value_bad;
  rows.push_back({"lp_oracle", "fuzz_value_support_kkt", fuzz.failures == 0 && value_bad == 0,
                  static_cast<double>(fuzz.failures + value_bad), 0.0,
                  fuzz.first_failure ? "first failure case " + std::to_string(fuzz.first_failure->case_id)
                                     : std::to_string(fuzz.passes) + " cases"});

  // KKT on the radar mixtures.
  const DesignGrid radar_grid = radar_design_grid(ref, 20.0, 401, true);
  const CMatrix unit = CMatrix::Identity(1, 1);
  for (double budget : {1.0, 7.0, 15.0}) {
    const RadarScenario sc(unit, 1.0, 1, 1.0, 1e-5, budget);
    RadarPlan plan = sensing_optimal_distribution(sc);
    MixedStrategy mix = plan.as_mixed_strategy();
    if (budget == 1.0 && o.inject_fault == "wrong-weights") {
      // Weights as printed in the original closed form (transposed).
      const double pt = ref.tangent;
      for (MixtureAtom& a : mix.atoms) a.weight = a.xi == 0.0 ? budget / pt : (pt - budget) / pt;
    } else if (budget == 1.0 && o.inject_fault == "off-envelope") {
      mix.atoms = {{0.8, 0.0, {{power_design_id(0.0), 1.0}}}, {0.2, 5.0, {{power_design_id(5.0), 1.0}}}};
    }
    const KktCertificate cert = verify_kkt(radar_grid, mix, budget);
    const double mean_err = std::abs(mix.mean_resource() - budget);
    const bool mean_ok = mean_err <= 1e-12 * std::max(1.0, budget);
    std::string detail = describe(cert);
    if (!mean_ok && detail.find("mean_constraint") == std::string::npos) detail += ";mean_constraint";
    rows.push_back({"kkt", "radar_budget_" + format_number(budget), cert.valid() && mean_ok,
                    static_cast<double>(cert.violations.size()), 0.0, detail});
  }

  // Eigen-optimality of the principal-eigenvector covariance.
  {
    SplitMix64 rng(derive_seed(g.seed, 7));
    std::size_t bad = 0;
    double worst = 0.0;
    for (int s = 0; s < 50; ++s) {
      const Eigen::Index m = 1 + static_cast<Eigen::Index>(rng() % 6);
      const CMatrix hs = random_complex(rng, 1 + static_cast<Eigen::Index>(rng() % 6), m);
      const CMatrix gram = hs.adjoint() * hs;
      const PrincipalEigen eig = principal_eigen(gram);
      const double power = 0.1 + 10.0 * rng.uniform();
      const double best = (gram * optimal_covariance(eig, power).covariance()).trace().real();
      for (int k = 0; k < 100; ++k) {
        const CMatrix a = random_complex(rng, m, 1 + static_cast<Eigen::Index>(rng() % m));
        CMatrix r = a * a.adjoint();
        r *= power / r.trace().real();
        const double val = (gram * r).trace().real();
        worst = std::max(worst, val - best);
        if (val > best * (1.0 + 1e-12)) ++bad;
      }
    }
    rows.push_back({"radar", "eigen_optimality", bad == 0, worst, 0.0, std::to_string(bad) + " violations"});
  }

  // Monte Carlo moments and detection probabilities.
  {
    const CMatrix gram = (CMatrix(2, 2) << 1.0, 0.0, 0.0, 0.5).finished();
    const RadarScenario sc(gram, 1.0, 4, 1.0, 1e-2, 1.0);
    const PrincipalEigen eig = principal_eigen(gram);
    const double power = 3.0 / (sc.snr_gain() * eig.lambda_max);
    const SimConfig sim{sc, optimal_covariance(eig, power).covariance(), o.trials, g.seed};
    const McReport pfa = estimate_pfa(sim);
    const McReport pd = estimate_pd(sim);
    rows.push_back({"monte_carlo", "pfa_within_3sigma", pfa.within_sigma(3.0), pfa.empirical_prob, pfa.target_prob,
                    std::to_string(pfa.hits) + "/" + std::to_string(pfa.trials)});
    rows.push_back({"monte_carlo", "pd_within_3sigma", pd.within_sigma(3.0), pd.empirical_prob, pd.target_prob,
                    std::to_string(pd.hits) + "/" + std::to_string(pd.trials)});
    rows.push_back({"monte_carlo", "z_mean_h0_within_3se", pfa.z_mean_within(3.0), pfa.z_mean, pfa.z_mean_target, ""});
    rows.push_back({"monte_carlo", "z_mean_h1_within_3se", pd.z_mean_within(3.0), pd.z_mean, pd.z_mean_target, ""});
  }

  // Inflection power against the closed form.
  {
    SplitMix64 rng(derive_seed(g.seed, 11));
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      const double alpha = std::exp(std::log(0.01) + rng.uniform() * std::log(1e4));
      const double pfa = std::exp(-2.0 - 0.05 - rng.uniform() * 25.0);
      const InflectionPoint ip = inflection_power(DetectionCurve(alpha, pfa));
      worst = std::max(worst, std::abs(ip.power - ip.analytic) / std::abs(ip.analytic));
    }
    rows.push_back({"radar", "inflection_closed_form", worst <= 1e-6, worst, 1e-6, "relative error"});
  }

  // Gaussian-rate loss of the sensing-optimal mixture.
  {
    SplitMix64 rng(derive_seed(g.seed, 13));
    const CMatrix hs = random_complex(rng, 3, 4);
    const RadarScenario sc(hs.adjoint() * hs, 1.0, 4, 4.0, 1e-5, 1.0);
    const CommChannel ch{random_complex(rng, 2, 4), 1.0};
    const RadarPlan plan = sensing_optimal_distribution(sc);
    const auto mixture = plan.covariance_mixture();
    const double r_mix = mixture_rate(ch, mixture);
    const double r_wf = gaussian_rate(ch, water_filling(ch, 1.0));
    rows.push_back({"rate", "sensing_mixture_below_waterfill", r_mix < r_wf, r_mix, r_wf, "bits/use"});
  }

  Table table{{"suite", "check", "status", "value", "bound", "detail"}, {}};
  bool all = true;
  for (const CheckRow& r : rows) {
    all = all && r.pass;
    table.add_row({r.suite, r.check, r.pass ? "pass" : "fail", format_number(r.value), format_number(r.bound),
                   r.detail.empty() ? "-" : r.detail});
  }
  emit(g, table, out);
  if (!all) err << "verification failed\n";
  return all ? kSuccess : kVerificationFailure;
}

int cmd_fuzz(const GlobalOptions& g, const FuzzOptions& o, std::ostream& out) {
  if (o.cases < 1) throw ConfigError("--cases", "must be at least 1");
  if (o.grid_size < 1 || o.grid_size > kMaxOracleGridSize) throw ConfigError("--grid-size", "must lie in [1, 10000]");
  FuzzShape shape = FuzzShape::mixed;
  if (o.shape == "collinear")
    shape = FuzzShape::collinear;
  else if (o.shape != "mixed")
    throw ConfigError("--shape", "expected mixed or collinear");
  const FuzzReport report = random_front_fuzz(g.seed, o.cases, o.grid_size, shape);
  emit(g, fuzz_table(report), out);
  return report.failures == 0 ? kSuccess : kVerificationFailure;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sensing-optimal randomized transmit strategies: fronts, envelopes, plans and checks", "drt"};
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Master RNG seed")->capture_default_str();
  app.add_option("--out", g.out, "Output file (default: stdout)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_option("--tolerance", g.tolerance,
                 "front/envelope: cost-binning tolerance; verify: relative value tolerance (default 1e-9)");

  FrontOptions front_opts;
  auto add_front_inputs = [&](CLI::App* sub) {
    sub->add_option("--grid", front_opts.grid, "Design grid CSV (design_id,cost,perf)");
    sub->add_option("--scenario", front_opts.scenario, "Radar scenario JSON");
    sub->add_option("--resolution", front_opts.resolution, "Grid points for a scenario")->capture_default_str();
    sub->add_option("--p-max", front_opts.p_max, "Largest power for a scenario grid")->capture_default_str();
    sub->add_flag("--insert-tangent", front_opts.insert_tangent, "Add the exact tangent power to the grid");
  };
  CLI::App* front = app.add_subcommand("front", "Sampled Pareto front with envelope contacts");
  add_front_inputs(front);
  CLI::App* envelope = app.add_subcommand("envelope", "Lower convex envelope segments");
  add_front_inputs(envelope);

  PlanOptions plan_opts;
  CLI::App* plan = app.add_subcommand("plan", "Sensing-optimal covariance distribution per budget");
  plan->add_option("--scenario", plan_opts.scenario, "Radar scenario JSON")->required();
  plan->add_option("--budgets", plan_opts.budgets, "Power budgets (default: scenario power_budget)")->delimiter(',');
  plan->add_option("--allocation", plan_opts.allocation, "Split over a repeated principal eigenspace")->delimiter(',');

  SimulateOptions sim_opts;
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo P_FA / P_d of the CFAR detector");
  simulate->add_option("--scenario", sim_opts.scenario, "Radar scenario JSON")->required();
  simulate->add_option("--trials", sim_opts.trials, "Trials per hypothesis")->capture_default_str();
  simulate->add_option("--power", sim_opts.power, "Beam power along the principal eigenvector");
  simulate->add_option("--rho", sim_opts.rho, "Target SNR (sets the beam power)");
  simulate->add_flag("--mixture", sim_opts.mixture, "Sample the sensing-optimal mixture at the scenario budget");

  VerifyOptions verify_opts;
  CLI::App* verify = app.add_subcommand("verify", "Run the verification suites; exit 1 on any failure");
  verify->add_option("--fuzz-cases", verify_opts.fuzz_cases)->capture_default_str();
  verify->add_option("--grid-size", verify_opts.grid_size)->capture_default_str();
  verify->add_option("--trials", verify_opts.trials)->capture_default_str();
  verify->add_option("--inject-fault", verify_opts.inject_fault, "none | wrong-weights | off-envelope")
      ->capture_default_str();

  FuzzOptions fuzz_opts;
  CLI::App* fuzz = app.add_subcommand("fuzz", "LP-oracle vs mixture-builder fuzzing");
  fuzz->add_option("--cases", fuzz_opts.cases)->capture_default_str();
  fuzz->add_option("--grid-size", fuzz_opts.grid_size)->capture_default_str();
  fuzz->add_option("--shape", fuzz_opts.shape, "mixed | collinear")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    if (*front) return cmd_front(g, front_opts, out);
    if (*envelope) return cmd_envelope(g, front_opts, out);
    if (*plan) return cmd_plan(g, plan_opts, out);
    if (*simulate) return cmd_simulate(g, sim_opts, out);
    if (*verify) return cmd_verify(g, verify_opts, out, err);
    if (*fuzz) return cmd_fuzz(g, fuzz_opts, out);
  } catch (const ConfigError& e) {
    err << "drt: " << e.what() << '\n';
    return kUsageError;
  } catch (const Error& e) {
    err << "drt: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"drt"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace drt::cli
