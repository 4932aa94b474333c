// centqre: estimation and testing for learning models of the four-stage
// centipede game. Subcommands: fit, mcmc, randtest, ppc, simulate, validate.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "centqre/bayes.hpp"
#include "centqre/data.hpp"
#include "centqre/inference.hpp"
#include "centqre/model_json.hpp"
#include "centqre/models.hpp"
#include "centqre/parallel.hpp"
#include "centqre/resampling.hpp"

namespace fs = std::filesystem;
using namespace centqre;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fnv1a_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "missing";
  std::uint64_t hash = 1469598103934665603ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 1099511628211ULL;
    }
  }
  std::ostringstream out;
  out << std::hex << hash;
  return out.str();
}

struct Manifest {
  std::string command;
  json config = json::object();
  std::uint64_t seed = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;

  void write(const fs::path& out_dir) const {
    json j;
    j["tool"] = "centqre";
    j["version"] = kVersion;
    j["command"] = command;
    j["seed"] = seed;
    j["config"] = config;
    json in = json::object();
    for (const auto& p : inputs) in[p] = fnv1a_digest(p);
    j["input_digests"] = in;
    j["outputs"] = outputs;
    std::ofstream out(out_dir / ("manifest-" + command + ".json"));
    out << j.dump(2) << "\n";
  }
};

fs::path ensure_out_dir(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (text.empty() || text.back() != '\n') out << "\n";
}

json summary_to_json(const std::vector<ParameterSummary>& rows) {
  json j = json::array();
  for (const auto& r : rows) {
    j.push_back({{"name", r.name},
                 {"mean", r.mean},
                 {"median", r.median},
                 {"q025", r.q025},
                 {"q975", r.q975},
                 {"prob_positive", r.prob_positive}});
  }
  return j;
}

// theta-vs-game-number table for extrapolation plots.
void write_curves(const fs::path& path, const ModelSpec& model, int t_max) {
  std::ofstream out(path);
  out << "t,theta1,theta2,theta3,theta4,theta5\n";
  out.precision(12);
  GameContext ctx;
  for (int t = 1; t <= t_max; ++t) {
    ctx.t = t;
    const auto theta = outcome_distribution_for(model, ctx);
    out << t;
    for (double v : theta.theta) out << ',' << v;
    out << '\n';
  }
}

int run_fit(const std::string& data_path, const std::string& model_name, bool all,
            const std::string& out_dir, std::uint64_t seed, int threads,
            const std::string& curves_path, int curve_tmax) {
  const auto data = load_dataset(data_path);
  const auto out = ensure_out_dir(out_dir);
  FitConfig config;
  config.threads = threads;

  std::vector<Family> families;
  if (all) {
    families = {Family::OneParam, Family::Learning, Family::Hetero, Family::Altruistic,
                Family::OrderedProbit};
  } else {
    families = {family_from_name(model_name)};
  }

  Manifest manifest;
  manifest.command = "fit";
  manifest.seed = seed;
  manifest.inputs = {data_path};
  manifest.config = {{"data", data_path}, {"all", all}, {"threads", threads}};
  if (!all) manifest.config["model"] = model_name;

  std::vector<FitResult> results;
  for (Family f : families) {
    auto fit = fit_mle(f, data, config, seed);
    const auto path = out / (std::string("fit_") + family_name(f) + ".json");
    write_text(path, fit.to_json_text());
    manifest.outputs.push_back(path.string());
    results.push_back(std::move(fit));
  }

  std::sort(results.begin(), results.end(),
            [](const FitResult& a, const FitResult& b) { return a.bic > b.bic; });

  std::cout << "family,n_params,log_lik,bic,bic_textbook,converged\n";
  std::ostringstream table;
  table << "family,n_params,log_lik,bic,bic_textbook,converged\n";
  table.precision(10);
  std::cout.precision(10);
  for (const auto& r : results) {
    std::ostringstream line;
    line.precision(10);
    line << family_name(family_of(r.model)) << ',' << r.n_params << ',' << r.log_lik << ','
         << r.bic << ',' << r.bic_textbook << ',' << (r.converged ? 1 : 0) << '\n';
    std::cout << line.str();
    table << line.str();
  }
  if (all) {
    const auto table_path = out / "fit_table.csv";
    write_text(table_path, table.str());
    manifest.outputs.push_back(table_path.string());
  }

  if (!curves_path.empty()) {
    write_curves(out / curves_path, results.front().model, curve_tmax);
    manifest.outputs.push_back((out / curves_path).string());
  }
  manifest.write(out);
  return 0;
}

int run_mcmc(const std::string& data_path, const std::string& model_name,
             std::int64_t iters, std::int64_t burn, std::int64_t thin, std::uint64_t seed,
             const std::string& out_dir, bool prior_only, bool no_mle_init) {
  const auto data = load_dataset(data_path);
  const auto out = ensure_out_dir(out_dir);

  SamplerConfig config;
  config.total_iterations = iters;
  config.burn_in = burn;
  config.thin = thin;
  config.seed = seed;
  config.likelihood_off = prior_only;
  config.init_from_mle = !no_mle_init;

  PosteriorSamples samples;
  if (model_name == "hetero") {
    samples = metropolis_fixed(data, PriorSpec{}, config);
  } else if (model_name == "random-effects") {
    samples = sampler_random_effects(data, PriorSpec{}, config);
  } else {
    std::cerr << "mcmc supports --model hetero or random-effects\n";
    return 2;
  }

  const auto csv_path = out / "samples.csv";
  const auto meta_path = out / "samples_meta.json";
  samples.save_csv(csv_path.string());
  write_text(meta_path, samples.sidecar_json());

  json summary;
  summary["parameters"] = summary_to_json(posterior_summary(samples));
  if (model_name == "hetero") {
    const int a = samples.column("lambda_A");
    const int b = samples.column("lambda_B");
    std::size_t b_less = 0;
    for (const auto& row : samples.draws)
      if (row[b] < row[a]) ++b_less;
    summary["prob_lambda_B_less_than_lambda_A"] =
        static_cast<double>(b_less) / static_cast<double>(samples.n_draws());
  }
  const auto summary_path = out / "summary.json";
  write_text(summary_path, summary.dump(2));

  const auto diag_path = out / "diagnostics.json";
  write_text(diag_path, diagnostics(samples).to_json_text());

  for (const auto& w : samples.warnings) std::cerr << "warning: " << w << "\n";

  Manifest manifest;
  manifest.command = "mcmc";
  manifest.seed = seed;
  manifest.inputs = {data_path};
  manifest.config = {{"data", data_path}, {"model", model_name}, {"iters", iters},
                     {"burn", burn},      {"thin", thin},        {"prior_only", prior_only},
                     {"mle_init", !no_mle_init}};
  manifest.outputs = {csv_path.string(), meta_path.string(), summary_path.string(),
                      diag_path.string()};
  manifest.write(out);

  std::cout << "retained " << samples.n_draws() << " draws over " << samples.n_params()
            << " parameters -> " << csv_path.string() << "\n";
  // Outputs are written either way, but a stalled chain is a failed run.
  return samples.warnings.empty() ? 0 : 1;
}

int run_randtest(const std::string& data_path, const std::string& stat_name, int n_perm,
                 std::uint64_t seed, int threads, const std::string& out_dir,
                 bool corrected) {
  const auto data = load_dataset(data_path);
  const auto out = ensure_out_dir(out_dir);
  const auto stat = statistic_from_name(stat_name);
  const auto outcome = randomization_test(data, stat, n_perm, seed, threads);

  const auto json_path = out / ("randtest_" + stat_name + ".json");
  const auto null_path = out / ("randtest_" + stat_name + "_null.csv");
  write_text(json_path, outcome.to_json_text());
  outcome.save_null_csv(null_path.string());

  std::cout << outcome.statistic << ": observed " << outcome.observed << ", p = "
            << outcome.p_value;
  if (corrected) std::cout << " (corrected " << outcome.p_value_corrected() << ")";
  std::cout << "\n";

  Manifest manifest;
  manifest.command = "randtest";
  manifest.seed = seed;
  manifest.inputs = {data_path};
  manifest.config = {{"data", data_path}, {"stat", stat_name}, {"nperm", n_perm},
                     {"threads", threads}};
  manifest.outputs = {json_path.string(), null_path.string()};
  manifest.write(out);
  return 0;
}

int run_ppc(const std::string& data_path, const std::string& samples_path,
            const std::string& sidecar_path, const std::string& model_name,
            const std::string& stat_name, std::uint64_t seed, int threads,
            const std::string& out_dir) {
  const auto data = load_dataset(data_path);
  const auto out = ensure_out_dir(out_dir);
  const auto samples = PosteriorSamples::load_csv(samples_path, sidecar_path);
  const auto family = family_from_name(model_name);
  const auto design = design_of(data);

  std::vector<TestStatistic> stats;
  if (stat_name == "all") {
    stats = {TestStatistic::Slope, TestStatistic::FPlayersA, TestStatistic::FPlayersB,
             TestStatistic::FSessions};
  } else {
    stats = {statistic_from_name(stat_name)};
  }

  Manifest manifest;
  manifest.command = "ppc";
  manifest.seed = seed;
  manifest.inputs = {data_path, samples_path};
  manifest.config = {{"data", data_path}, {"samples", samples_path}, {"model", model_name},
                     {"stat", stat_name}, {"threads", threads}};

  for (std::size_t k = 0; k < stats.size(); ++k) {
    const auto outcome = posterior_predictive_test(samples, family, design, stats[k], data,
                                                   seed + k, threads);
    const std::string name = statistic_name(stats[k]);
    const auto json_path = out / ("ppc_" + name + ".json");
    const auto null_path = out / ("ppc_" + name + "_replicates.csv");
    write_text(json_path, outcome.to_json_text());
    outcome.save_null_csv(null_path.string());
    manifest.outputs.push_back(json_path.string());
    manifest.outputs.push_back(null_path.string());
    std::cout << name << ": observed " << outcome.observed << ", Bayesian p = "
              << outcome.p_value << "\n";
  }
  manifest.write(out);
  return 0;
}

int run_simulate(const std::string& design_arg, const std::string& model_name,
                 const std::map<std::string, double>& params,
                 const std::vector<double>& alpha, const std::vector<double>& hyper,
                 std::uint64_t seed, const std::string& out_dir) {
  const DesignSpec design =
      design_arg == "paper" ? DesignSpec::paper_default() : DesignSpec::load(design_arg);
  const auto out = ensure_out_dir(out_dir);

  auto value = [&](const std::string& key, double fallback) {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };

  SyntheticExperiment exp;
  if (model_name == "random-effects") {
    if (hyper.size() != 8)
      throw std::invalid_argument(
          "--hyper needs 8 values: mu_dA,s2_dA,mu_bA,s2_bA,mu_dB,s2_dB,mu_bB,s2_bB");
    HierarchySpec h;
    h.mu_delta_a = hyper[0];
    h.sigma2_delta_a = hyper[1];
    h.mu_beta_a = hyper[2];
    h.sigma2_beta_a = hyper[3];
    h.mu_delta_b = hyper[4];
    h.sigma2_delta_b = hyper[5];
    h.mu_beta_b = hyper[6];
    h.sigma2_beta_b = hyper[7];
    exp = generate_synthetic(design, h, seed);
  } else {
    ModelSpec model;
    const Family family = family_from_name(model_name);
    switch (family) {
      case Family::OneParam: model = OneParamModel{value("lambda", 1.0)}; break;
      case Family::Learning:
        model = LearningModel{value("lambda", 1.0), value("beta", 0.0)};
        break;
      case Family::Hetero:
        model = HeteroLearningModel{value("lambda_a", 1.0), value("lambda_b", 1.0),
                                    value("beta", 0.0)};
        break;
      case Family::Altruistic:
        model = AltruisticModel{value("lambda", 1.0), value("q_alt", 0.0)};
        break;
      case Family::OrderedProbit: {
        OrderedProbitModel m;
        if (alpha.size() != 4)
          throw std::invalid_argument("--alpha needs 4 increasing thresholds");
        std::copy(alpha.begin(), alpha.end(), m.alpha.begin());
        m.beta = value("beta", 0.0);
        model = m;
        break;
      }
      case Family::RandomEffects: break;  // handled above
    }
    exp = generate_synthetic(design, model, seed);
  }

  const auto data_path = out / "synthetic.csv";
  const auto truth_path = out / "synthetic_truth.json";
  save_dataset(exp.data, data_path.string());
  write_text(truth_path, exp.truth_json());

  Manifest manifest;
  manifest.command = "simulate";
  manifest.seed = seed;
  manifest.config = {{"design", design_arg}, {"model", model_name}};
  manifest.outputs = {data_path.string(), truth_path.string()};
  manifest.write(out);

  std::cout << exp.data.size() << " games -> " << data_path.string() << "\n";
  return 0;
}

int run_validate(const std::string& data_path) {
  const auto data = load_dataset(data_path);
  const auto report = validate_design(data);
  std::cout << report.to_text();
  return report.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QRE learning models for the four-stage centipede game"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string data_path, model_name, out_dir = ".", stat_name = "slope";
  std::string samples_path, sidecar_path, design_arg = "paper", curves_path;
  std::uint64_t seed = 0;
  int threads = 0, n_perm = 1000, curve_tmax = 100;
  bool all_models = false, corrected = false, prior_only = false, no_mle_init = false;
  std::int64_t iters = 500000, burn = 20000, thin = 25;
  double lambda = 1.0, lambda_a = 1.0, lambda_b = 1.0, beta = 0.0, q_alt = 0.0;
  std::vector<double> alpha, hyper;

  auto* fit = app.add_subcommand("fit", "maximum-likelihood fits and BIC comparison");
  fit->add_option("--data", data_path)->required();
  fit->add_option("--model", model_name);
  fit->add_flag("--all", all_models, "fit all five fixed-effect families");
  fit->add_option("--out-dir", out_dir);
  fit->add_option("--seed", seed);
  fit->add_option("--threads", threads);
  fit->add_option("--curves", curves_path, "write theta-vs-t CSV for the best fit");
  fit->add_option("--curve-tmax", curve_tmax);

  auto* mcmc = app.add_subcommand("mcmc", "posterior sampling");
  mcmc->add_option("--data", data_path)->required();
  mcmc->add_option("--model", model_name)->required();
  auto* iters_opt = mcmc->add_option("--iters", iters, "default 500k fixed, 20M hierarchical");
  auto* burn_opt = mcmc->add_option("--burn", burn, "default 20k fixed, 5M hierarchical");
  auto* thin_opt = mcmc->add_option("--thin", thin, "default 25 fixed, 1000 hierarchical");
  mcmc->add_option("--seed", seed);
  mcmc->add_option("--threads", threads, "accepted everywhere; a single chain is sequential");
  mcmc->add_option("--out-dir", out_dir);
  mcmc->add_flag("--prior-only", prior_only, "sample the prior (likelihood off)");
  mcmc->add_flag("--no-mle-init", no_mle_init);

  auto* randtest = app.add_subcommand("randtest", "design-faithful randomization test");
  randtest->add_option("--data", data_path)->required();
  randtest->add_option("--stat", stat_name, "slope | f-players-a | f-players-b");
  randtest->add_option("--nperm", n_perm);
  randtest->add_option("--seed", seed);
  randtest->add_option("--threads", threads);
  randtest->add_option("--out-dir", out_dir);
  randtest->add_flag("--corrected", corrected, "also print the (k+1)/(n+1) p-value");

  auto* ppc = app.add_subcommand("ppc", "posterior predictive tests");
  ppc->add_option("--data", data_path)->required();
  ppc->add_option("--samples", samples_path)->required();
  ppc->add_option("--sidecar", sidecar_path);
  ppc->add_option("--model", model_name)->required();
  ppc->add_option("--stat", stat_name, "slope | f-players-a | f-players-b | f-sessions | all");
  ppc->add_option("--seed", seed);
  ppc->add_option("--threads", threads);
  ppc->add_option("--out-dir", out_dir);

  auto* simulate = app.add_subcommand("simulate", "generate a synthetic experiment");
  simulate->add_option("--design", design_arg, "'paper' or a design JSON path");
  simulate->add_option("--model", model_name)->required();
  simulate->add_option("--lambda", lambda);
  simulate->add_option("--lambda-a", lambda_a);
  simulate->add_option("--lambda-b", lambda_b);
  simulate->add_option("--beta", beta);
  simulate->add_option("--q-alt", q_alt);
  simulate->add_option("--alpha", alpha)->expected(4);
  simulate->add_option("--hyper", hyper)->expected(8);
  simulate->add_option("--seed", seed);
  simulate->add_option("--threads", threads);
  simulate->add_option("--out-dir", out_dir);

  auto* validate = app.add_subcommand("validate", "check the Latin-square design");
  validate->add_option("--data", data_path)->required();
  validate->add_option("--seed", seed);
  validate->add_option("--threads", threads);
  validate->add_option("--out-dir", out_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (fit->parsed()) {
      if (!all_models && model_name.empty()) {
        std::cerr << "fit needs --model or --all\n";
        return 2;
      }
      return run_fit(data_path, model_name, all_models, out_dir, seed, threads, curves_path,
                     curve_tmax);
    }
    if (mcmc->parsed()) {
      if (model_name == "random-effects") {
        if (iters_opt->count() == 0) iters = 20000000;
        if (burn_opt->count() == 0) burn = 5000000;
        if (thin_opt->count() == 0) thin = 1000;
      }
      return run_mcmc(data_path, model_name, iters, burn, thin, seed, out_dir, prior_only,
                      no_mle_init);
    }
    if (randtest->parsed())
      return run_randtest(data_path, stat_name, n_perm, seed, threads, out_dir, corrected);
    if (ppc->parsed())
      return run_ppc(data_path, samples_path, sidecar_path, model_name, stat_name, seed,
                     threads, out_dir);
    if (simulate->parsed()) {
      const std::map<std::string, double> params{{"lambda", lambda},
                                                 {"lambda_a", lambda_a},
                                                 {"lambda_b", lambda_b},
                                                 {"beta", beta},
                                                 {"q_alt", q_alt}};
      return run_simulate(design_arg, model_name, params, alpha, hyper, seed, out_dir);
    }
    if (validate->parsed()) return run_validate(data_path);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
