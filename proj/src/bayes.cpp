#include "centqre/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "centqre/inference.hpp"
#include "centqre/rng.hpp"

namespace centqre {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double normal_lpdf(double x, const NormalPrior& prior) {
  const double d = x - prior.mean;
  return -0.5 * std::log(kTwoPi * prior.var) - d * d / (2.0 * prior.var);
}

void check_config(const SamplerConfig& config) {
  if (config.total_iterations < 1) throw std::invalid_argument("total_iterations must be >= 1");
  if (config.burn_in < 0 || config.burn_in >= config.total_iterations)
    throw std::invalid_argument("burn_in must be in [0, total_iterations)");
  if (config.thin < 1) throw std::invalid_argument("thin must be >= 1");
}

// Bookkeeping for one Metropolis-updated coordinate: windowed adaptation
// during burn-in toward a 30-45% acceptance band, frozen afterwards.
struct SiteAdapter {
  double scale = 0.5;
  int window_proposals = 0;
  int window_accepts = 0;
  std::int64_t post_burn_proposals = 0;
  std::int64_t post_burn_accepts = 0;

  static constexpr int kWindow = 200;

  void record(bool accepted, bool in_burnin, bool adapt) {
    if (in_burnin) {
      ++window_proposals;
      if (accepted) ++window_accepts;
      if (adapt && window_proposals == kWindow) {
        const double rate = static_cast<double>(window_accepts) / kWindow;
        if (rate < 0.30) scale *= 0.8;
        if (rate > 0.45) scale *= 1.25;
        window_proposals = 0;
        window_accepts = 0;
      }
    } else {
      ++post_burn_proposals;
      if (accepted) ++post_burn_accepts;
    }
  }

  double acceptance() const {
    return post_burn_proposals == 0
               ? 0.0
               : static_cast<double>(post_burn_accepts) / post_burn_proposals;
  }
};

}  // namespace

std::int64_t retained_draw_count(const SamplerConfig& config) {
  return (config.total_iterations - config.burn_in) / config.thin;
}

int PosteriorSamples::column(const std::string& name) const {
  for (std::size_t k = 0; k < names.size(); ++k)
    if (names[k] == name) return static_cast<int>(k);
  return -1;
}

std::vector<double> PosteriorSamples::column_values(int col) const {
  std::vector<double> out(draws.size());
  for (std::size_t k = 0; k < draws.size(); ++k) out[k] = draws[k][col];
  return out;
}

void PosteriorSamples::write_csv(std::ostream& out) const {
  for (std::size_t k = 0; k < names.size(); ++k) out << (k ? "," : "") << names[k];
  out << "\n";
  out << std::setprecision(17);
  for (const auto& row : draws) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << row[k];
    out << "\n";
  }
}

void PosteriorSamples::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write samples: " + path);
  write_csv(out);
}

std::string PosteriorSamples::sidecar_json() const {
  nlohmann::json j;
  j["names"] = names;
  j["acceptance_rates"] = acceptance_rates;
  j["warnings"] = warnings;
  j["total_iterations"] = total_iterations;
  j["burn_in"] = burn_in;
  j["thin"] = thin;
  j["seed"] = seed;
  j["n_chains"] = n_chains;
  j["retained"] = draws.size();
  return j.dump(2);
}

PosteriorSamples PosteriorSamples::load_csv(const std::string& csv_path,
                                            const std::string& sidecar_path) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot open samples: " + csv_path);
  PosteriorSamples s;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("samples CSV is empty: " + csv_path);
  {
    std::stringstream header(line);
    std::string name;
    while (std::getline(header, name, ',')) s.names.push_back(name);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    row.reserve(s.names.size());
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) row.push_back(std::stod(field));
    if (row.size() != s.names.size())
      throw std::runtime_error("samples CSV row width mismatch in " + csv_path);
    s.draws.push_back(std::move(row));
  }
  if (!sidecar_path.empty()) {
    std::ifstream sj(sidecar_path);
    if (!sj) throw std::runtime_error("cannot open samples sidecar: " + sidecar_path);
    nlohmann::json j;
    sj >> j;
    s.acceptance_rates = j.value("acceptance_rates", std::vector<double>{});
    s.warnings = j.value("warnings", std::vector<std::string>{});
    s.total_iterations = j.value("total_iterations", std::int64_t{0});
    s.burn_in = j.value("burn_in", std::int64_t{0});
    s.thin = j.value("thin", std::int64_t{1});
    s.seed = j.value("seed", std::uint64_t{0});
    s.n_chains = j.value("n_chains", 1);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Fixed-effects Metropolis
// ---------------------------------------------------------------------------

PosteriorSamples metropolis_fixed(const Dataset& data, const PriorSpec& priors,
                                  const SamplerConfig& config) {
  check_config(config);
  const bool use_lik = !config.likelihood_off;
  if (use_lik && data.empty()) throw std::domain_error("metropolis_fixed: empty dataset");

  std::array<double, 3> x{};  // (log lambda_A, log lambda_B, beta)
  if (!config.init.empty()) {
    if (config.init.size() != 3)
      throw std::invalid_argument("fixed-effects init needs 3 coordinates");
    std::copy(config.init.begin(), config.init.end(), x.begin());
  } else if (use_lik && config.init_from_mle) {
    FitConfig fc;
    fc.max_iterations = 2000;
    const auto fit = fit_mle(Family::Hetero, data, fc);
    const auto& m = std::get<HeteroLearningModel>(fit.model);
    x = {std::log(m.lambda_a), std::log(m.lambda_b), m.beta};
  } else {
    x = {priors.log_lambda_a.mean, priors.log_lambda_b.mean, priors.beta.mean};
  }

  const std::array<const NormalPrior*, 3> prior{&priors.log_lambda_a, &priors.log_lambda_b,
                                                &priors.beta};
  auto log_post = [&](const std::array<double, 3>& v) {
    double lp = 0.0;
    for (int j = 0; j < 3; ++j) lp += normal_lpdf(v[j], *prior[j]);
    if (use_lik)
      lp += log_likelihood(HeteroLearningModel{std::exp(v[0]), std::exp(v[1]), v[2]}, data);
    return lp;
  };

  double current = log_post(x);
  if (!std::isfinite(current))
    throw std::runtime_error(
        "metropolis_fixed: non-finite log posterior at the initial point; supply a different "
        "start via config.init");

  std::array<SiteAdapter, 3> sites;
  sites[0].scale = sites[1].scale = 0.5;
  sites[2].scale = 0.1;
  if (!config.proposal_scales.empty()) {
    if (config.proposal_scales.size() != 3)
      throw std::invalid_argument("fixed-effects proposal_scales needs 3 entries");
    for (int j = 0; j < 3; ++j) sites[j].scale = config.proposal_scales[j];
  }

  PosteriorSamples out;
  out.names = {"lambda_A", "lambda_B", "beta"};
  out.total_iterations = config.total_iterations;
  out.burn_in = config.burn_in;
  out.thin = config.thin;
  out.seed = config.seed;
  out.draws.reserve(retained_draw_count(config));

  Rng rng = Rng::stream(config.seed, 0);
  for (std::int64_t it = 1; it <= config.total_iterations; ++it) {
    const bool in_burnin = it <= config.burn_in;
    for (int j = 0; j < 3; ++j) {
      auto prop = x;
      prop[j] += sites[j].scale * rng.normal();
      const double lp = log_post(prop);
      const bool accept = std::log(rng.uniform()) < lp - current;
      if (accept) {
        x = prop;
        current = lp;
      }
      sites[j].record(accept, in_burnin, config.adapt_during_burnin);
    }
    if (!in_burnin && (it - config.burn_in) % config.thin == 0)
      out.draws.push_back({std::exp(x[0]), std::exp(x[1]), x[2]});
  }

  for (const auto& site : sites) out.acceptance_rates.push_back(site.acceptance());
  for (int j = 0; j < 3; ++j) {
    if (out.acceptance_rates[j] < 0.01)
      out.warnings.push_back("stalled parameter " + out.names[j] + ": acceptance " +
                             std::to_string(out.acceptance_rates[j]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hierarchical Gibbs-within-Metropolis
// ---------------------------------------------------------------------------

NormalPosterior normal_mean_conditional(std::span<const double> values, double sigma2,
                                        const NormalPrior& prior) {
  if (!(sigma2 > 0.0)) throw std::domain_error("sigma2 must be positive");
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double prec = n / sigma2 + 1.0 / prior.var;
  NormalPosterior post;
  post.var = 1.0 / prec;
  post.mean = post.var * (sum / sigma2 + prior.mean / prior.var);
  return post;
}

InverseGammaPrior sigma2_conditional(std::span<const double> values, double mu,
                                     const InverseGammaPrior& prior) {
  InverseGammaPrior post;
  post.shape = prior.shape + 0.5 * static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mu) * (v - mu);
  post.scale = prior.scale + 0.5 * ss;
  return post;
}

namespace {

// Sampler state: subject parameters plus the population blocks in the fixed
// order delta_A, delta_B, beta_A, beta_B.
struct ReState {
  std::vector<double> delta_a, beta_a, delta_b, beta_b;
  std::array<double, 4> mu{};
  std::array<double, 4> sigma2{1.0, 1.0, 1.0, 1.0};
};

double outcome_log_prob(const DecisionProfile& pr, int y) {
  const double p = outcome_distribution(pr)[y];
  return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
}

// Log-likelihood of one whole session under the current state. A subject's
// parameters reach every game of the session through the belief means, so a
// single-site proposal has to be scored against the session, not just the
// subject's own games.
double session_loglik(const Dataset& data, int s, const ReState& st,
                      const std::vector<int>& session_records,
                      std::vector<BeliefProfile>& profile_scratch) {
  const auto& layout = data.sessions()[s];
  const int na = layout.n_a(), nb = layout.n_b();
  BeliefMeans bm;
  for (int k = 0; k < na; ++k) {
    bm.delta_bar_a += st.delta_a[data.a_offset(s) + k];
    bm.beta_bar_a += st.beta_a[data.a_offset(s) + k];
  }
  for (int k = 0; k < nb; ++k) {
    bm.delta_bar_b += st.delta_b[data.b_offset(s) + k];
    bm.beta_bar_b += st.beta_b[data.b_offset(s) + k];
  }
  bm.delta_bar_a /= na;
  bm.beta_bar_a /= na;
  bm.delta_bar_b /= nb;
  bm.beta_bar_b /= nb;

  int tmax = 0;
  for (int cell : layout.t_grid) tmax = std::max(tmax, cell);
  profile_scratch.resize(tmax);
  for (int t = 1; t <= tmax; ++t) profile_scratch[t - 1] = belief_profile(bm, t);

  double total = 0.0;
  for (int k : session_records) {
    const auto& ctx = data.context(k);
    const auto& bp = profile_scratch[ctx.t - 1];
    const auto [p1, p2] = own_probs_a({st.delta_a[ctx.a_index], st.beta_a[ctx.a_index]}, bp,
                                      ctx.t);
    const auto [q1, q2] = own_probs_b({st.delta_b[ctx.b_index], st.beta_b[ctx.b_index]}, bp,
                                      ctx.t);
    total += outcome_log_prob({p1, q1, p2, q2}, data.records()[k].y);
  }
  return total;
}

}  // namespace

PosteriorSamples sampler_random_effects(const Dataset& data, const PriorSpec& priors,
                                        const SamplerConfig& config) {
  check_config(config);
  if (data.empty()) throw std::domain_error("sampler_random_effects: empty dataset");
  const bool use_lik = !config.likelihood_off;
  const int na = data.n_subjects_a();
  const int nb = data.n_subjects_b();

  ReState st;
  st.delta_a.assign(na, 0.0);
  st.beta_a.assign(na, 0.0);
  st.delta_b.assign(nb, 0.0);
  st.beta_b.assign(nb, 0.0);
  if (use_lik && config.init_from_mle) {
    FitConfig fc;
    fc.max_iterations = 2000;
    const auto fit = fit_mle(Family::Hetero, data, fc);
    const auto& m = std::get<HeteroLearningModel>(fit.model);
    std::fill(st.delta_a.begin(), st.delta_a.end(), std::log(m.lambda_a));
    std::fill(st.delta_b.begin(), st.delta_b.end(), std::log(m.lambda_b));
    st.mu = {std::log(m.lambda_a), std::log(m.lambda_b), 0.0, 0.0};
  }

  PosteriorSamples out;
  out.names = {"mu_delta_A", "mu_delta_B", "mu_beta_A", "mu_beta_B",
               "sigma2_delta_A", "sigma2_delta_B", "sigma2_beta_A", "sigma2_beta_B"};
  for (int i = 0; i < na; ++i) out.names.push_back("delta_A[" + std::to_string(i) + "]");
  for (int i = 0; i < na; ++i) out.names.push_back("beta_A[" + std::to_string(i) + "]");
  for (int j = 0; j < nb; ++j) out.names.push_back("delta_B[" + std::to_string(j) + "]");
  for (int j = 0; j < nb; ++j) out.names.push_back("beta_B[" + std::to_string(j) + "]");
  out.total_iterations = config.total_iterations;
  out.burn_in = config.burn_in;
  out.thin = config.thin;
  out.seed = config.seed;
  out.draws.reserve(retained_draw_count(config));

  const int n_subject_params = 2 * na + 2 * nb;
  std::vector<SiteAdapter> sites(n_subject_params);
  for (int i = 0; i < na; ++i) {
    sites[2 * i].scale = 0.5;      // delta_A[i]
    sites[2 * i + 1].scale = 0.1;  // beta_A[i]
  }
  for (int j = 0; j < nb; ++j) {
    sites[2 * na + 2 * j].scale = 0.5;
    sites[2 * na + 2 * j + 1].scale = 0.1;
  }
  if (!config.proposal_scales.empty()) {
    if (config.proposal_scales.size() != static_cast<std::size_t>(n_subject_params))
      throw std::invalid_argument("proposal_scales must cover every subject parameter");
    for (int k = 0; k < n_subject_params; ++k) sites[k].scale = config.proposal_scales[k];
  }

  const std::array<const NormalPrior*, 4> mu_prior{&priors.mu_delta_a, &priors.mu_delta_b,
                                                   &priors.mu_beta_a, &priors.mu_beta_b};
  const std::array<const InverseGammaPrior*, 4> s2_prior{
      &priors.sigma2_delta_a, &priors.sigma2_delta_b, &priors.sigma2_beta_a,
      &priors.sigma2_beta_b};

  const int n_sessions = static_cast<int>(data.sessions().size());
  std::vector<std::vector<int>> session_records(n_sessions);
  for (std::size_t k = 0; k < data.size(); ++k)
    session_records[data.context(k).session_index].push_back(static_cast<int>(k));
  std::vector<BeliefProfile> scratch;
  Rng rng = Rng::stream(config.seed, 0);

  auto subject_values = [&](int block) -> std::span<const double> {
    switch (block) {
      case 0: return st.delta_a;
      case 1: return st.delta_b;
      case 2: return st.beta_a;
      default: return st.beta_b;
    }
  };

  for (std::int64_t it = 1; it <= config.total_iterations; ++it) {
    const bool in_burnin = it <= config.burn_in;

    // (a) conjugate draws for the four population means
    for (int block = 0; block < 4; ++block) {
      const auto post =
          normal_mean_conditional(subject_values(block), st.sigma2[block], *mu_prior[block]);
      st.mu[block] = rng.normal(post.mean, std::sqrt(post.var));
    }
    // (b) conjugate draws for the four population variances
    for (int block = 0; block < 4; ++block) {
      const auto post =
          sigma2_conditional(subject_values(block), st.mu[block], *s2_prior[block]);
      st.sigma2[block] = rng.inverse_gamma(post.shape, post.scale);
    }

    // (c) session-by-session subject updates. Each proposal is scored against
    // its whole session because the belief means move with the subject.
    for (int s = 0; s < n_sessions; ++s) {
      double cur_ll =
          use_lik ? session_loglik(data, s, st, session_records[s], scratch) : 0.0;
      const auto& layout = data.sessions()[s];

      auto metropolis_site = [&](double& value, SiteAdapter& site, int block) {
        const double old = value;
        value = old + site.scale * rng.normal();
        const double prop_ll =
            use_lik ? session_loglik(data, s, st, session_records[s], scratch) : 0.0;
        const double delta_lp = prop_ll - cur_ll +
                                normal_lpdf(value, {st.mu[block], st.sigma2[block]}) -
                                normal_lpdf(old, {st.mu[block], st.sigma2[block]});
        const bool accept = std::log(rng.uniform()) < delta_lp;
        if (accept) {
          cur_ll = prop_ll;
        } else {
          value = old;
        }
        site.record(accept, in_burnin, config.adapt_during_burnin);
      };

      for (int local = 0; local < layout.n_a(); ++local) {
        const int i = data.a_offset(s) + local;
        metropolis_site(st.delta_a[i], sites[2 * i], 0);
        metropolis_site(st.beta_a[i], sites[2 * i + 1], 2);
      }
      for (int local = 0; local < layout.n_b(); ++local) {
        const int j = data.b_offset(s) + local;
        metropolis_site(st.delta_b[j], sites[2 * na + 2 * j], 1);
        metropolis_site(st.beta_b[j], sites[2 * na + 2 * j + 1], 3);
      }
    }

    if (!in_burnin && (it - config.burn_in) % config.thin == 0) {
      std::vector<double> row;
      row.reserve(out.names.size());
      row.insert(row.end(), {st.mu[0], st.mu[1], st.mu[2], st.mu[3]});
      row.insert(row.end(), {st.sigma2[0], st.sigma2[1], st.sigma2[2], st.sigma2[3]});
      row.insert(row.end(), st.delta_a.begin(), st.delta_a.end());
      row.insert(row.end(), st.beta_a.begin(), st.beta_a.end());
      row.insert(row.end(), st.delta_b.begin(), st.delta_b.end());
      row.insert(row.end(), st.beta_b.begin(), st.beta_b.end());
      out.draws.push_back(std::move(row));
    }
  }

  out.acceptance_rates.assign(8, 1.0);  // conjugate blocks always move
  // Column order after the hyperparameters is delta_A[..], beta_A[..],
  // delta_B[..], beta_B[..]; the site array is interleaved per subject.
  std::vector<double> subject_rates(n_subject_params, 0.0);
  for (int i = 0; i < na; ++i) {
    subject_rates[i] = sites[2 * i].acceptance();
    subject_rates[na + i] = sites[2 * i + 1].acceptance();
  }
  for (int j = 0; j < nb; ++j) {
    subject_rates[2 * na + j] = sites[2 * na + 2 * j].acceptance();
    subject_rates[2 * na + nb + j] = sites[2 * na + 2 * j + 1].acceptance();
  }
  out.acceptance_rates.insert(out.acceptance_rates.end(), subject_rates.begin(),
                              subject_rates.end());
  for (std::size_t k = 8; k < out.names.size(); ++k) {
    if (out.acceptance_rates[k] < 0.01)
      out.warnings.push_back("stalled parameter " + out.names[k] + ": acceptance " +
                             std::to_string(out.acceptance_rates[k]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Summaries and diagnostics
// ---------------------------------------------------------------------------

double empirical_quantile(std::vector<double> values, double p) {
  if (values.empty()) throw std::domain_error("quantile of empty vector");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

std::vector<ParameterSummary> posterior_summary(const PosteriorSamples& samples) {
  if (samples.n_draws() < 100)
    throw std::invalid_argument("posterior_summary requires at least 100 retained draws");
  std::vector<ParameterSummary> rows;
  for (int c = 0; c < samples.n_params(); ++c) {
    auto col = samples.column_values(c);
    ParameterSummary row;
    row.name = samples.names[c];
    double sum = 0.0;
    std::size_t positive = 0;
    for (double v : col) {
      sum += v;
      if (v > 0.0) ++positive;
    }
    row.mean = sum / static_cast<double>(col.size());
    row.prob_positive = static_cast<double>(positive) / static_cast<double>(col.size());
    row.median = empirical_quantile(col, 0.5);
    row.q025 = empirical_quantile(col, 0.025);
    row.q975 = empirical_quantile(col, 0.975);
    rows.push_back(std::move(row));
  }
  return rows;
}

double effective_sample_size(std::span<const double> chain) {
  const auto n = static_cast<std::int64_t>(chain.size());
  if (n < 4) return static_cast<double>(n);
  double mean = 0.0;
  for (double v : chain) mean += v;
  mean /= static_cast<double>(n);
  double c0 = 0.0;
  for (double v : chain) c0 += (v - mean) * (v - mean);
  c0 /= static_cast<double>(n);
  if (c0 == 0.0) return static_cast<double>(n);

  // Sum autocorrelations until the first non-positive one.
  double rho_sum = 0.0;
  for (std::int64_t lag = 1; lag < n - 1; ++lag) {
    double ck = 0.0;
    for (std::int64_t i = 0; i < n - lag; ++i)
      ck += (chain[i] - mean) * (chain[i + lag] - mean);
    ck /= static_cast<double>(n);
    const double rho = ck / c0;
    if (rho <= 0.0) break;
    rho_sum += rho;
  }
  const double ess = static_cast<double>(n) / (1.0 + 2.0 * rho_sum);
  return ess > 1.0 ? ess : 1.0;
}

double split_rhat(const std::vector<std::vector<double>>& chains) {
  std::vector<std::span<const double>> halves;
  for (const auto& chain : chains) {
    const std::size_t half = chain.size() / 2;
    if (half < 2) throw std::invalid_argument("split_rhat needs chains of length >= 4");
    halves.emplace_back(chain.data(), half);
    halves.emplace_back(chain.data() + (chain.size() - half), half);
  }
  const auto m = static_cast<double>(halves.size());
  const auto n = static_cast<double>(halves.front().size());

  std::vector<double> means;
  double w = 0.0;
  for (const auto& h : halves) {
    double mean = 0.0;
    for (double v : h) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : h) var += (v - mean) * (v - mean);
    var /= (n - 1.0);
    means.push_back(mean);
    w += var / m;
  }
  double grand = 0.0;
  for (double v : means) grand += v / m;
  double b = 0.0;
  for (double v : means) b += (v - grand) * (v - grand);
  b *= n / (m - 1.0);

  if (w == 0.0) return 1.0;
  const double vhat = (n - 1.0) / n * w + b / n;
  return std::sqrt(vhat / w);
}

DiagnosticReport diagnostics(const PosteriorSamples& samples) {
  const std::size_t n = samples.n_draws();
  if (samples.n_chains < 2 && n < 200)
    throw std::invalid_argument("diagnostics requires >= 2 chains or >= 200 draws");
  const int chains = samples.n_chains > 0 ? samples.n_chains : 1;
  const std::size_t per_chain = n / static_cast<std::size_t>(chains);
  if (per_chain < 4) throw std::invalid_argument("diagnostics: chains too short");

  DiagnosticReport report;
  for (int c = 0; c < samples.n_params(); ++c) {
    const auto col = samples.column_values(c);
    std::vector<std::vector<double>> split;
    for (int ch = 0; ch < chains; ++ch) {
      split.emplace_back(col.begin() + static_cast<std::ptrdiff_t>(ch * per_chain),
                         col.begin() + static_cast<std::ptrdiff_t>((ch + 1) * per_chain));
    }
    DiagnosticRow row;
    row.name = samples.names[c];
    row.ess = 0.0;
    for (const auto& chain : split) row.ess += effective_sample_size(chain);
    row.rhat = split_rhat(split);
    row.acceptance = c < static_cast<int>(samples.acceptance_rates.size())
                         ? samples.acceptance_rates[c]
                         : 0.0;
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string DiagnosticReport::to_json_text() const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& row : rows) {
    j.push_back({{"name", row.name},
                 {"ess", row.ess},
                 {"rhat", row.rhat},
                 {"acceptance", row.acceptance}});
  }
  return j.dump(2);
}

}  // namespace centqre
