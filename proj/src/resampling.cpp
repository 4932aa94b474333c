#include "centqre/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

#include "centqre/parallel.hpp"

namespace centqre {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double slope_from_pairs(std::span<const double> t, std::span<const double> y) {
  const std::size_t n = t.size();
  double t_mean = 0.0, y_mean = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    t_mean += t[k];
    y_mean += y[k];
  }
  t_mean /= static_cast<double>(n);
  y_mean /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sxy += (t[k] - t_mean) * (y[k] - y_mean);
    sxx += (t[k] - t_mean) * (t[k] - t_mean);
  }
  if (sxx == 0.0) throw std::domain_error("slope statistic needs two distinct game numbers");
  return sxy / sxx;
}

// groups[k] in [0, n_groups); every group must be nonempty.
double f_from_groups(std::span<const int> groups, std::span<const int> y, int n_groups,
                     bool* degenerate) {
  const std::size_t n = y.size();
  if (degenerate != nullptr) *degenerate = false;
  std::vector<double> sum(n_groups, 0.0);
  std::vector<int> count(n_groups, 0);
  double grand = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sum[groups[k]] += y[k];
    ++count[groups[k]];
    grand += y[k];
  }
  grand /= static_cast<double>(n);
  double ss_between = 0.0, ss_within = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double gm = sum[groups[k]] / count[groups[k]];
    ss_between += (gm - grand) * (gm - grand);
    ss_within += (y[k] - gm) * (y[k] - gm);
  }
  const double df_between = n_groups - 1;
  const double df_within = static_cast<double>(n) - n_groups;
  if (ss_within == 0.0) {
    if (degenerate != nullptr) *degenerate = true;
    return ss_between == 0.0 ? 0.0 : kInf;
  }
  return (ss_between / df_between) / (ss_within / df_within);
}

Grouping grouping_of(TestStatistic s) {
  switch (s) {
    case TestStatistic::FPlayersA: return Grouping::PlayersA;
    case TestStatistic::FPlayersB: return Grouping::PlayersB;
    case TestStatistic::FSessions: return Grouping::Sessions;
    default: throw std::logic_error("not an F statistic");
  }
}

bool lower_tail(TestStatistic s) { return s == TestStatistic::Slope; }

void finish_p_value(TestOutcome& out) {
  std::int64_t extreme = 0;
  const bool lower = out.tail == "lower";
  for (double v : out.null_values) {
    if (lower ? v <= out.observed : v >= out.observed) ++extreme;
  }
  out.p_value = static_cast<double>(extreme) / static_cast<double>(out.null_values.size());
}

// Inverse maps of a square's schedule: which A row played B column c at game
// number r+1, and which B column A row i played at game number u+1.
struct SquareInverses {
  std::vector<int> a_at;  // [r*n + c] -> row i with t(i,c) == r+1
  std::vector<int> b_at;  // [i*n + u] -> column j with t(i,j) == u+1
};

SquareInverses invert_square(const SessionSquare& sq) {
  SquareInverses inv;
  inv.a_at.assign(sq.n * sq.n, -1);
  inv.b_at.assign(sq.n * sq.n, -1);
  for (int i = 0; i < sq.n; ++i) {
    for (int j = 0; j < sq.n; ++j) {
      const int t = sq.t[sq.cell(i, j)];
      inv.a_at[(t - 1) * sq.n + j] = i;
      inv.b_at[i * sq.n + (t - 1)] = j;
    }
  }
  return inv;
}

std::vector<int> random_permutation(int n, Rng& rng) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(std::span<int>(perm));
  return perm;
}

}  // namespace

const char* statistic_name(TestStatistic s) {
  switch (s) {
    case TestStatistic::Slope: return "slope";
    case TestStatistic::FPlayersA: return "f-players-a";
    case TestStatistic::FPlayersB: return "f-players-b";
    case TestStatistic::FSessions: return "f-sessions";
  }
  return "?";
}

TestStatistic statistic_from_name(const std::string& name) {
  for (TestStatistic s : {TestStatistic::Slope, TestStatistic::FPlayersA,
                          TestStatistic::FPlayersB, TestStatistic::FSessions}) {
    if (name == statistic_name(s)) return s;
  }
  throw std::invalid_argument("unknown test statistic: " + name);
}

std::vector<SessionSquare> squares_from_dataset(const Dataset& data) {
  const auto report = validate_design(data);
  if (!report.pass)
    throw std::invalid_argument("dataset is not a valid Latin-square design:\n" +
                                report.to_text());

  // First-appearance order keeps results invariant under session relabeling.
  std::vector<std::string> order;
  for (const auto& r : data.records()) {
    if (std::find(order.begin(), order.end(), r.session) == order.end())
      order.push_back(r.session);
  }

  std::vector<SessionSquare> squares;
  for (const auto& sid : order) {
    for (const auto& layout : data.sessions()) {
      if (layout.id != sid) continue;
      SessionSquare sq;
      sq.session_id = layout.id;
      sq.n = layout.n_a();
      sq.a_ids = layout.a_ids;
      sq.b_ids = layout.b_ids;
      sq.t = layout.t_grid;
      sq.y = layout.y_grid;
      squares.push_back(std::move(sq));
    }
  }
  return squares;
}

SessionSquare permute_session(const SessionSquare& square, Rng& rng) {
  const auto rows = random_permutation(square.n, rng);
  const auto cols = random_permutation(square.n, rng);
  SessionSquare out = square;
  for (int i = 0; i < square.n; ++i)
    for (int j = 0; j < square.n; ++j)
      out.t[out.cell(i, j)] = square.t[square.cell(rows[i], cols[j])];
  return out;
}

double slope_statistic(const Dataset& data) {
  if (data.empty()) throw std::domain_error("slope statistic: empty dataset");
  std::vector<double> t(data.size()), y(data.size());
  for (std::size_t k = 0; k < data.size(); ++k) {
    t[k] = data.records()[k].t;
    y[k] = data.records()[k].y;
  }
  return slope_from_pairs(t, y);
}

double f_statistic(const Dataset& data, Grouping grouping, bool* degenerate) {
  if (data.empty()) throw std::domain_error("F statistic: empty dataset");
  std::vector<int> groups(data.size());
  std::vector<int> y(data.size());
  int n_groups = 0;
  switch (grouping) {
    case Grouping::PlayersA: n_groups = data.n_subjects_a(); break;
    case Grouping::PlayersB: n_groups = data.n_subjects_b(); break;
    case Grouping::Sessions: n_groups = static_cast<int>(data.sessions().size()); break;
  }
  if (n_groups < 2) throw std::domain_error("F statistic needs at least two groups");
  for (std::size_t k = 0; k < data.size(); ++k) {
    const auto& ctx = data.context(k);
    switch (grouping) {
      case Grouping::PlayersA: groups[k] = ctx.a_index; break;
      case Grouping::PlayersB: groups[k] = ctx.b_index; break;
      case Grouping::Sessions: groups[k] = ctx.session_index; break;
    }
    y[k] = data.records()[k].y;
  }
  return f_from_groups(groups, y, n_groups, degenerate);
}

double TestOutcome::p_value_corrected() const {
  std::int64_t extreme = 0;
  const bool lower = tail == "lower";
  for (double v : null_values) {
    if (lower ? v <= observed : v >= observed) ++extreme;
  }
  return static_cast<double>(extreme + 1) / static_cast<double>(null_values.size() + 1);
}

std::string TestOutcome::to_json_text() const {
  nlohmann::json j;
  j["statistic"] = statistic;
  j["tail"] = tail;
  j["observed"] = observed;
  j["observed_degenerate"] = observed_degenerate;
  j["n_null"] = null_values.size();
  j["p_value"] = p_value;
  j["p_value_corrected"] = p_value_corrected();
  return j.dump(2);
}

void TestOutcome::write_null_csv(std::ostream& out) const {
  out << statistic << "\n";
  out.precision(17);
  for (double v : null_values) out << v << "\n";
}

void TestOutcome::save_null_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write: " + path);
  write_null_csv(out);
}

TestOutcome randomization_test(const Dataset& data, TestStatistic statistic, int n_perm,
                               std::uint64_t seed, int threads) {
  if (statistic == TestStatistic::FSessions)
    throw std::invalid_argument(
        "sessions F has no design-faithful randomization test: subjects are nested within "
        "sessions, and moving one across sessions destroys the Latin square; use the "
        "posterior predictive test instead");
  if (n_perm < 1) throw std::invalid_argument("n_perm must be >= 1");

  const auto squares = squares_from_dataset(data);
  TestOutcome out;
  out.statistic = statistic_name(statistic);
  out.tail = lower_tail(statistic) ? "lower" : "upper";
  out.null_values.assign(n_perm, 0.0);

  if (statistic == TestStatistic::Slope) {
    out.observed = slope_statistic(data);
    const std::size_t total = data.size();
    parallel_index(n_perm, threads, [&](std::int64_t k) {
      Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(k));
      std::vector<double> t(total), y(total);
      std::size_t pos = 0;
      for (const auto& sq : squares) {
        const auto rows = random_permutation(sq.n, rng);
        const auto cols = random_permutation(sq.n, rng);
        for (int i = 0; i < sq.n; ++i) {
          for (int j = 0; j < sq.n; ++j) {
            t[pos] = sq.t[sq.cell(rows[i], cols[j])];
            y[pos] = sq.y[sq.cell(i, j)];
            ++pos;
          }
        }
      }
      out.null_values[k] = slope_from_pairs(t, y);
    });
    finish_p_value(out);
    return out;
  }

  // F tests: reassign the tested role while the complementary (role, game
  // number) layout and its outcomes stay fixed. For Players A the time-rows
  // of the A-assignment grid are permuted; for Players B the time-columns of
  // the B-assignment grid.
  const bool test_a = statistic == TestStatistic::FPlayersA;
  out.observed = f_statistic(data, test_a ? Grouping::PlayersA : Grouping::PlayersB,
                             &out.observed_degenerate);

  std::vector<SquareInverses> inverses;
  inverses.reserve(squares.size());
  for (const auto& sq : squares) inverses.push_back(invert_square(sq));

  std::vector<int> offsets(squares.size() + 1, 0);
  for (std::size_t s = 0; s < squares.size(); ++s) offsets[s + 1] = offsets[s] + squares[s].n;
  const int n_groups = offsets.back();
  const std::size_t total = data.size();

  parallel_index(n_perm, threads, [&](std::int64_t k) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(k));
    std::vector<int> groups(total);
    std::vector<int> ys(total);
    std::size_t pos = 0;
    for (std::size_t s = 0; s < squares.size(); ++s) {
      const auto& sq = squares[s];
      const auto& inv = inverses[s];
      const auto perm = random_permutation(sq.n, rng);
      if (test_a) {
        // Cell (game number r+1, B column c) keeps its outcome; the A playing
        // it comes from time-row perm[r].
        for (int r = 0; r < sq.n; ++r) {
          for (int c = 0; c < sq.n; ++c) {
            groups[pos] = offsets[s] + inv.a_at[perm[r] * sq.n + c];
            ys[pos] = sq.y[sq.cell(inv.a_at[r * sq.n + c], c)];
            ++pos;
          }
        }
      } else {
        // Cell (A row i, game number u+1) keeps its outcome; the B playing it
        // comes from time-column perm[u].
        for (int i = 0; i < sq.n; ++i) {
          for (int u = 0; u < sq.n; ++u) {
            groups[pos] = offsets[s] + inv.b_at[i * sq.n + perm[u]];
            ys[pos] = sq.y[sq.cell(i, inv.b_at[i * sq.n + u])];
            ++pos;
          }
        }
      }
    }
    bool degenerate = false;
    out.null_values[k] = f_from_groups(groups, ys, n_groups, &degenerate);
  });
  finish_p_value(out);
  return out;
}

Dataset simulate_replicate(const ModelSpec& model, const DesignSpec& design, Rng& rng) {
  return sample_dataset(model, design, rng);
}

ModelSpec model_from_draw(const PosteriorSamples& samples, Family family, std::size_t draw) {
  const auto& row = samples.draws.at(draw);
  auto value = [&](const std::string& name) {
    const int col = samples.column(name);
    if (col < 0) throw std::invalid_argument("samples are missing column " + name);
    return row[col];
  };
  switch (family) {
    case Family::OneParam:
      return OneParamModel{value("lambda")};
    case Family::Learning:
      return LearningModel{value("lambda"), value("beta")};
    case Family::Hetero:
      return HeteroLearningModel{value("lambda_A"), value("lambda_B"), value("beta")};
    case Family::Altruistic:
      return AltruisticModel{value("lambda"), value("q_alt")};
    case Family::OrderedProbit: {
      OrderedProbitModel m;
      for (int k = 0; k < 4; ++k) m.alpha[k] = value("alpha" + std::to_string(k + 1));
      m.beta = value("beta");
      return m;
    }
    case Family::RandomEffects: {
      RandomEffectsModel m;
      for (std::size_t c = 0; c < samples.names.size(); ++c) {
        const auto& name = samples.names[c];
        auto push_indexed = [&](const std::string& prefix, std::vector<double>& dest) {
          if (name.rfind(prefix, 0) != 0) return false;
          const std::size_t idx = std::stoul(name.substr(prefix.size()));
          if (dest.size() <= idx) dest.resize(idx + 1);
          dest[idx] = row[c];
          return true;
        };
        push_indexed("delta_A[", m.delta_a) || push_indexed("beta_A[", m.beta_a) ||
            push_indexed("delta_B[", m.delta_b) || push_indexed("beta_B[", m.beta_b);
      }
      if (m.delta_a.empty() || m.delta_b.empty())
        throw std::invalid_argument("samples carry no subject-level columns");
      return m;
    }
  }
  throw std::invalid_argument("unknown family");
}

TestOutcome posterior_predictive_test(const PosteriorSamples& samples, Family family,
                                      const DesignSpec& design, TestStatistic statistic,
                                      const Dataset& observed, std::uint64_t seed,
                                      int threads) {
  if (!designs_match(design, observed))
    throw std::invalid_argument(
        "posterior predictive test: design does not match the observed data");
  if (samples.n_draws() == 0) throw std::invalid_argument("no retained draws");

  TestOutcome out;
  out.statistic = statistic_name(statistic);
  out.tail = lower_tail(statistic) ? "lower" : "upper";
  if (statistic == TestStatistic::Slope) {
    out.observed = slope_statistic(observed);
  } else {
    out.observed = f_statistic(observed, grouping_of(statistic), &out.observed_degenerate);
  }

  const auto n_rep = static_cast<std::int64_t>(samples.n_draws());
  out.null_values.assign(n_rep, 0.0);
  parallel_index(n_rep, threads, [&](std::int64_t k) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(k));
    const ModelSpec model = model_from_draw(samples, family, static_cast<std::size_t>(k));
    const Dataset rep = simulate_replicate(model, design, rng);
    if (statistic == TestStatistic::Slope) {
      out.null_values[k] = slope_statistic(rep);
    } else {
      out.null_values[k] = f_statistic(rep, grouping_of(statistic));
    }
  });
  finish_p_value(out);
  return out;
}

}  // namespace centqre
