#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "centqre/resampling.hpp"

using namespace centqre;

namespace {

bool is_latin(const SessionSquare& sq) {
  for (int i = 0; i < sq.n; ++i) {
    std::set<int> row, col;
    for (int j = 0; j < sq.n; ++j) {
      row.insert(sq.t[sq.cell(i, j)]);
      col.insert(sq.t[sq.cell(j, i)]);
    }
    if (static_cast<int>(row.size()) != sq.n || *row.begin() != 1 || *row.rbegin() != sq.n)
      return false;
    if (static_cast<int>(col.size()) != sq.n) return false;
  }
  return true;
}

Dataset constant_outcome_dataset(int n, int y) {
  const auto design = DesignSpec::cyclic({n});
  std::vector<GameRecord> records;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      records.push_back({"1", std::to_string(i + 1), std::to_string(j + 1),
                         design.sessions[0].at(i, j), y});
  return Dataset::from_records(std::move(records));
}

}  // namespace

TEST_SUITE("resampling") {

TEST_CASE("slope statistic worked examples") {
  CHECK(slope_statistic(constant_outcome_dataset(6, 3)) == doctest::Approx(0.0));

  // y == t on a 5x5 square: perfect line, slope one.
  const auto design = DesignSpec::cyclic({5});
  std::vector<GameRecord> records;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      const int t = design.sessions[0].at(i, j);
      records.push_back({"1", std::to_string(i + 1), std::to_string(j + 1), t, t});
    }
  CHECK(slope_statistic(Dataset::from_records(records)) == doctest::Approx(1.0));

  // A single game has only one t value.
  const auto tiny = Dataset::from_records({{"1", "1", "1", 1, 3}});
  CHECK_THROWS_AS(slope_statistic(tiny), std::domain_error);
}

TEST_CASE("F statistic degenerate guards") {
  bool degenerate = false;
  CHECK(f_statistic(constant_outcome_dataset(4, 2), Grouping::PlayersA, &degenerate) == 0.0);
  CHECK(degenerate);

  // Two A rows with internally constant but different outcomes: zero within,
  // positive between.
  std::vector<GameRecord> records{{"1", "1", "1", 1, 1},
                                  {"1", "1", "2", 2, 1},
                                  {"1", "2", "1", 2, 5},
                                  {"1", "2", "2", 1, 5}};
  const auto data = Dataset::from_records(records);
  CHECK(f_statistic(data, Grouping::PlayersA, &degenerate) ==
        std::numeric_limits<double>::infinity());
  CHECK(degenerate);
  CHECK(std::isfinite(f_statistic(data, Grouping::PlayersB, &degenerate)));
}

TEST_CASE("null F concentrates near one") {
  // Outcomes share one distribution, so between/within mean squares agree.
  double mean_f = 0.0;
  const int sims = 1000;
  for (int s = 0; s < sims; ++s) {
    const auto exp = generate_synthetic(DesignSpec::cyclic({10}), OneParamModel{1.0},
                                        9000 + static_cast<std::uint64_t>(s));
    mean_f += f_statistic(exp.data, Grouping::PlayersA) / sims;
  }
  CHECK(std::fabs(mean_f - 1.0) <= 0.1);
}

TEST_CASE("permute_session preserves the design invariants") {
  const auto exp = generate_synthetic(DesignSpec::cyclic({7}), OneParamModel{0.8}, 123);
  const auto squares = squares_from_dataset(exp.data);
  REQUIRE(squares.size() == 1);
  Rng rng(55);
  for (int rep = 0; rep < 1000; ++rep) {
    const auto permuted = permute_session(squares[0], rng);
    CHECK(is_latin(permuted));
    CHECK(permuted.y == squares[0].y);  // outcomes stay with their pairs
    std::multiset<int> original(squares[0].t.begin(), squares[0].t.end());
    std::multiset<int> shuffled(permuted.t.begin(), permuted.t.end());
    CHECK(original == shuffled);
  }
}

TEST_CASE("single-cell square is unchanged by permutation") {
  const auto exp = generate_synthetic(DesignSpec::cyclic({1}), OneParamModel{0.8}, 1);
  const auto squares = squares_from_dataset(exp.data);
  Rng rng(2);
  const auto permuted = permute_session(squares[0], rng);
  CHECK(permuted.t == squares[0].t);
  CHECK(permuted.y == squares[0].y);
}

TEST_CASE("sessions F randomization test is refused") {
  const auto exp = generate_synthetic(DesignSpec::paper_default(), OneParamModel{1.0}, 3);
  CHECK_THROWS_WITH_AS(randomization_test(exp.data, TestStatistic::FSessions, 100, 1),
                       doctest::Contains("Latin square"), std::invalid_argument);
}

TEST_CASE("randomization test p-value matches its null distribution") {
  const auto exp = generate_synthetic(DesignSpec::paper_default(),
                                      LearningModel{1.0, 0.15}, 17);
  for (TestStatistic stat :
       {TestStatistic::Slope, TestStatistic::FPlayersA, TestStatistic::FPlayersB}) {
    const auto outcome = randomization_test(exp.data, stat, 400, 99);
    CHECK(outcome.null_values.size() == 400);
    std::int64_t extreme = 0;
    for (double v : outcome.null_values) {
      if (outcome.tail == "lower" ? v <= outcome.observed : v >= outcome.observed) ++extreme;
    }
    CHECK(outcome.p_value == doctest::Approx(extreme / 400.0));
    CHECK(outcome.p_value_corrected() == doctest::Approx((extreme + 1) / 401.0));
    CHECK(outcome.p_value >= 0.0);
    CHECK(outcome.p_value <= 1.0);
  }
}

TEST_CASE("a strong learning trend is detected by the slope test") {
  const auto exp = generate_synthetic(DesignSpec::paper_default(),
                                      HeteroLearningModel{1.0, 1.0, 0.25}, 4);
  const auto outcome = randomization_test(exp.data, TestStatistic::Slope, 500, 7);
  CHECK(outcome.observed < 0.0);
  CHECK(outcome.p_value <= 0.01);
}

TEST_CASE("permutation null of the slope is centered at zero") {
  // Equal session sizes: every cell's permuted game number has mean tbar, so
  // the null mean is exactly zero up to Monte Carlo error. (Mixed sizes add a
  // small offset through the session means.)
  const auto exp = generate_synthetic(DesignSpec::cyclic({10, 10, 10}),
                                      HeteroLearningModel{1.2, 0.9, 0.1}, 5);
  const auto outcome = randomization_test(exp.data, TestStatistic::Slope, 1000, 11);
  double mean = 0.0, var = 0.0;
  for (double v : outcome.null_values) mean += v;
  mean /= static_cast<double>(outcome.null_values.size());
  for (double v : outcome.null_values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(outcome.null_values.size() - 1);
  const double se = std::sqrt(var / static_cast<double>(outcome.null_values.size()));
  CHECK(std::fabs(mean) <= 3.0 * se);
}

TEST_CASE("p-values are invariant to session relabeling") {
  const auto exp = generate_synthetic(DesignSpec::paper_default(),
                                      HeteroLearningModel{1.5, 0.8, 0.05}, 41);
  auto records = exp.data.records();
  for (auto& r : records) {
    if (r.session == "1") r.session = "9";
    else if (r.session == "2") r.session = "2";
    else r.session = "7";
  }
  const auto relabeled = Dataset::from_records(records);
  for (TestStatistic stat :
       {TestStatistic::Slope, TestStatistic::FPlayersA, TestStatistic::FPlayersB}) {
    const auto a = randomization_test(exp.data, stat, 300, 12345);
    const auto b = randomization_test(relabeled, stat, 300, 12345);
    CHECK(a.p_value == b.p_value);
    CHECK(a.null_values == b.null_values);
  }
}

TEST_CASE("replicates preserve the design and the cell distribution") {
  Rng rng(6);
  const auto design = DesignSpec::cyclic({1});
  const ModelSpec model = LearningModel{1.0, 0.1};
  GameContext ctx;
  ctx.t = 1;
  const auto theta = outcome_distribution_for(model, ctx);

  std::array<double, 5> freq{};
  const int reps = 100000;
  for (int r = 0; r < reps; ++r) {
    const auto rep = simulate_replicate(model, design, rng);
    freq[rep.records()[0].y - 1] += 1.0;
  }
  for (int k = 0; k < 5; ++k) {
    const double se = std::sqrt(theta.theta[k] * (1 - theta.theta[k]) / reps);
    CHECK(std::fabs(freq[k] / reps - theta.theta[k]) <= 3.0 * se);
  }

  Rng rng2(7);
  const auto rep = simulate_replicate(OneParamModel{1e9}, DesignSpec::paper_default(), rng2);
  CHECK(validate_design(rep).pass);
  for (const auto& r : rep.records()) CHECK(r.y == 1);
}

TEST_CASE("point-mass posterior equals a parametric Monte Carlo test") {
  const auto design = DesignSpec::paper_default();
  const HeteroLearningModel truth{2.0, 1.0, 0.05};
  const auto exp = generate_synthetic(design, truth, 70);

  PosteriorSamples point;
  point.names = {"lambda_A", "lambda_B", "beta"};
  point.draws.assign(500, {truth.lambda_a, truth.lambda_b, truth.beta});

  const auto pp = posterior_predictive_test(point, Family::Hetero, design,
                                            TestStatistic::Slope, exp.data, 2222);

  // Parametric reference with the same replicate streams.
  std::int64_t extreme = 0;
  const double observed = slope_statistic(exp.data);
  for (std::size_t k = 0; k < point.draws.size(); ++k) {
    Rng rng = Rng::stream(2222, k);
    const auto rep = simulate_replicate(truth, design, rng);
    if (slope_statistic(rep) <= observed) ++extreme;
  }
  CHECK(pp.p_value == doctest::Approx(extreme / 500.0));
}

TEST_CASE("posterior predictive test validates the design") {
  const auto exp = generate_synthetic(DesignSpec::paper_default(), OneParamModel{1.0}, 2);
  PosteriorSamples point;
  point.names = {"lambda"};
  point.draws.assign(10, {1.0});
  CHECK_THROWS_AS(posterior_predictive_test(point, Family::OneParam, DesignSpec::cyclic({4}),
                                            TestStatistic::Slope, exp.data, 1),
                  std::invalid_argument);
  // Sessions F is available here, unlike in the randomization test.
  CHECK_NOTHROW(posterior_predictive_test(point, Family::OneParam,
                                          DesignSpec::paper_default(),
                                          TestStatistic::FSessions, exp.data, 1));
}

TEST_CASE("statistic names round trip") {
  for (TestStatistic s : {TestStatistic::Slope, TestStatistic::FPlayersA,
                          TestStatistic::FPlayersB, TestStatistic::FSessions})
    CHECK(statistic_from_name(statistic_name(s)) == s);
  CHECK_THROWS_AS(statistic_from_name("median"), std::invalid_argument);
}

}  // TEST_SUITE
