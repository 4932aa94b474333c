#pragma once

// Dataset model and file formats: one record per game, sessions laid out as
// Latin squares (each game number once per Player A row and Player B column),
// plus the synthetic-experiment generator used as a verification oracle.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "centqre/models.hpp"
#include "centqre/rng.hpp"

namespace centqre {

struct GameRecord {
  std::string session;
  std::string a_id;
  std::string b_id;
  int t = 1;  // game number
  int y = 1;  // outcome 1..5
};

bool operator==(const GameRecord& lhs, const GameRecord& rhs);

// Numeric-aware id ordering: "10" sorts after "9".
bool id_less(const std::string& lhs, const std::string& rhs);

// Per-session layout with subjects resolved to sorted positions. Grids are
// row-major (A position x B position); -1 marks an absent pair so that
// validation can report holes instead of throwing.
struct SessionLayout {
  std::string id;
  std::vector<std::string> a_ids;
  std::vector<std::string> b_ids;
  std::vector<int> t_grid;
  std::vector<int> y_grid;
  std::vector<int> record_grid;  // record index per cell, -1 absent

  int n_a() const { return static_cast<int>(a_ids.size()); }
  int n_b() const { return static_cast<int>(b_ids.size()); }
  int cell(int i, int j) const { return i * n_b() + j; }
};

class Dataset {
 public:
  Dataset() = default;
  static Dataset from_records(std::vector<GameRecord> records);

  const std::vector<GameRecord>& records() const { return records_; }
  const std::vector<SessionLayout>& sessions() const { return sessions_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  int n_subjects_a() const { return n_a_; }
  int n_subjects_b() const { return n_b_; }

  // Global subject indices: sessions in sorted-id order, subjects in sorted-id
  // order within a session.
  int a_offset(int session_index) const { return a_offset_[session_index]; }
  int b_offset(int session_index) const { return b_offset_[session_index]; }
  std::string global_a_label(int index) const;
  std::string global_b_label(int index) const;

  const GameContext& context(std::size_t record_index) const { return contexts_[record_index]; }

  // Record indices per subject, for subject-block likelihoods.
  const std::vector<int>& records_of_a(int global_a) const { return by_a_[global_a]; }
  const std::vector<int>& records_of_b(int global_b) const { return by_b_[global_b]; }

  // Outcome counts pooled by game number, 1-based t; drives the sufficient-
  // statistic likelihood for families whose probabilities depend only on t.
  int max_t() const { return max_t_; }
  const std::array<std::int64_t, kNumOutcomes>& counts_at(int t) const {
    return counts_by_t_[t - 1];
  }

 private:
  std::vector<GameRecord> records_;
  std::vector<SessionLayout> sessions_;
  std::vector<GameContext> contexts_;
  std::vector<int> a_offset_, b_offset_;
  std::vector<std::vector<int>> by_a_, by_b_;
  std::vector<std::array<std::int64_t, kNumOutcomes>> counts_by_t_;
  int n_a_ = 0, n_b_ = 0, max_t_ = 0;
};

// CSV format: header "session,a_id,b_id,game,outcome", integer fields.
Dataset parse_dataset(std::istream& in, const std::string& source_name = "<stream>");
Dataset load_dataset(const std::string& path);
void write_dataset(const Dataset& data, std::ostream& out);
void save_dataset(const Dataset& data, const std::string& path);

struct DesignViolation {
  std::string session;
  std::string message;
};

struct DesignReport {
  bool pass = true;
  std::vector<DesignViolation> violations;
  std::string to_text() const;
};

// Checks that every (A,B) pair appears exactly once per session and that the
// game numbers form a Latin square.
DesignReport validate_design(const Dataset& data);

struct SessionDesign {
  std::string id;
  int n = 0;
  std::vector<int> schedule;  // n*n row-major game numbers, values 1..n

  int at(int i, int j) const { return schedule[i * n + j]; }
};

struct DesignSpec {
  std::vector<SessionDesign> sessions;

  // Sessions of 10, 9 and 10 subjects per side with the cyclic schedule
  // (281 games in total).
  static DesignSpec paper_default();
  static DesignSpec cyclic(const std::vector<int>& sizes);
  static DesignSpec from_json_text(const std::string& text);
  static DesignSpec load(const std::string& path);
  std::string to_json_text() const;

  int total_games() const;
  int subjects_per_role() const;
};

// Design implied by a dataset; requires the dataset to validate.
DesignSpec design_of(const Dataset& data);
bool designs_match(const DesignSpec& design, const Dataset& data);

// Arithmetic means of the opposing type's (delta, beta) within one session.
BeliefMeans session_belief_means(const RandomEffectsModel& model, const DesignSpec& design,
                                 int session_index);

// One dataset sampled from the model on the given design; subject ids are
// "1".."N" per role within each session.
Dataset sample_dataset(const ModelSpec& model, const DesignSpec& design, Rng& rng,
                       const PayoffTable& table = standard_payoffs());

// Population hyperparameters for hierarchical generation.
struct HierarchySpec {
  double mu_delta_a = 0.0, sigma2_delta_a = 1.0;
  double mu_beta_a = 0.0, sigma2_beta_a = 0.01;
  double mu_delta_b = 0.0, sigma2_delta_b = 1.0;
  double mu_beta_b = 0.0, sigma2_beta_b = 0.01;
};

struct SyntheticExperiment {
  Dataset data;
  ModelSpec truth;  // generating model, with drawn subjects when hierarchical
  std::uint64_t seed = 0;

  std::string truth_json() const;
};

SyntheticExperiment generate_synthetic(const DesignSpec& design, const ModelSpec& model,
                                       std::uint64_t seed);
SyntheticExperiment generate_synthetic(const DesignSpec& design, const HierarchySpec& hyper,
                                       std::uint64_t seed);

}  // namespace centqre
