#include "centqre/data.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "centqre/model_json.hpp"

namespace centqre {

namespace {

bool parse_long(const std::string& text, long& out) {
  if (text.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stol(text, &pos);
  } catch (const std::exception&) {
    return false;
  }
  return pos == text.size();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

bool operator==(const GameRecord& lhs, const GameRecord& rhs) {
  return lhs.session == rhs.session && lhs.a_id == rhs.a_id && lhs.b_id == rhs.b_id &&
         lhs.t == rhs.t && lhs.y == rhs.y;
}

bool id_less(const std::string& lhs, const std::string& rhs) {
  long ln = 0, rn = 0;
  if (parse_long(lhs, ln) && parse_long(rhs, rn)) {
    if (ln != rn) return ln < rn;
    return lhs < rhs;
  }
  return lhs < rhs;
}

Dataset Dataset::from_records(std::vector<GameRecord> records) {
  Dataset data;
  data.records_ = std::move(records);

  std::set<std::string> session_ids;
  for (const auto& r : data.records_) {
    if (r.y < 1 || r.y > kNumOutcomes)
      throw std::invalid_argument("outcome must be in 1..5 for record (" + r.session + "," +
                                  r.a_id + "," + r.b_id + ")");
    if (r.t < 1) throw std::invalid_argument("game number must be >= 1");
    session_ids.insert(r.session);
  }

  std::vector<std::string> ordered(session_ids.begin(), session_ids.end());
  std::sort(ordered.begin(), ordered.end(), id_less);

  std::map<std::string, int> session_pos;
  for (const auto& sid : ordered) {
    session_pos.emplace(sid, static_cast<int>(data.sessions_.size()));
    data.sessions_.push_back(SessionLayout{sid, {}, {}, {}, {}, {}});
  }

  for (auto& layout : data.sessions_) {
    std::set<std::string> as, bs;
    for (const auto& r : data.records_) {
      if (r.session != layout.id) continue;
      as.insert(r.a_id);
      bs.insert(r.b_id);
    }
    layout.a_ids.assign(as.begin(), as.end());
    layout.b_ids.assign(bs.begin(), bs.end());
    std::sort(layout.a_ids.begin(), layout.a_ids.end(), id_less);
    std::sort(layout.b_ids.begin(), layout.b_ids.end(), id_less);
    layout.t_grid.assign(layout.a_ids.size() * layout.b_ids.size(), -1);
    layout.y_grid.assign(layout.t_grid.size(), -1);
    layout.record_grid.assign(layout.t_grid.size(), -1);
  }

  data.a_offset_.resize(data.sessions_.size());
  data.b_offset_.resize(data.sessions_.size());
  int a_total = 0, b_total = 0;
  for (std::size_t s = 0; s < data.sessions_.size(); ++s) {
    data.a_offset_[s] = a_total;
    data.b_offset_[s] = b_total;
    a_total += data.sessions_[s].n_a();
    b_total += data.sessions_[s].n_b();
  }
  data.n_a_ = a_total;
  data.n_b_ = b_total;
  data.by_a_.resize(a_total);
  data.by_b_.resize(b_total);

  data.contexts_.resize(data.records_.size());
  for (std::size_t k = 0; k < data.records_.size(); ++k) {
    const auto& r = data.records_[k];
    const int s = session_pos.at(r.session);
    auto& layout = data.sessions_[s];
    const auto ai = std::lower_bound(layout.a_ids.begin(), layout.a_ids.end(), r.a_id, id_less) -
                    layout.a_ids.begin();
    const auto bi = std::lower_bound(layout.b_ids.begin(), layout.b_ids.end(), r.b_id, id_less) -
                    layout.b_ids.begin();
    const int cell = layout.cell(static_cast<int>(ai), static_cast<int>(bi));
    if (layout.record_grid[cell] >= 0)
      throw std::invalid_argument("duplicate pair (" + r.session + "," + r.a_id + "," + r.b_id +
                                  ")");
    layout.t_grid[cell] = r.t;
    layout.y_grid[cell] = r.y;
    layout.record_grid[cell] = static_cast<int>(k);

    GameContext ctx;
    ctx.session_index = s;
    ctx.a_index = data.a_offset_[s] + static_cast<int>(ai);
    ctx.b_index = data.b_offset_[s] + static_cast<int>(bi);
    ctx.t = r.t;
    data.contexts_[k] = ctx;
    data.by_a_[ctx.a_index].push_back(static_cast<int>(k));
    data.by_b_[ctx.b_index].push_back(static_cast<int>(k));
    data.max_t_ = std::max(data.max_t_, r.t);
  }

  data.counts_by_t_.assign(data.max_t_, {});
  for (const auto& r : data.records_) ++data.counts_by_t_[r.t - 1][r.y - 1];
  return data;
}

std::string Dataset::global_a_label(int index) const {
  for (std::size_t s = 0; s < sessions_.size(); ++s) {
    const int local = index - a_offset_[s];
    if (local >= 0 && local < sessions_[s].n_a())
      return "s" + sessions_[s].id + ":A" + sessions_[s].a_ids[local];
  }
  throw std::out_of_range("global A index out of range");
}

std::string Dataset::global_b_label(int index) const {
  for (std::size_t s = 0; s < sessions_.size(); ++s) {
    const int local = index - b_offset_[s];
    if (local >= 0 && local < sessions_[s].n_b())
      return "s" + sessions_[s].id + ":B" + sessions_[s].b_ids[local];
  }
  throw std::out_of_range("global B index out of range");
}

Dataset parse_dataset(std::istream& in, const std::string& source_name) {
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument(source_name + ": no records (empty input)");
  if (strip_cr(line) != "session,a_id,b_id,game,outcome")
    throw std::invalid_argument(source_name +
                                ":1: expected header \"session,a_id,b_id,game,outcome\"");

  std::vector<GameRecord> records;
  std::set<std::string> seen;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto where = source_name + ":" + std::to_string(line_no);
    const auto fields = split_csv_line(line);
    if (fields.size() != 5)
      throw std::invalid_argument(where + ": expected 5 fields, got " +
                                  std::to_string(fields.size()));
    long values[5];
    for (int k = 0; k < 5; ++k) {
      if (!parse_long(fields[k], values[k]))
        throw std::invalid_argument(where + ": field \"" + fields[k] + "\" is not an integer");
    }
    GameRecord r;
    r.session = fields[0];
    r.a_id = fields[1];
    r.b_id = fields[2];
    r.t = static_cast<int>(values[3]);
    r.y = static_cast<int>(values[4]);
    if (r.y < 1 || r.y > kNumOutcomes)
      throw std::invalid_argument(where + ": outcome " + fields[4] + " outside 1..5");
    if (r.t < 1) throw std::invalid_argument(where + ": game number must be >= 1");
    const std::string key = r.session + "," + r.a_id + "," + r.b_id;
    if (!seen.insert(key).second)
      throw std::invalid_argument(where + ": duplicate pair (" + key + ")");
    records.push_back(std::move(r));
  }
  if (records.empty()) throw std::invalid_argument(source_name + ": no records");
  return Dataset::from_records(std::move(records));
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset: " + path);
  return parse_dataset(in, path);
}

void write_dataset(const Dataset& data, std::ostream& out) {
  out << "session,a_id,b_id,game,outcome\n";
  for (const auto& r : data.records())
    out << r.session << ',' << r.a_id << ',' << r.b_id << ',' << r.t << ',' << r.y << '\n';
}

void save_dataset(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset: " + path);
  write_dataset(data, out);
}

std::string DesignReport::to_text() const {
  std::ostringstream out;
  out << (pass ? "PASS" : "FAIL") << ": Latin-square design check\n";
  for (const auto& v : violations)
    out << "  session " << v.session << ": " << v.message << "\n";
  return out.str();
}

DesignReport validate_design(const Dataset& data) {
  DesignReport report;
  auto fail = [&](const std::string& session, std::string msg) {
    report.pass = false;
    report.violations.push_back({session, std::move(msg)});
  };

  for (const auto& layout : data.sessions()) {
    const int na = layout.n_a(), nb = layout.n_b();
    if (na != nb) {
      fail(layout.id, "square requires equal subject counts per role, got " +
                          std::to_string(na) + " A vs " + std::to_string(nb) + " B");
      continue;
    }
    const int n = na;
    bool complete = true;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (layout.record_grid[layout.cell(i, j)] < 0) {
          fail(layout.id, "missing game for pair (A" + layout.a_ids[i] + ", B" +
                              layout.b_ids[j] + ")");
          complete = false;
        }
      }
    }
    if (!complete) continue;

    bool range_ok = true;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const int t = layout.t_grid[layout.cell(i, j)];
        if (t < 1 || t > n) {
          fail(layout.id, "game number " + std::to_string(t) + " outside 1.." +
                              std::to_string(n) + " at (A" + layout.a_ids[i] + ", B" +
                              layout.b_ids[j] + ")");
          range_ok = false;
        }
      }
    }
    if (!range_ok) continue;

    for (int i = 0; i < n; ++i) {
      std::vector<int> count(n + 1, 0);
      for (int j = 0; j < n; ++j) ++count[layout.t_grid[layout.cell(i, j)]];
      for (int t = 1; t <= n; ++t) {
        if (count[t] != 1)
          fail(layout.id, "row A" + layout.a_ids[i] + " has game number " + std::to_string(t) +
                              " " + std::to_string(count[t]) + " times");
      }
    }
    for (int j = 0; j < n; ++j) {
      std::vector<int> count(n + 1, 0);
      for (int i = 0; i < n; ++i) ++count[layout.t_grid[layout.cell(i, j)]];
      for (int t = 1; t <= n; ++t) {
        if (count[t] != 1)
          fail(layout.id, "column B" + layout.b_ids[j] + " has game number " +
                              std::to_string(t) + " " + std::to_string(count[t]) + " times");
      }
    }
  }
  return report;
}

DesignSpec DesignSpec::paper_default() { return cyclic({10, 9, 10}); }

DesignSpec DesignSpec::cyclic(const std::vector<int>& sizes) {
  DesignSpec spec;
  int sid = 0;
  for (int n : sizes) {
    if (n < 1) throw std::invalid_argument("session size must be >= 1");
    SessionDesign s;
    s.id = std::to_string(++sid);
    s.n = n;
    s.schedule.resize(n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s.schedule[i * n + j] = ((j - i + n) % n) + 1;
    spec.sessions.push_back(std::move(s));
  }
  return spec;
}

DesignSpec DesignSpec::from_json_text(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  DesignSpec spec;
  for (const auto& js : j.at("sessions")) {
    SessionDesign s;
    s.id = js.at("id").is_string() ? js.at("id").get<std::string>()
                                   : std::to_string(js.at("id").get<long>());
    s.n = js.at("n").get<int>();
    const auto& rows = js.at("schedule");
    if (static_cast<int>(rows.size()) != s.n)
      throw std::invalid_argument("schedule must have n rows");
    for (const auto& row : rows) {
      if (static_cast<int>(row.size()) != s.n)
        throw std::invalid_argument("schedule rows must have n entries");
      for (const auto& v : row) s.schedule.push_back(v.get<int>());
    }
    spec.sessions.push_back(std::move(s));
  }
  return spec;
}

DesignSpec DesignSpec::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open design: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

std::string DesignSpec::to_json_text() const {
  nlohmann::json j;
  for (const auto& s : sessions) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < s.n; ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (int jcol = 0; jcol < s.n; ++jcol) row.push_back(s.at(i, jcol));
      rows.push_back(row);
    }
    j["sessions"].push_back({{"id", s.id}, {"n", s.n}, {"schedule", rows}});
  }
  return j.dump(2);
}

int DesignSpec::total_games() const {
  int total = 0;
  for (const auto& s : sessions) total += s.n * s.n;
  return total;
}

int DesignSpec::subjects_per_role() const {
  int total = 0;
  for (const auto& s : sessions) total += s.n;
  return total;
}

DesignSpec design_of(const Dataset& data) {
  const auto report = validate_design(data);
  if (!report.pass)
    throw std::invalid_argument("dataset does not form a valid design:\n" + report.to_text());
  DesignSpec spec;
  for (const auto& layout : data.sessions()) {
    SessionDesign s;
    s.id = layout.id;
    s.n = layout.n_a();
    s.schedule = layout.t_grid;
    spec.sessions.push_back(std::move(s));
  }
  return spec;
}

bool designs_match(const DesignSpec& design, const Dataset& data) {
  const auto report = validate_design(data);
  if (!report.pass) return false;
  if (design.sessions.size() != data.sessions().size()) return false;
  for (std::size_t s = 0; s < design.sessions.size(); ++s) {
    const auto& ds = design.sessions[s];
    const auto& layout = data.sessions()[s];
    if (ds.n != layout.n_a() || ds.schedule != layout.t_grid) return false;
  }
  return true;
}

BeliefMeans session_belief_means(const RandomEffectsModel& model, const DesignSpec& design,
                                 int session_index) {
  if (session_index < 0 || session_index >= static_cast<int>(design.sessions.size()))
    throw std::out_of_range("session index out of range");
  int a_off = 0, b_off = 0;
  for (int s = 0; s < session_index; ++s) {
    a_off += design.sessions[s].n;
    b_off += design.sessions[s].n;
  }
  const int n = design.sessions[session_index].n;
  BeliefMeans bm;
  for (int k = 0; k < n; ++k) {
    bm.delta_bar_a += model.delta_a.at(a_off + k);
    bm.beta_bar_a += model.beta_a.at(a_off + k);
    bm.delta_bar_b += model.delta_b.at(b_off + k);
    bm.beta_bar_b += model.beta_b.at(b_off + k);
  }
  bm.delta_bar_a /= n;
  bm.beta_bar_a /= n;
  bm.delta_bar_b /= n;
  bm.beta_bar_b /= n;
  return bm;
}

Dataset sample_dataset(const ModelSpec& model, const DesignSpec& design, Rng& rng,
                       const PayoffTable& table) {
  const bool is_re = family_of(model) == Family::RandomEffects;
  std::vector<GameRecord> records;
  records.reserve(design.total_games());

  int a_off = 0, b_off = 0;
  for (std::size_t s = 0; s < design.sessions.size(); ++s) {
    const auto& sd = design.sessions[s];
    BeliefMeans beliefs;
    if (is_re)
      beliefs = session_belief_means(std::get<RandomEffectsModel>(model), design,
                                     static_cast<int>(s));
    for (int i = 0; i < sd.n; ++i) {
      for (int j = 0; j < sd.n; ++j) {
        GameContext ctx;
        ctx.session_index = static_cast<int>(s);
        ctx.a_index = a_off + i;
        ctx.b_index = b_off + j;
        ctx.t = sd.at(i, j);
        const auto theta =
            outcome_distribution_for(model, ctx, is_re ? &beliefs : nullptr, table);
        GameRecord r;
        r.session = sd.id;
        r.a_id = std::to_string(i + 1);
        r.b_id = std::to_string(j + 1);
        r.t = ctx.t;
        r.y = rng.categorical(theta.theta) + 1;
        records.push_back(std::move(r));
      }
    }
    a_off += sd.n;
    b_off += sd.n;
  }
  return Dataset::from_records(std::move(records));
}

std::string SyntheticExperiment::truth_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["family"] = family_name(family_of(truth));
  j["params"] = model_params_to_json(truth);
  return j.dump(2);
}

SyntheticExperiment generate_synthetic(const DesignSpec& design, const ModelSpec& model,
                                       std::uint64_t seed) {
  Rng rng = Rng::stream(seed, 0);
  SyntheticExperiment out;
  out.data = sample_dataset(model, design, rng);
  out.truth = model;
  out.seed = seed;
  return out;
}

SyntheticExperiment generate_synthetic(const DesignSpec& design, const HierarchySpec& hyper,
                                       std::uint64_t seed) {
  Rng rng = Rng::stream(seed, 1);
  const int n = design.subjects_per_role();
  RandomEffectsModel model;
  model.delta_a.resize(n);
  model.beta_a.resize(n);
  model.delta_b.resize(n);
  model.beta_b.resize(n);
  for (int k = 0; k < n; ++k) {
    model.delta_a[k] = rng.normal(hyper.mu_delta_a, std::sqrt(hyper.sigma2_delta_a));
    model.beta_a[k] = rng.normal(hyper.mu_beta_a, std::sqrt(hyper.sigma2_beta_a));
    model.delta_b[k] = rng.normal(hyper.mu_delta_b, std::sqrt(hyper.sigma2_delta_b));
    model.beta_b[k] = rng.normal(hyper.mu_beta_b, std::sqrt(hyper.sigma2_beta_b));
  }
  Rng data_rng = Rng::stream(seed, 2);
  SyntheticExperiment out;
  out.data = sample_dataset(model, design, data_rng);
  out.truth = std::move(model);
  out.seed = seed;
  return out;
}

}  // namespace centqre
