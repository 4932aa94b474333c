#include "centqre/game.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace centqre {

namespace {

void check_outcome(int outcome) {
  if (outcome < 1 || outcome > kNumOutcomes)
    throw std::domain_error("outcome must be in 1..5, got " + std::to_string(outcome));
}

void check_probability(double v, const char* field) {
  if (!(v >= 0.0 && v <= 1.0))
    throw std::domain_error(std::string(field) + " must be a probability in [0,1], got " +
                            std::to_string(v));
}

std::int64_t to_cents(double dollars, const char* where) {
  const double scaled = dollars * 100.0;
  const double rounded = std::nearbyint(scaled);
  if (std::fabs(scaled - rounded) > 1e-6)
    throw std::invalid_argument(std::string("payoff not an exact cent amount in ") + where);
  return static_cast<std::int64_t>(rounded);
}

}  // namespace

PayoffTable PayoffTable::standard() {
  return PayoffTable({40, 20, 160, 80, 640}, {10, 80, 40, 320, 160});
}

PayoffTable::PayoffTable(std::array<std::int64_t, kNumOutcomes> cents_a,
                         std::array<std::int64_t, kNumOutcomes> cents_b)
    : a_cents_(cents_a), b_cents_(cents_b) {
  for (int k = 0; k < kNumOutcomes; ++k) {
    if (a_cents_[k] <= 0 || b_cents_[k] <= 0)
      throw std::invalid_argument("payoffs must be strictly positive (outcome " +
                                  std::to_string(k + 1) + ")");
  }
}

std::int64_t PayoffTable::cents(int outcome, Role role) const {
  check_outcome(outcome);
  return role == Role::A ? a_cents_[outcome - 1] : b_cents_[outcome - 1];
}

double PayoffTable::dollars(int outcome, Role role) const {
  return static_cast<double>(cents(outcome, role)) / 100.0;
}

PayoffTable PayoffTable::from_json_text(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (!j.contains("outcomes") || !j["outcomes"].is_array() || j["outcomes"].size() != kNumOutcomes)
    throw std::invalid_argument("payoff table JSON must have an \"outcomes\" array of 5 entries");
  std::array<std::int64_t, kNumOutcomes> a{};
  std::array<std::int64_t, kNumOutcomes> b{};
  std::array<bool, kNumOutcomes> seen{};
  for (const auto& entry : j["outcomes"]) {
    const int y = entry.at("y").get<int>();
    check_outcome(y);
    if (seen[y - 1]) throw std::invalid_argument("duplicate outcome in payoff table JSON");
    seen[y - 1] = true;
    a[y - 1] = to_cents(entry.at("A").get<double>(), "A");
    b[y - 1] = to_cents(entry.at("B").get<double>(), "B");
  }
  return PayoffTable(a, b);
}

PayoffTable PayoffTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open payoff table: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

std::string PayoffTable::to_json_text() const {
  nlohmann::json j;
  for (int y = 1; y <= kNumOutcomes; ++y) {
    j["outcomes"].push_back({{"y", y},
                             {"A", dollars(y, Role::A)},
                             {"B", dollars(y, Role::B)}});
  }
  return j.dump(2);
}

double OutcomeDistribution::sum() const {
  double s = 0.0;
  for (double v : theta) s += v;
  return s;
}

OutcomeDistribution outcome_distribution(const DecisionProfile& pr) {
  check_probability(pr.p1, "p1");
  check_probability(pr.q1, "q1");
  check_probability(pr.p2, "p2");
  check_probability(pr.q2, "q2");
  OutcomeDistribution out;
  const double pass1 = 1.0 - pr.p1;
  const double pass2 = pass1 * (1.0 - pr.q1);
  const double pass3 = pass2 * (1.0 - pr.p2);
  out.theta[0] = pr.p1;
  out.theta[1] = pass1 * pr.q1;
  out.theta[2] = pass2 * pr.p2;
  out.theta[3] = pass3 * pr.q2;
  out.theta[4] = pass3 * (1.0 - pr.q2);
  return out;
}

double payoff(int outcome, Role role, const PayoffTable& table) {
  return table.dollars(outcome, role);
}

}  // namespace centqre
