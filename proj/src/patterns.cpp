#include "tripchain/patterns.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "nlohmann/json.hpp"
#include "tripchain/evaluation.hpp"
#include "tripchain/similarity.hpp"

namespace tripchain {

namespace {

// Continued fraction for the incomplete beta (modified Lentz's algorithm).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kTiny = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

double mean_of(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("incomplete beta requires a, b > 0");
  }
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double ln_prefactor = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                        a * std::log(x) + b * std::log1p(-x);
  double prefactor = std::exp(ln_prefactor);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return prefactor * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - prefactor * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_sf(double t, double df) {
  if (!(df > 0.0)) throw std::invalid_argument("degrees of freedom must be positive");
  double tail = 0.5 * regularized_incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
  return t >= 0.0 ? tail : 1.0 - tail;
}

TTestResult welch_t_test(std::span<const double> x, std::span<const double> y) {
  if (x.size() < 2 || y.size() < 2) {
    throw std::invalid_argument("t-test needs at least two values per sample");
  }
  double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
  double vx = sample_variance(x), vy = sample_variance(y);
  if (vx == 0.0 && vy == 0.0) {
    throw std::invalid_argument("t-test undefined: both samples have zero variance");
  }
  double se2 = vx / nx + vy / ny;
  TTestResult r;
  r.t = (mean_of(x) - mean_of(y)) / std::sqrt(se2);
  r.df = se2 * se2 /
         (vx * vx / (nx * nx * (nx - 1.0)) + vy * vy / (ny * ny * (ny - 1.0)));
  r.p = student_t_sf(r.t, r.df);
  return r;
}

double PairSampleSet::mean() const { return mean_of(scores); }

double PairSampleSet::stddev() const { return std::sqrt(sample_variance(scores)); }

namespace {

std::string constraint_label(const PairConstraint& constraint) {
  struct Labeler {
    std::string operator()(const AnyPair&) const { return "A0"; }
    std::string operator()(const SameWeekday& c) const {
      return "A" + std::to_string(c.weekday);
    }
    std::string operator()(const BothWorkdays&) const { return "W"; }
    std::string operator()(const BothHolidays&) const { return "H"; }
    std::string operator()(const FixedGap& c) const {
      return "gap(" + std::to_string(c.gap) + ")";
    }
  };
  return std::visit(Labeler{}, constraint);
}

bool pair_satisfies(const PairConstraint& constraint, const UserHistory& user, std::size_t i,
                    std::size_t j) {
  struct Checker {
    const UserHistory& user;
    std::size_t i, j;
    bool operator()(const AnyPair&) const { return true; }
    bool operator()(const SameWeekday& c) const {
      return user.calendar[i].weekday == c.weekday && user.calendar[j].weekday == c.weekday;
    }
    bool operator()(const BothWorkdays&) const {
      return user.calendar[i].is_workday && user.calendar[j].is_workday;
    }
    bool operator()(const BothHolidays&) const {
      return !user.calendar[i].is_workday && !user.calendar[j].is_workday;
    }
    bool operator()(const FixedGap& c) const { return user.calendar.day_gap(i, j) == c.gap; }
  };
  return std::visit(Checker{user, i, j}, constraint);
}

}  // namespace

PairSampleSet sample_pairs(std::span<const UserHistory> histories,
                           const PairConstraint& constraint, std::size_t count,
                           std::uint64_t seed, bool include_empty_days) {
  if (count < 2) throw std::invalid_argument("pair sample needs count >= 2");
  if (histories.empty()) throw DataError("no user histories to sample from");

  PairSampleSet set;
  set.label = constraint_label(constraint);
  set.seed = seed;
  set.scores.reserve(count);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_user(0, histories.size() - 1);
  const std::size_t max_attempts = std::max<std::size_t>(count * 1000, 100000);
  std::size_t attempts = 0;
  while (set.scores.size() < count) {
    if (++attempts > max_attempts) {
      throw DataError("pair constraint '" + set.label +
                      "' unsatisfiable on this corpus (rejection sampling exhausted)");
    }
    const auto& user = histories[pick_user(rng)];
    std::size_t n = user.calendar.size();
    if (n < 2) continue;
    std::uniform_int_distribution<std::size_t> pick_day(0, n - 1);
    std::size_t i = pick_day(rng), j = pick_day(rng);
    if (i == j) continue;
    if (!pair_satisfies(constraint, user, i, j)) continue;
    if (!include_empty_days && (user.chains[i].empty() || user.chains[j].empty())) continue;
    set.scores.push_back(chain_similarity(user.chains[i], user.chains[j]));
  }
  return set;
}

PatternReport verify_patterns(std::span<const UserHistory> histories,
                              const PatternConfig& config) {
  PatternReport report;

  std::vector<PairConstraint> set_constraints = {AnyPair{}};
  for (int w = 1; w <= 7; ++w) set_constraints.push_back(SameWeekday{w});
  set_constraints.push_back(BothWorkdays{});
  set_constraints.push_back(BothHolidays{});

  std::vector<PairSampleSet> sets;
  sets.reserve(set_constraints.size());
  for (std::size_t s = 0; s < set_constraints.size(); ++s) {
    const std::size_t count = s == 0 && config.baseline_pair_count > 0
                                  ? config.baseline_pair_count
                                  : config.pair_count;
    sets.push_back(sample_pairs(histories, set_constraints[s], count, mix_seed(config.seed, s),
                                config.include_empty_days));
    report.sets.push_back(
        SetSummary{sets.back().label, sets.back().mean(), sets.back().stddev(),
                   sets.back().scores.size()});
  }

  const auto& baseline = sets.front();
  for (std::size_t s = 1; s < sets.size(); ++s) {
    PatternTestRow row;
    row.label = sets[s].label + " vs " + baseline.label;
    row.mean_x = sets[s].mean();
    row.mean_y = baseline.mean();
    row.test = welch_t_test(sets[s].scores, baseline.scores);
    report.tests.push_back(std::move(row));
  }

  for (std::size_t g = 0; g < config.gaps.size(); ++g) {
    auto gap_set = sample_pairs(histories, FixedGap{config.gaps[g]}, config.pair_count,
                                mix_seed(config.seed, 1000 + g), config.include_empty_days);
    report.gap_curve.push_back(GapPoint{config.gaps[g], gap_set.mean()});
  }
  return report;
}

std::string pattern_report_to_json(const PatternReport& report) {
  nlohmann::ordered_json j;
  j["sets"] = nlohmann::ordered_json::array();
  for (const auto& s : report.sets) {
    j["sets"].push_back({{"label", s.label}, {"mean", s.mean}, {"std", s.stddev}, {"n", s.n}});
  }
  j["tests"] = nlohmann::ordered_json::array();
  for (const auto& t : report.tests) {
    j["tests"].push_back({{"label", t.label},
                          {"mean_x", t.mean_x},
                          {"mean_y", t.mean_y},
                          {"t", t.test.t},
                          {"df", t.test.df},
                          {"p", t.test.p}});
  }
  j["gap_curve"] = nlohmann::ordered_json::array();
  for (const auto& g : report.gap_curve) {
    j["gap_curve"].push_back({{"gap", g.gap}, {"mean_similarity", g.mean_similarity}});
  }
  return j.dump(2) + "\n";
}

std::string gap_curve_to_csv(const PatternReport& report) {
  std::string out = "gap,mean_similarity\n";
  char buf[64];
  for (const auto& g : report.gap_curve) {
    std::snprintf(buf, sizeof(buf), "%zu,%.6f\n", g.gap, g.mean_similarity);
    out += buf;
  }
  return out;
}

}  // namespace tripchain
