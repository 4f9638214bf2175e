#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tripchain/core.hpp"

namespace tripchain {

// Regularized incomplete beta I_x(a, b), a,b > 0, continued-fraction method.
double regularized_incomplete_beta(double a, double b, double x);

// P(T >= t) for Student's t with df degrees of freedom.
double student_t_sf(double t, double df);

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // one-sided: mean(x) > mean(y)
};

// Welch's unequal-variance t-test; one-sided alternative mean(x) > mean(y).
// Requires at least two values per side and nonzero variance on at least one.
TTestResult welch_t_test(std::span<const double> x, std::span<const double> y);

// Day-pair constraints for similarity sampling.
struct AnyPair {};                          // unconstrained (set A0)
struct SameWeekday { int weekday; };        // both days on this weekday (A1..A7)
struct BothWorkdays {};                     // set W
struct BothHolidays {};                     // set H
struct FixedGap { std::size_t gap; };       // |i - j| = gap
using PairConstraint =
    std::variant<AnyPair, SameWeekday, BothWorkdays, BothHolidays, FixedGap>;

struct PairSampleSet {
  std::string label;
  std::vector<double> scores;  // Eq.-1 chain similarity per sampled pair
  std::uint64_t seed = 0;
  double mean() const;
  double stddev() const;  // sample standard deviation
};

// Draws `count` (user, day_i, day_j) triples uniformly under the constraint
// (same user, i != j) by rejection sampling and scores each pair's chains.
// include_empty_days=false additionally rejects pairs touching no-travel days.
PairSampleSet sample_pairs(std::span<const UserHistory> histories,
                           const PairConstraint& constraint, std::size_t count,
                           std::uint64_t seed, bool include_empty_days = true);

struct PatternConfig {
  std::size_t pair_count = 20000;
  std::size_t baseline_pair_count = 0;  // 0: same as pair_count
  std::uint64_t seed = 0;
  bool include_empty_days = true;
  std::vector<std::size_t> gaps = {1, 20, 40, 60, 80, 100, 120, 140, 160, 180, 200};
};

struct PatternTestRow {
  std::string label;  // e.g. "A1 vs A0"
  double mean_x = 0.0;
  double mean_y = 0.0;
  TTestResult test;
};

struct GapPoint {
  std::size_t gap = 0;
  double mean_similarity = 0.0;
};

struct SetSummary {
  std::string label;
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t n = 0;
};

struct PatternReport {
  std::vector<SetSummary> sets;        // A0, A1..A7, W, H
  std::vector<PatternTestRow> tests;   // A1..A7, W, H each vs A0
  std::vector<GapPoint> gap_curve;
};

// Samples all similarity sets, runs the nine one-sided tests against the
// baseline set, and tabulates mean similarity as a function of day gap.
PatternReport verify_patterns(std::span<const UserHistory> histories,
                              const PatternConfig& config);

std::string pattern_report_to_json(const PatternReport& report);
std::string gap_curve_to_csv(const PatternReport& report);

}  // namespace tripchain
