#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tripchain/core.hpp"

namespace tripchain {

// Per-day metrics: overlap accuracy and token edit distance.
struct DayScore {
  double accuracy = 0.0;
  int edit_distance = 0;
};

// 2|A∩B| / (|A|+|B|). Two empty chains count as a perfect prediction (1);
// predicting travel on a no-travel day (or vice versa) scores 0.
double chain_accuracy(const TripChain& pred, const TripChain& truth);

// Unit-cost Levenshtein distance between the chains serialized as token
// sequences [hour, origin, destination, ...] in canonical trip order. Hour
// tokens and station tokens live in disjoint token spaces.
int edit_distance(const TripChain& pred, const TripChain& truth);

DayScore score_day(const TripChain& pred, const TripChain& truth);

struct HorizonScore {
  std::vector<DayScore> per_day;
  double mean_accuracy = 0.0;
  double stderr_accuracy = 0.0;
  double mean_edit_distance = 0.0;
  double stderr_edit_distance = 0.0;
};

// Scores day h of predictions against day h of truths; requires equal sizes.
HorizonScore evaluate_horizon(std::span<const TripChain> predictions,
                              std::span<const TripChain> truths);

// A named prediction method: given one user's history, the number of leading
// days it may treat as known, a horizon, and a seed, produce one predicted
// chain per future day.
struct Method {
  std::string name;
  std::function<std::vector<TripChain>(const UserHistory&, std::size_t known_end,
                                       std::size_t horizon, std::uint64_t seed)>
      predict;
};

struct ReportRow {
  std::string method;
  int horizon = 0;
  double accuracy_mean = 0.0;
  double accuracy_stderr = 0.0;
  double edit_distance_mean = 0.0;
  double edit_distance_stderr = 0.0;
  std::size_t n_users = 0;
};

struct UserBreakdownRow {
  std::string user_id;
  std::string method;
  int horizon = 0;
  double accuracy = 0.0;
  double edit_distance = 0.0;
};

struct Report {
  std::vector<ReportRow> rows;
  std::vector<UserBreakdownRow> per_user;
};

// Runs every method at every horizon for every user. The known prefix is the
// same for all horizons of one user: n_days - max(horizons). Scores are
// averaged per user first, then across users with equal weight; the reported
// standard error is std/sqrt(n_users). Seeds derive from `seed` per user so
// results are independent of evaluation order.
Report compare_methods(std::span<const UserHistory> histories, std::span<const Method> methods,
                       std::span<const int> horizons, std::uint64_t seed, int workers = 1);

std::string report_to_csv(const Report& report);

// Deterministic seed derivation for independent substreams.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace tripchain
