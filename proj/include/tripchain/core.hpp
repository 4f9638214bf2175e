#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tripchain {

// Malformed or inconsistent input data. The CLI maps this to exit code 2.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dense id of an interned station token.
struct StationId {
  std::int32_t value = -1;
  friend auto operator<=>(const StationId&, const StationId&) = default;
};

// Bijective token <-> id table; ids are assigned in first-seen order and
// round-trip to the original token.
class StationTable {
 public:
  StationId intern(std::string_view token);
  const std::string& token(StationId id) const;
  std::size_t size() const { return tokens_.size(); }

 private:
  std::unordered_map<std::string, std::int32_t> ids_;
  std::vector<std::string> tokens_;
};

// One bus trip: departure hour (0-23) plus origin and destination stations.
// Ordering is lexicographic on (hour, origin, destination).
struct Trip {
  int hour = 0;
  StationId origin;
  StationId destination;
  friend auto operator<=>(const Trip&, const Trip&) = default;
};

struct TripHash {
  std::size_t operator()(const Trip& t) const noexcept;
};

// The set of trips a user makes in one day. Duplicates collapse and the
// internal order is canonical, so equal chains compare equal.
class TripChain {
 public:
  TripChain() = default;
  explicit TripChain(std::vector<Trip> trips);

  std::size_t size() const { return trips_.size(); }
  bool empty() const { return trips_.empty(); }
  bool contains(const Trip& t) const;
  const std::vector<Trip>& trips() const { return trips_; }
  auto begin() const { return trips_.begin(); }
  auto end() const { return trips_.end(); }

  friend bool operator==(const TripChain&, const TripChain&) = default;

 private:
  std::vector<Trip> trips_;  // sorted, unique
};

TripChain chain_from_trips(std::vector<Trip> trips);

// |a ∩ b| on canonical chains.
std::size_t intersection_size(const TripChain& a, const TripChain& b);

struct CalendarDay {
  std::chrono::sys_days date;
  int weekday = 1;  // 1 = Monday ... 7 = Sunday
  bool is_workday = true;
};

// A consecutive run of dated days. Construction validates that dates are
// strictly consecutive and that the stored weekday matches date arithmetic.
class Calendar {
 public:
  Calendar() = default;
  static Calendar from_days(std::vector<CalendarDay> days);

  std::size_t size() const { return days_.size(); }
  bool empty() const { return days_.empty(); }
  const CalendarDay& operator[](std::size_t i) const { return days_[i]; }
  auto begin() const { return days_.begin(); }
  auto end() const { return days_.end(); }

  // |i - j| in days; equals the index distance because days are consecutive.
  std::size_t day_gap(std::size_t i, std::size_t j) const {
    return i > j ? i - j : j - i;
  }

 private:
  std::vector<CalendarDay> days_;
};

int iso_weekday(std::chrono::sys_days date);
std::string format_date(std::chrono::sys_days date);
std::chrono::sys_days parse_date(std::string_view iso);  // throws DataError

struct SplitMarkers {
  std::size_t train_end = 0;
  std::size_t validation_end = 0;
  std::size_t test_end = 0;
};

// One user's day-indexed travel record. chains.size() == calendar.size().
struct UserHistory {
  std::string user_id;
  Calendar calendar;
  std::vector<TripChain> chains;
  SplitMarkers split;
};

// Trip <-> dense label index over a training window, with per-trip day counts
// n1 and unordered-pair co-occurrence counts f. Both count presence per day,
// not multiplicity, so f(i,j) <= min(n1(i), n1(j)).
class TripVocabulary {
 public:
  TripVocabulary() = default;
  static TripVocabulary build(std::span<const TripChain> train_chains);

  std::size_t size() const { return trips_.size(); }
  bool empty() const { return trips_.empty(); }
  std::optional<int> index_of(const Trip& t) const;
  const Trip& trip(int index) const { return trips_.at(static_cast<std::size_t>(index)); }
  int occurrences(int index) const { return day_counts_.at(static_cast<std::size_t>(index)); }
  int cooccurrence(int i, int j) const;
  std::size_t training_days() const { return training_days_; }

 private:
  std::unordered_map<Trip, int, TripHash> index_;
  std::vector<Trip> trips_;
  std::vector<int> day_counts_;
  std::vector<int> pair_counts_;  // dense m*m, symmetric, zero diagonal
  std::size_t training_days_ = 0;
};

// Vocabulary over history days [train_begin, train_end).
TripVocabulary build_vocabulary(const UserHistory& history, std::size_t train_begin,
                                std::size_t train_end);

// Weights of the day-similarity function; ablation may pin one to exactly 0.
struct SimilarityParams {
  double a1 = 1.0;  // same weekday
  double a2 = 1.0;  // same workday/holiday type
  double a3 = 1.0;  // recency, a3 / (gap + 1)
  friend bool operator==(const SimilarityParams&, const SimilarityParams&) = default;
};

enum class Pipeline { kLabelPropagation, kEmbedForest };

struct AblationFlags {
  bool drop_feature1 = false;
  bool drop_feature2 = false;
  bool drop_feature3 = false;
  bool disable_correlation = false;
  friend bool operator==(const AblationFlags&, const AblationFlags&) = default;
};

struct HyperParams {
  SimilarityParams similarity;
  Pipeline pipeline = Pipeline::kLabelPropagation;
  int neighbor_count = 4;           // K
  double refresh_rate = 0.2;        // alpha, in (0,1)
  int embedding_dim = 16;           // k
  double correlation_weight = 1.0;  // lambda
  AblationFlags ablation;
  friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

}  // namespace tripchain
