#include "tripchain/core.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

namespace tripchain {

StationId StationTable::intern(std::string_view token) {
  if (token.empty()) {
    throw DataError("station token must not be empty");
  }
  auto it = ids_.find(std::string(token));
  if (it != ids_.end()) {
    return StationId{it->second};
  }
  auto id = static_cast<std::int32_t>(tokens_.size());
  tokens_.emplace_back(token);
  ids_.emplace(tokens_.back(), id);
  return StationId{id};
}

const std::string& StationTable::token(StationId id) const {
  if (id.value < 0 || static_cast<std::size_t>(id.value) >= tokens_.size()) {
    throw std::out_of_range("unknown station id");
  }
  return tokens_[static_cast<std::size_t>(id.value)];
}

std::size_t TripHash::operator()(const Trip& t) const noexcept {
  // Pack the three small ints and mix once (splitmix64 finalizer).
  auto x = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(t.hour)) << 48) ^
           (static_cast<std::uint64_t>(static_cast<std::uint32_t>(t.origin.value)) << 24) ^
           static_cast<std::uint64_t>(static_cast<std::uint32_t>(t.destination.value));
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return static_cast<std::size_t>(x ^ (x >> 31));
}

TripChain::TripChain(std::vector<Trip> trips) : trips_(std::move(trips)) {
  std::sort(trips_.begin(), trips_.end());
  trips_.erase(std::unique(trips_.begin(), trips_.end()), trips_.end());
}

bool TripChain::contains(const Trip& t) const {
  return std::binary_search(trips_.begin(), trips_.end(), t);
}

TripChain chain_from_trips(std::vector<Trip> trips) { return TripChain(std::move(trips)); }

std::size_t intersection_size(const TripChain& a, const TripChain& b) {
  std::size_t count = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++count;
      ++ia;
      ++ib;
    }
  }
  return count;
}

Calendar Calendar::from_days(std::vector<CalendarDay> days) {
  using namespace std::chrono;
  for (std::size_t i = 0; i < days.size(); ++i) {
    const auto& day = days[i];
    if (day.weekday < 1 || day.weekday > 7) {
      throw DataError("calendar weekday out of range at row " + std::to_string(i) + ": " +
                      std::to_string(day.weekday));
    }
    int expected = iso_weekday(day.date);
    if (day.weekday != expected) {
      throw DataError("calendar weekday mismatch on " + format_date(day.date) + ": stated " +
                      std::to_string(day.weekday) + ", actual " + std::to_string(expected));
    }
    if (i > 0 && days[i - 1].date + std::chrono::days{1} != day.date) {
      throw DataError("calendar dates not consecutive: " + format_date(days[i - 1].date) +
                      " then " + format_date(day.date));
    }
  }
  Calendar cal;
  cal.days_ = std::move(days);
  return cal;
}

int iso_weekday(std::chrono::sys_days date) {
  return static_cast<int>(std::chrono::weekday{date}.iso_encoding());
}

std::string format_date(std::chrono::sys_days date) {
  std::chrono::year_month_day ymd{date};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::chrono::sys_days parse_date(std::string_view iso) {
  auto fail = [&] {
    throw DataError("invalid date '" + std::string(iso) + "', expected YYYY-MM-DD");
  };
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') fail();
  auto parse_int = [&](std::string_view s) {
    int out = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || ptr != s.data() + s.size()) fail();
    return out;
  };
  int y = parse_int(iso.substr(0, 4));
  int m = parse_int(iso.substr(5, 2));
  int d = parse_int(iso.substr(8, 2));
  std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                  std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) fail();
  return std::chrono::sys_days{ymd};
}

TripVocabulary TripVocabulary::build(std::span<const TripChain> train_chains) {
  TripVocabulary vocab;
  vocab.training_days_ = train_chains.size();
  for (const auto& chain : train_chains) {
    for (const auto& trip : chain) {
      if (vocab.index_.emplace(trip, static_cast<int>(vocab.trips_.size())).second) {
        vocab.trips_.push_back(trip);
      }
    }
  }
  const std::size_t m = vocab.trips_.size();
  vocab.day_counts_.assign(m, 0);
  vocab.pair_counts_.assign(m * m, 0);
  std::vector<int> present;
  for (const auto& chain : train_chains) {
    present.clear();
    for (const auto& trip : chain) {
      present.push_back(vocab.index_.at(trip));
    }
    for (std::size_t a = 0; a < present.size(); ++a) {
      vocab.day_counts_[static_cast<std::size_t>(present[a])]++;
      for (std::size_t b = a + 1; b < present.size(); ++b) {
        auto i = static_cast<std::size_t>(present[a]);
        auto j = static_cast<std::size_t>(present[b]);
        vocab.pair_counts_[i * m + j]++;
        vocab.pair_counts_[j * m + i]++;
      }
    }
  }
  return vocab;
}

std::optional<int> TripVocabulary::index_of(const Trip& t) const {
  auto it = index_.find(t);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int TripVocabulary::cooccurrence(int i, int j) const {
  auto m = trips_.size();
  auto ui = static_cast<std::size_t>(i);
  auto uj = static_cast<std::size_t>(j);
  if (ui >= m || uj >= m) throw std::out_of_range("trip index out of range");
  return pair_counts_[ui * m + uj];
}

TripVocabulary build_vocabulary(const UserHistory& history, std::size_t train_begin,
                                std::size_t train_end) {
  if (train_end < train_begin || train_end > history.chains.size()) {
    throw std::out_of_range("training window out of range");
  }
  return TripVocabulary::build(
      std::span<const TripChain>(history.chains).subspan(train_begin, train_end - train_begin));
}

}  // namespace tripchain
