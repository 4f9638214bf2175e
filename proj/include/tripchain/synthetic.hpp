#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tripchain/core.hpp"

namespace tripchain {

enum class Archetype { kRepeatDominated, kRepeatEvolve, kEvolveDominated };

Archetype archetype_from_string(const std::string& name);
std::string archetype_to_string(Archetype a);

// Template-plus-noise traveler model. Repeat-dominated users hold one chain
// template per workday weekday (a shared commute pair plus weekday-specific
// extras) and one holiday template; repeat-evolve users redraw all templates
// at each changepoint; evolve-dominated users run a single weekday-agnostic
// template that mutates one station per drift step and is redrawn whole at
// each changepoint.
struct ArchetypeSpec {
  Archetype archetype = Archetype::kRepeatDominated;
  double noise_rate = 0.1;                 // per-trip disturbance probability
  std::vector<std::size_t> changepoints;   // template redraw days
  double drift_rate = 0.0;                 // per-day mutation probability (evolve)
  int station_count = 12;
  int max_weekday_extras = 2;
  bool shared_commute = true;  // false: fully independent weekday templates
};

// Deterministic under (spec, calendar, seed). Stations are interned into the
// shared table so corpora can be serialized and re-ingested.
UserHistory generate_user(const ArchetypeSpec& spec, const Calendar& calendar,
                          std::uint64_t seed, StationTable& stations, std::string user_id);

// Draws each user's archetype from the (normalized) mix weights.
std::vector<UserHistory> generate_population(
    std::span<const std::pair<ArchetypeSpec, double>> mix, std::size_t n_users,
    const Calendar& calendar, std::uint64_t seed, StationTable& stations);

// A calendar where weekends plus the listed festival day indices are rest days.
Calendar make_synthetic_calendar(std::chrono::sys_days start, std::size_t n_days,
                                 std::span<const std::size_t> festival_days = {});

// Serializes a corpus to the record/calendar CSV formats the ingest side
// reads back (record rows ordered by user, day, canonical trip order).
void write_corpus_csv(std::span<const UserHistory> users, const StationTable& stations,
                      const std::filesystem::path& records_path,
                      const std::filesystem::path& calendar_path);

}  // namespace tripchain
