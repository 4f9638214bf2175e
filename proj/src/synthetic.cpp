#include "tripchain/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>

#include "tripchain/evaluation.hpp"

namespace tripchain {

Archetype archetype_from_string(const std::string& name) {
  if (name == "repeat-dominated") return Archetype::kRepeatDominated;
  if (name == "repeat-evolve") return Archetype::kRepeatEvolve;
  if (name == "evolve-dominated") return Archetype::kEvolveDominated;
  throw DataError("unknown archetype '" + name + "'");
}

std::string archetype_to_string(Archetype a) {
  switch (a) {
    case Archetype::kRepeatDominated: return "repeat-dominated";
    case Archetype::kRepeatEvolve: return "repeat-evolve";
    case Archetype::kEvolveDominated: return "evolve-dominated";
  }
  throw std::logic_error("unreachable");
}

namespace {

struct TemplateSet {
  std::vector<std::vector<Trip>> weekday;  // index 0..6 -> weekday 1..7
  std::vector<Trip> holiday;
};

struct Generator {
  const ArchetypeSpec& spec;
  StationTable& stations;
  std::mt19937_64 rng;

  StationId station(int index) {
    return stations.intern("S" + std::to_string(index));
  }
  StationId random_station() {
    std::uniform_int_distribution<int> pick(0, spec.station_count - 1);
    return station(pick(rng));
  }
  StationId random_station_not(StationId avoid) {
    for (;;) {
      auto s = random_station();
      if (!(s == avoid)) return s;
    }
  }

  // With a shared commute, every workday weekday holds one commute pair plus
  // weekday-specific midday extras; otherwise each weekday template is an
  // independent 2-3 trip chain. Weekends and festivals share one leisure
  // template either way.
  TemplateSet draw_repeat_templates() {
    TemplateSet set;
    set.weekday.resize(7);
    if (spec.shared_commute) {
      std::uniform_int_distribution<int> out_hour(7, 8), back_hour(17, 19);
      StationId home = random_station();
      StationId work = random_station_not(home);
      Trip commute_out{out_hour(rng), home, work};
      Trip commute_back{back_hour(rng), work, home};
      std::uniform_int_distribution<int> extra_count(0, spec.max_weekday_extras);
      std::uniform_int_distribution<int> midday(10, 16);
      for (int wd = 0; wd < 5; ++wd) {
        auto& chain = set.weekday[static_cast<std::size_t>(wd)];
        chain = {commute_out, commute_back};
        int extras = extra_count(rng);
        for (int e = 0; e < extras; ++e) {
          StationId a = random_station();
          chain.push_back(Trip{midday(rng), a, random_station_not(a)});
        }
      }
    } else {
      for (int wd = 0; wd < 5; ++wd) {
        set.weekday[static_cast<std::size_t>(wd)] = draw_evolve_template();
      }
    }
    std::uniform_int_distribution<int> leisure_hour(9, 20), leisure_count(1, 2);
    std::vector<Trip> leisure;
    int n_leisure = leisure_count(rng);
    for (int e = 0; e < n_leisure; ++e) {
      StationId a = random_station();
      leisure.push_back(Trip{leisure_hour(rng), a, random_station_not(a)});
    }
    set.weekday[5] = leisure;
    set.weekday[6] = leisure;
    set.holiday = leisure;
    return set;
  }

  std::vector<Trip> draw_evolve_template() {
    std::vector<Trip> chain;
    std::uniform_int_distribution<int> count(2, 3), hour(7, 20);
    int n = count(rng);
    for (int e = 0; e < n; ++e) {
      StationId a = random_station();
      chain.push_back(Trip{hour(rng), a, random_station_not(a)});
    }
    return chain;
  }

  // Each template trip independently survives intact, vanishes, or shifts by
  // one hour.
  TripChain emit_day(const std::vector<Trip>& tmpl) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Trip> trips;
    for (const auto& trip : tmpl) {
      if (unit(rng) >= spec.noise_rate) {
        trips.push_back(trip);
        continue;
      }
      if (unit(rng) < 0.5) continue;  // dropped
      Trip moved = trip;
      moved.hour = std::clamp(trip.hour + (unit(rng) < 0.5 ? -1 : 1), 0, 23);
      trips.push_back(moved);
    }
    return TripChain(std::move(trips));
  }
};

}  // namespace

UserHistory generate_user(const ArchetypeSpec& spec, const Calendar& calendar,
                          std::uint64_t seed, StationTable& stations, std::string user_id) {
  if (spec.noise_rate < 0.0 || spec.noise_rate > 1.0) {
    throw std::invalid_argument("noise rate must lie in [0,1]");
  }
  if (spec.station_count < 2) throw std::invalid_argument("need at least two stations");
  if (!std::is_sorted(spec.changepoints.begin(), spec.changepoints.end())) {
    throw std::invalid_argument("changepoints must be sorted");
  }

  UserHistory user;
  user.user_id = std::move(user_id);
  user.calendar = calendar;
  user.chains.reserve(calendar.size());

  Generator gen{spec, stations, std::mt19937_64(seed)};
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  if (spec.archetype == Archetype::kEvolveDominated) {
    auto tmpl = gen.draw_evolve_template();
    std::size_t next_change = 0;
    for (std::size_t d = 0; d < calendar.size(); ++d) {
      if (next_change < spec.changepoints.size() && d == spec.changepoints[next_change]) {
        tmpl = gen.draw_evolve_template();
        ++next_change;
      } else if (d > 0 && unit(gen.rng) < spec.drift_rate && !tmpl.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, tmpl.size() - 1);
        auto& trip = tmpl[pick(gen.rng)];
        if (unit(gen.rng) < 0.5) {
          trip.origin = gen.random_station_not(trip.destination);
        } else {
          trip.destination = gen.random_station_not(trip.origin);
        }
      }
      user.chains.push_back(gen.emit_day(tmpl));
    }
    return user;
  }

  auto templates = gen.draw_repeat_templates();
  std::size_t next_change = 0;
  for (std::size_t d = 0; d < calendar.size(); ++d) {
    if (spec.archetype == Archetype::kRepeatEvolve && next_change < spec.changepoints.size() &&
        d == spec.changepoints[next_change]) {
      templates = gen.draw_repeat_templates();
      ++next_change;
    }
    const auto& tmpl = calendar[d].is_workday
                           ? templates.weekday[static_cast<std::size_t>(calendar[d].weekday - 1)]
                           : templates.holiday;
    user.chains.push_back(gen.emit_day(tmpl));
  }
  return user;
}

std::vector<UserHistory> generate_population(
    std::span<const std::pair<ArchetypeSpec, double>> mix, std::size_t n_users,
    const Calendar& calendar, std::uint64_t seed, StationTable& stations) {
  if (mix.empty()) throw std::invalid_argument("archetype mix must not be empty");
  double total_weight = 0.0;
  for (const auto& [spec, weight] : mix) {
    if (weight < 0.0) throw std::invalid_argument("mix weights must be nonnegative");
    total_weight += weight;
  }
  if (total_weight <= 0.0) throw std::invalid_argument("mix weights must not all be zero");

  std::vector<UserHistory> users;
  users.reserve(n_users);
  std::mt19937_64 archetype_rng(mix_seed(seed, 0));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t u = 0; u < n_users; ++u) {
    double roll = unit(archetype_rng) * total_weight;
    std::size_t chosen = 0;
    double acc = 0.0;
    for (std::size_t s = 0; s < mix.size(); ++s) {
      acc += mix[s].second;
      if (roll < acc) {
        chosen = s;
        break;
      }
      chosen = s;
    }
    char name[16];
    std::snprintf(name, sizeof(name), "u%04zu", u);
    users.push_back(generate_user(mix[chosen].first, calendar, mix_seed(seed, u + 1), stations,
                                  name));
  }
  return users;
}

Calendar make_synthetic_calendar(std::chrono::sys_days start, std::size_t n_days,
                                 std::span<const std::size_t> festival_days) {
  std::vector<CalendarDay> days;
  days.reserve(n_days);
  auto date = start;
  for (std::size_t i = 0; i < n_days; ++i) {
    int wd = iso_weekday(date);
    bool workday = wd <= 5;
    if (std::find(festival_days.begin(), festival_days.end(), i) != festival_days.end()) {
      workday = false;
    }
    days.push_back({date, wd, workday});
    date += std::chrono::days{1};
  }
  return Calendar::from_days(std::move(days));
}

void write_corpus_csv(std::span<const UserHistory> users, const StationTable& stations,
                      const std::filesystem::path& records_path,
                      const std::filesystem::path& calendar_path) {
  if (users.empty()) throw std::invalid_argument("corpus must contain at least one user");

  std::ofstream records(records_path);
  if (!records) throw DataError("cannot write " + records_path.string());
  records << "card_id,departure_time,origin,destination\n";
  for (const auto& user : users) {
    for (std::size_t d = 0; d < user.chains.size(); ++d) {
      std::string date = format_date(user.calendar[d].date);
      for (const auto& trip : user.chains[d]) {
        char hour[8];
        std::snprintf(hour, sizeof(hour), "%02d", trip.hour);
        records << user.user_id << ',' << date << 'T' << hour << ":00:00,"
                << stations.token(trip.origin) << ',' << stations.token(trip.destination)
                << '\n';
      }
    }
  }

  std::ofstream calendar(calendar_path);
  if (!calendar) throw DataError("cannot write " + calendar_path.string());
  calendar << "date,weekday,is_workday\n";
  for (const auto& day : users.front().calendar) {
    calendar << format_date(day.date) << ',' << day.weekday << ',' << (day.is_workday ? 1 : 0)
             << '\n';
  }
}

}  // namespace tripchain
