#include "tripchain/archive.hpp"

#include <algorithm>
#include <fstream>

#include "json.hpp"

namespace tripchain {
namespace {

constexpr const char* kFormatTag = "tripchain-archive-v1";

}  // namespace

void save_archive(const std::filesystem::path& path, std::span<const UserHistory> users,
                  const StationTable& stations) {
  const Calendar* calendar = users.empty() ? nullptr : &users.front().calendar;
  for (const auto& user : users) {
    if (user.chains.size() != user.calendar.size() ||
        user.calendar.size() != calendar->size() ||
        (calendar->size() > 0 && user.calendar[0].date != (*calendar)[0].date)) {
      throw DataError("archive users must share one calendar covering every chain");
    }
  }

  nlohmann::ordered_json doc;
  doc["format"] = kFormatTag;
  doc["calendar"] = nlohmann::ordered_json::array();
  if (calendar != nullptr) {
    for (const auto& day : *calendar) {
      doc["calendar"].push_back({format_date(day.date), day.weekday, day.is_workday ? 1 : 0});
    }
  }

  std::vector<std::size_t> order(users.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return users[a].user_id < users[b].user_id;
  });

  doc["users"] = nlohmann::ordered_json::array();
  for (const std::size_t u : order) {
    nlohmann::ordered_json entry;
    entry["id"] = users[u].user_id;
    auto chains = nlohmann::ordered_json::array();
    for (const auto& chain : users[u].chains) {
      auto day = nlohmann::ordered_json::array();
      for (const auto& trip : chain.trips()) {
        day.push_back({trip.hour, stations.token(trip.origin),
                       stations.token(trip.destination)});
      }
      chains.push_back(std::move(day));
    }
    entry["chains"] = std::move(chains);
    doc["users"].push_back(std::move(entry));
  }

  std::ofstream out(path);
  if (!out) throw DataError("cannot write archive " + path.string());
  out << doc.dump(2) << '\n';
}

Archive load_archive(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open archive " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("archive " + path.string() + " is not valid JSON: " + e.what());
  }

  Archive archive;
  try {
    if (doc.at("format").get<std::string>() != kFormatTag) {
      throw DataError("archive " + path.string() + " has an unsupported format tag");
    }
    std::vector<CalendarDay> days;
    for (const auto& row : doc.at("calendar")) {
      CalendarDay day;
      day.date = parse_date(row.at(0).get<std::string>());
      day.weekday = row.at(1).get<int>();
      day.is_workday = row.at(2).get<int>() == 1;
      days.push_back(day);
    }
    archive.calendar = Calendar::from_days(std::move(days));

    for (const auto& entry : doc.at("users")) {
      UserHistory user;
      user.user_id = entry.at("id").get<std::string>();
      user.calendar = archive.calendar;
      const auto& chains = entry.at("chains");
      if (chains.size() != archive.calendar.size()) {
        throw DataError("archive user " + user.user_id + " has " +
                        std::to_string(chains.size()) + " chains for a " +
                        std::to_string(archive.calendar.size()) + "-day calendar");
      }
      for (const auto& day : chains) {
        std::vector<Trip> trips;
        for (const auto& item : day) {
          const int hour = item.at(0).get<int>();
          if (hour < 0 || hour > 23) {
            throw DataError("archive user " + user.user_id + " has trip hour " +
                            std::to_string(hour) + " outside 0-23");
          }
          trips.push_back(Trip{hour, archive.stations.intern(item.at(1).get<std::string>()),
                               archive.stations.intern(item.at(2).get<std::string>())});
        }
        user.chains.push_back(chain_from_trips(std::move(trips)));
      }
      archive.users.push_back(std::move(user));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("archive " + path.string() + " is malformed: " + e.what());
  }
  return archive;
}

}  // namespace tripchain
