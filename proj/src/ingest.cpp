#include "tripchain/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string_view>

namespace tripchain {
namespace {

constexpr std::string_view kRecordsHeader = "card_id,departure_time,origin,destination";
constexpr std::string_view kCalendarHeader = "date,weekday,is_workday";

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

bool parse_int(std::string_view text, int& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

// Accepts `YYYY-MM-DDTHH:MM:SS`; fills the record's date and clock fields.
bool parse_timestamp(std::string_view text, RawRecord& record) {
  const std::size_t sep = text.find('T');
  if (sep == std::string_view::npos) return false;
  try {
    record.date = parse_date(text.substr(0, sep));
  } catch (const DataError&) {
    return false;
  }
  const std::string_view clock = text.substr(sep + 1);
  if (clock.size() != 8 || clock[2] != ':' || clock[5] != ':') return false;
  if (!parse_int(clock.substr(0, 2), record.hour) ||
      !parse_int(clock.substr(3, 2), record.minute) ||
      !parse_int(clock.substr(6, 2), record.second)) {
    return false;
  }
  return record.hour >= 0 && record.hour <= 23 && record.minute >= 0 &&
         record.minute <= 59 && record.second >= 0 && record.second <= 59;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

ParseResult parse_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open records file " + path.string());
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != kRecordsHeader) {
    throw DataError("records file " + path.string() + " must start with header '" +
                    std::string(kRecordsHeader) + "'");
  }

  ParseResult result;
  std::size_t line_number = 1;
  std::size_t data_rows = 0;
  while (std::getline(in, line)) {
    ++line_number;
    line = strip_cr(line);
    if (line.empty()) continue;
    ++data_rows;

    const auto fields = split_fields(line);
    std::string reason;
    RawRecord record;
    if (fields.size() != 4) {
      reason = "expected 4 fields; saw " + std::to_string(fields.size());
    } else if (fields[0].empty() || fields[1].empty() || fields[2].empty() ||
               fields[3].empty()) {
      reason = "empty field";
    } else if (record.card_id = std::string(fields[0]),
               record.origin = std::string(fields[2]),
               record.destination = std::string(fields[3]),
               !parse_timestamp(fields[1], record)) {
      reason = "unparseable departure_time";
    }

    if (reason.empty()) {
      result.records.push_back(std::move(record));
    } else {
      result.rejects.push_back({line_number, line, std::move(reason)});
    }
  }

  if (result.rejects.size() * 10 > data_rows) {
    throw DataError("records file " + path.string() + " has " +
                    std::to_string(result.rejects.size()) + " malformed rows out of " +
                    std::to_string(data_rows) + " (over the 10% tolerance)");
  }
  return result;
}

void write_rejects_csv(const std::filesystem::path& path,
                       std::span<const RejectedRow> rejects) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write rejects file " + path.string());
  out << kRecordsHeader << ",reason\n";
  for (const auto& reject : rejects) out << reject.row << ',' << reject.reason << '\n';
}

Calendar load_calendar(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open calendar file " + path.string());
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != kCalendarHeader) {
    throw DataError("calendar file " + path.string() + " must start with header '" +
                    std::string(kCalendarHeader) + "'");
  }

  std::vector<CalendarDay> days;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    const std::string where = path.string() + ":" + std::to_string(line_number);
    if (fields.size() != 3) {
      throw DataError("calendar row at " + where + " needs 3 fields");
    }
    CalendarDay day;
    day.date = parse_date(fields[0]);
    int workday = 0;
    if (!parse_int(fields[1], day.weekday) || !parse_int(fields[2], workday) ||
        (workday != 0 && workday != 1)) {
      throw DataError("calendar row at " + where + " has a non-numeric or out-of-range field");
    }
    day.is_workday = workday == 1;
    days.push_back(day);
  }
  return Calendar::from_days(std::move(days));
}

UserHistory assemble_history(std::span<const RawRecord> records, const Calendar& calendar,
                             const std::string& card_id, StationTable& stations) {
  if (calendar.empty()) throw DataError("calendar is empty");
  const std::chrono::sys_days start = calendar[0].date;

  std::vector<std::set<Trip>> per_day(calendar.size());
  for (const auto& record : records) {
    if (record.card_id != card_id) continue;
    const auto offset = (record.date - start).count();
    if (offset < 0 || static_cast<std::size_t>(offset) >= calendar.size()) {
      throw DataError("record dated " + format_date(record.date) + " for card " +
                      card_id + " falls outside the calendar");
    }
    per_day[static_cast<std::size_t>(offset)].insert(
        Trip{record.hour, stations.intern(record.origin), stations.intern(record.destination)});
  }

  UserHistory history;
  history.user_id = card_id;
  history.calendar = calendar;
  history.chains.reserve(per_day.size());
  for (const auto& trips : per_day) {
    history.chains.push_back(
        chain_from_trips(std::vector<Trip>(trips.begin(), trips.end())));
  }
  return history;
}

std::vector<UserHistory> assemble_all(std::span<const RawRecord> records,
                                      const Calendar& calendar, StationTable& stations,
                                      std::size_t min_active_days) {
  std::map<std::string, std::vector<RawRecord>> by_card;
  for (const auto& record : records) by_card[record.card_id].push_back(record);

  std::vector<UserHistory> users;
  for (const auto& [card_id, card_records] : by_card) {
    UserHistory history = assemble_history(card_records, calendar, card_id, stations);
    const std::size_t active =
        static_cast<std::size_t>(std::count_if(history.chains.begin(), history.chains.end(),
                                               [](const TripChain& c) { return !c.trips().empty(); }));
    if (active >= min_active_days) users.push_back(std::move(history));
  }
  return users;
}

}  // namespace tripchain
