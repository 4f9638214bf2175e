#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tripchain/core.hpp"

namespace tripchain {

// One smart-card tap-in, at the granularity the raw feed provides. The
// departure timestamp is kept whole; hour flooring happens during assembly.
struct RawRecord {
  std::string card_id;
  std::chrono::sys_days date;
  int hour = 0;
  int minute = 0;
  int second = 0;
  std::string origin;
  std::string destination;
};

struct RejectedRow {
  std::size_t line_number = 0;  // 1-based, counting the header as line 1
  std::string row;
  std::string reason;  // never contains commas, so rejects CSVs stay flat
};

struct ParseResult {
  std::vector<RawRecord> records;
  std::vector<RejectedRow> rejects;
};

// Reads a records CSV (`card_id,departure_time,origin,destination`).
// Malformed rows land in `rejects` with a reason instead of being dropped;
// if more than 10% of data rows are malformed the file is considered
// corrupt and a DataError is thrown. Missing file or wrong header also throw.
ParseResult parse_records(const std::filesystem::path& path);

// Writes rejected rows verbatim with a trailing `reason` column.
void write_rejects_csv(const std::filesystem::path& path,
                       std::span<const RejectedRow> rejects);

// Reads and validates a `date,weekday,is_workday` CSV (ISO dates, weekday
// 1-7 consistent with the date, consecutive days).
Calendar load_calendar(const std::filesystem::path& path);

// Collapses one card's records into a day-indexed history: hour-floored
// trips deduplicated per day, empty chains on travel-free days. A record
// dated outside the calendar throws a DataError naming the date.
UserHistory assemble_history(std::span<const RawRecord> records, const Calendar& calendar,
                             const std::string& card_id, StationTable& stations);

// Assembles every card present in `records` (sorted by card id) and keeps
// users with at least `min_active_days` non-empty days.
std::vector<UserHistory> assemble_all(std::span<const RawRecord> records,
                                      const Calendar& calendar, StationTable& stations,
                                      std::size_t min_active_days = 50);

}  // namespace tripchain
