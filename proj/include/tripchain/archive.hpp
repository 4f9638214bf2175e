#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "tripchain/core.hpp"

namespace tripchain {

// On-disk corpus snapshot produced by ingest and consumed by every
// downstream command. Station names travel inline so the file is
// self-contained; loading re-interns them into a fresh table.
struct Archive {
  Calendar calendar;
  std::vector<UserHistory> users;  // sorted by user id
  StationTable stations;
};

// JSON layout (stable field order, users sorted by id, trips in canonical
// chain order) so rewriting the same corpus is byte-identical.
void save_archive(const std::filesystem::path& path, std::span<const UserHistory> users,
                  const StationTable& stations);

Archive load_archive(const std::filesystem::path& path);

}  // namespace tripchain
