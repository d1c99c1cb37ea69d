#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ssg/growth.hpp"

namespace ssg {

inline constexpr int kTableFormatVersion = 1;

// A sphere table on disk, bound to one group config by its hash. flags[n][i]
// has bit k-1 set when element i of sphere n lies in I_k, k <= flag_depth.
struct PersistedTable {
  int format_version = kTableFormatVersion;
  std::string group_hash;
  std::size_t level = 0;  // compiled level index
  bool truncated = false;
  int flag_depth = 0;
  SphereTable table;
  std::vector<std::vector<std::uint16_t>> flags;

  int max_radius() const { return table.max_radius(); }
};

inline constexpr int kMaxFlagDepth = 16;

// Flags from compression depths, one vector per sphere.
std::vector<std::vector<std::uint16_t>> flags_from_depths(const std::vector<std::vector<std::uint8_t>>& depth,
                                                         int flag_depth);

// Throw FormatError on I/O failure or a malformed file.
void save_table(const std::string& path, const PersistedTable& t);
PersistedTable load_table(const std::string& path);

// Keeps spheres 0..radius.
void trim(PersistedTable& t, int radius);

std::string cache_path(const std::string& dir, const std::string& hash, std::size_t level, int radius);
// Cached table for this hash and level with the least radius >= `radius`.
std::optional<std::string> find_cached(const std::string& dir, const std::string& hash, std::size_t level,
                                       int radius);

}  // namespace ssg
