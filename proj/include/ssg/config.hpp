#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "ssg/family.hpp"
#include "ssg/tree.hpp"

namespace ssg {

struct Caps {
  int max_radius = 12;
  std::uint64_t max_elements = 20'000'000;  // per level
  int max_level_depth = 16;                 // compiled levels and k-depth
  std::uint64_t identity_budget = kDefaultIdentityBudget;
};

// A group as read from a JSON config. The document is kept whole so that
// the hash covers every field.
struct GroupConfig {
  std::string kind;
  nlohmann::json document;
  Caps caps;
};

// Throw FormatError on malformed JSON or schema mismatches.
GroupConfig parse_config(const std::string& text);
GroupConfig load_config(const std::string& path);

// Runs the catalog constructor for the config's kind. Parameter values the
// constructor rejects throw DomainError (CheckFailed for named checks).
FamilySpec build_family(const GroupConfig& config);

// FNV-1a of the canonical (sorted-key, compact) dump, as 16 hex digits.
std::string group_hash(const GroupConfig& config);

}  // namespace ssg
