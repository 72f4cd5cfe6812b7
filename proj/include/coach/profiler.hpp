#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coach/grammar.hpp"
#include "coach/parser.hpp"

namespace coach {

enum class Expected { grammatical, ungrammatical, learner };
std::string_view to_string(Expected e);
Expected parse_expected(std::string_view s);

struct TestItem {
  std::string id;
  std::string sentence;  // without the leading '*'
  Expected expected = Expected::grammatical;
};

// One item per line: `id TAB expected TAB sentence`. A '*' before the
// sentence marks it ungrammatical; an empty expected field takes its value
// from the mark. Blank lines and lines starting with '#' are skipped.
std::vector<TestItem> parse_suite(std::string_view text);
std::vector<TestItem> read_suite(const std::string& path);
// "grammatical", "learner" and "ambiguity" name bundled suites; anything
// else is a path.
std::filesystem::path resolve_suite_path(const std::string& name_or_path);

inline constexpr std::string_view kProfileSchema = "coach-profile/1";

struct ItemRecord {
  std::string id;
  std::string sentence;
  Expected expected = Expected::grammatical;
  std::string verdict;  // grammatical | learner | no_parse | error
  std::size_t readings = 0;
  std::size_t edges_built = 0;
  std::size_t unification_attempts = 0;
  std::size_t learner_uses = 0;
  std::string best_derivation;
  std::string error;
  double wall_time_ms = 0;
};

struct Aggregates {
  std::size_t items = 0;
  std::size_t covered = 0;
  double coverage_pct = 0;
  // Items expected ungrammatical or learner that received the verdict
  // grammatical, as a share of all such items.
  double overgeneration_pct = 0;
  double mean_readings = 0;  // over covered items
  std::size_t edges_built = 0;
  std::size_t unification_attempts = 0;
  bool operator==(const Aggregates&) const = default;
};

struct Profile {
  std::string version_label;
  std::string suite;
  bool rule_filter = true;
  std::size_t supertag_k = 0;
  std::vector<ItemRecord> records;  // sorted by id
  Aggregates aggregates;
};

Aggregates compute_aggregates(const std::vector<ItemRecord>& records);

// Whether the verdict matches the suite annotation.
bool item_correct(const ItemRecord& r);

struct ProfileOptions {
  ParseOptions parse;
  std::size_t threads = 1;
  std::string suite_name;
};

Profile run_profile(const std::vector<TestItem>& suite, const Grammar& g, const ProfileOptions& opts = {});

std::string profile_to_json(const Profile& p);
// Rejects unknown schemas and profiles whose stored aggregates differ from
// the ones recomputed from the records.
Profile profile_from_json(std::string_view text);
void write_profile(const Profile& p, const std::string& path);
Profile read_profile(const std::string& path);

struct ItemDelta {
  std::string id;
  std::string verdict_a;
  std::string verdict_b;
  long long readings = 0;
  long long edges_built = 0;
  long long unification_attempts = 0;
  bool regressed = false;  // correct in a, incorrect in b
};

struct Comparison {
  std::string version_a;
  std::string version_b;
  std::vector<ItemDelta> items;
  Aggregates a;
  Aggregates b;
  std::vector<std::string> verdict_changes;
  std::vector<std::string> regressions;
};

// Throws InputError naming the identifiers missing on either side when the
// two profiles cover different items.
Comparison compare_profiles(const Profile& a, const Profile& b);
std::string format_comparison(const Comparison& c);

}  // namespace coach
