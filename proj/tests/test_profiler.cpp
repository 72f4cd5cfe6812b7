#include "doctest.h"

#include <algorithm>

#include "coach/errors.hpp"
#include "coach/profiler.hpp"
#include "support.hpp"

using coach::Expected;

namespace {

const coach::Profile& strict_profile(const std::string& suite) {
  static std::map<std::string, coach::Profile> cache;
  auto it = cache.find(suite);
  if (it == cache.end()) {
    coach::ProfileOptions o;
    o.suite_name = suite;
    it = cache.emplace(suite, coach::run_profile(support::suite(suite), support::strict(), o)).first;
  }
  return it->second;
}

coach::ItemRecord record(const std::string& id, Expected e, const std::string& verdict, std::size_t readings) {
  coach::ItemRecord r;
  r.id = id;
  r.sentence = id;
  r.expected = e;
  r.verdict = verdict;
  r.readings = readings;
  return r;
}

coach::Profile profile_of(std::vector<coach::ItemRecord> records) {
  coach::Profile p;
  p.version_label = "v";
  p.suite = "s";
  p.records = std::move(records);
  p.aggregates = coach::compute_aggregates(p.records);
  return p;
}

}  // namespace

TEST_CASE("suite parsing") {
  auto items = coach::parse_suite("# comment\n\nx1\tgrammatical\tla abuela duerme\nx2\t\t*el abuelo alta duerme\n"
                                  "x3\tlearner\t*las personas altos duermen\n");
  REQUIRE(items.size() == 3);
  CHECK(items[0].expected == Expected::grammatical);
  CHECK(items[1].expected == Expected::ungrammatical);
  CHECK(items[1].sentence == "el abuelo alta duerme");
  CHECK(items[2].expected == Expected::learner);
  CHECK(items[2].sentence == "las personas altos duermen");
  CHECK(coach::parse_expected("learner") == Expected::learner);
  CHECK(coach::to_string(Expected::ungrammatical) == "ungrammatical");
}

TEST_CASE("malformed suites are input errors") {
  CHECK_THROWS_AS(coach::parse_suite("only two\tfields\n"), coach::InputError);
  CHECK_THROWS_AS(coach::parse_suite("a\tgrammatical\tx\na\tgrammatical\ty\n"), coach::InputError);
  CHECK_THROWS_AS(coach::parse_suite("a\tgrammatical\t*x\n"), coach::InputError);
  CHECK_THROWS_AS(coach::parse_suite("a\tmaybe\tx\n"), coach::InputError);
  CHECK_THROWS_AS(coach::parse_suite("a\tgrammatical\t\n"), coach::InputError);
  CHECK_THROWS_AS(coach::read_suite("/nonexistent/suite.tsv"), coach::InputError);
}

TEST_CASE("bundled suites have the documented sizes") {
  CHECK(support::suite("grammatical").size() == 20);
  CHECK(support::suite("learner").size() == 12);
  CHECK_FALSE(support::suite("ambiguity").empty());
  for (const auto& item : support::suite("learner")) CHECK(item.expected == Expected::learner);
}

TEST_CASE("aggregates") {
  auto a = coach::compute_aggregates({record("a", Expected::grammatical, "grammatical", 2),
                                      record("b", Expected::grammatical, "no_parse", 0),
                                      record("c", Expected::ungrammatical, "grammatical", 4),
                                      record("d", Expected::learner, "learner", 3)});
  CHECK(a.items == 4);
  CHECK(a.covered == 3);
  CHECK(a.coverage_pct == doctest::Approx(75.0));
  CHECK(a.overgeneration_pct == doctest::Approx(50.0));
  CHECK(a.mean_readings == doctest::Approx(3.0));
  auto none = coach::compute_aggregates({});
  CHECK(none.items == 0);
  CHECK(none.coverage_pct == 0);
  CHECK(none.mean_readings == 0);
}

TEST_CASE("coverage partition of the strict and learner grammars") {
  CHECK(strict_profile("grammatical").aggregates.coverage_pct == doctest::Approx(100.0));
  CHECK(strict_profile("learner").aggregates.coverage_pct == doctest::Approx(0.0));
  for (const auto& r : strict_profile("learner").records) CHECK(r.verdict == "no_parse");

  for (const char* name : {"grammatical", "learner"}) {
    auto p = coach::run_profile(support::suite(name), support::learner());
    CHECK(p.aggregates.coverage_pct == doctest::Approx(100.0));
    for (const auto& r : p.records) {
      CHECK_MESSAGE(coach::item_correct(r), r.id);
      if (r.expected == Expected::learner) CHECK(r.learner_uses > 0);
    }
  }
}

TEST_CASE("records are sorted and aggregates recompute from them") {
  const auto& p = strict_profile("ambiguity");
  CHECK(std::is_sorted(p.records.begin(), p.records.end(),
                       [](const auto& x, const auto& y) { return x.id < y.id; }));
  CHECK(coach::compute_aggregates(p.records) == p.aggregates);
  CHECK(p.suite == "ambiguity");
  CHECK(p.version_label == support::strict().version_label);
}

TEST_CASE("profiles round-trip through JSON and reject tampering") {
  const auto& p = strict_profile("ambiguity");
  auto text = coach::profile_to_json(p);
  auto back = coach::profile_from_json(text);
  CHECK(coach::profile_to_json(back) == text);
  CHECK(back.aggregates == p.aggregates);
  REQUIRE(back.records.size() == p.records.size());
  CHECK(back.records[0].best_derivation == p.records[0].best_derivation);

  auto tampered = p;
  tampered.aggregates.covered += 1;
  CHECK_THROWS_AS(coach::profile_from_json(coach::profile_to_json(tampered)), coach::InputError);
  CHECK_THROWS_AS(coach::profile_from_json("{}"), coach::InputError);
  CHECK_THROWS_AS(coach::profile_from_json("not json"), coach::InputError);
  auto schema = text;
  schema.replace(schema.find(coach::kProfileSchema), coach::kProfileSchema.size(), "other/9");
  CHECK_THROWS_AS(coach::profile_from_json(schema), coach::InputError);
}

TEST_CASE("comparing a profile with itself changes nothing") {
  const auto& p = strict_profile("grammatical");
  auto c = coach::compare_profiles(p, p);
  CHECK(c.verdict_changes.empty());
  CHECK(c.regressions.empty());
  for (const auto& d : c.items) {
    CHECK(d.readings == 0);
    CHECK(d.edges_built == 0);
    CHECK(d.unification_attempts == 0);
  }
  CHECK(coach::format_comparison(c).find("regressions: 0") != std::string::npos);
}

TEST_CASE("the rule filter shows up as negative work deltas") {
  coach::ProfileOptions off;
  off.parse.rule_filter = false;
  auto unfiltered = coach::run_profile(support::suite("grammatical"), support::strict(), off);
  CHECK_FALSE(unfiltered.rule_filter);
  auto c = coach::compare_profiles(unfiltered, strict_profile("grammatical"));
  CHECK(c.verdict_changes.empty());
  long long attempts = 0;
  for (const auto& d : c.items) {
    CHECK(d.readings == 0);
    CHECK(d.unification_attempts <= 0);
    attempts += d.unification_attempts;
  }
  CHECK(attempts < 0);
  CHECK(c.b.unification_attempts < c.a.unification_attempts);
}

TEST_CASE("profiles over different items cannot be compared") {
  auto a = profile_of({record("x", Expected::grammatical, "grammatical", 1),
                       record("y", Expected::grammatical, "grammatical", 1)});
  auto b = profile_of({record("y", Expected::grammatical, "grammatical", 1),
                       record("z", Expected::grammatical, "grammatical", 1)});
  try {
    coach::compare_profiles(a, b);
    FAIL("expected an error");
  } catch (const coach::InputError& e) {
    std::string what = e.what();
    CHECK(what.find("x") != std::string::npos);
    CHECK(what.find("z") != std::string::npos);
  }
}

TEST_CASE("regressions are verdicts that stop matching the annotation") {
  auto a = profile_of({record("x", Expected::grammatical, "grammatical", 1),
                       record("y", Expected::ungrammatical, "no_parse", 0),
                       record("z", Expected::grammatical, "no_parse", 0)});
  auto b = profile_of({record("x", Expected::grammatical, "no_parse", 0),
                       record("y", Expected::ungrammatical, "learner", 1),
                       record("z", Expected::grammatical, "grammatical", 2)});
  auto c = coach::compare_profiles(a, b);
  CHECK(c.regressions == std::vector<std::string>{"x"});
  CHECK(c.verdict_changes == std::vector<std::string>{"x", "y", "z"});
  auto text = coach::format_comparison(c);
  CHECK(text.find("REGRESSION") != std::string::npos);
  CHECK(text.find("regressions: 1") != std::string::npos);
}

TEST_CASE("the underconstrained grammar overgenerates on starred sentences") {
  coach::ProfileOptions o;
  auto loose = coach::run_profile(support::suite("ambiguity"), support::underconstrained(), o);
  const auto& tight = strict_profile("ambiguity");
  std::size_t only_loose = 0;
  for (std::size_t i = 0; i < loose.records.size(); ++i) {
    const auto& l = loose.records[i];
    const auto& t = tight.records[i];
    REQUIRE(l.id == t.id);
    if (l.expected == Expected::ungrammatical && l.readings > 0 && t.readings == 0) ++only_loose;
  }
  CHECK(only_loose > 0);
  auto c = coach::compare_profiles(loose, tight);
  CHECK(c.b.mean_readings < c.a.mean_readings);
  CHECK(c.b.overgeneration_pct < c.a.overgeneration_pct);
}

TEST_CASE("profiles are deterministic across thread counts") {
  coach::ProfileOptions four;
  four.threads = 4;
  four.suite_name = "ambiguity";
  auto p = coach::run_profile(support::suite("ambiguity"), support::strict(), four);
  const auto& q = strict_profile("ambiguity");
  REQUIRE(p.records.size() == q.records.size());
  for (std::size_t i = 0; i < p.records.size(); ++i) {
    CHECK(p.records[i].id == q.records[i].id);
    CHECK(p.records[i].verdict == q.records[i].verdict);
    CHECK(p.records[i].readings == q.records[i].readings);
    CHECK(p.records[i].edges_built == q.records[i].edges_built);
    CHECK(p.records[i].unification_attempts == q.records[i].unification_attempts);
    CHECK(p.records[i].best_derivation == q.records[i].best_derivation);
  }
  CHECK(p.aggregates == q.aggregates);
}
