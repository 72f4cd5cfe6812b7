#include "coach/profiler.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "coach/coach.hpp"
#include "coach/errors.hpp"

namespace coach {

using nlohmann::json;

std::string_view to_string(Expected e) {
  switch (e) {
    case Expected::grammatical: return "grammatical";
    case Expected::ungrammatical: return "ungrammatical";
    case Expected::learner: return "learner";
  }
  return "grammatical";
}

Expected parse_expected(std::string_view s) {
  if (s == "grammatical") return Expected::grammatical;
  if (s == "ungrammatical") return Expected::ungrammatical;
  if (s == "learner") return Expected::learner;
  throw InputError("unknown expected value '" + std::string(s) + "'");
}

std::vector<TestItem> parse_suite(std::string_view text) {
  std::vector<TestItem> out;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto t1 = line.find('\t');
    auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) {
      throw InputError("suite line " + std::to_string(lineno) + ": expected id TAB expected TAB sentence");
    }
    TestItem item;
    item.id = line.substr(0, t1);
    std::string expected = line.substr(t1 + 1, t2 - t1 - 1);
    item.sentence = line.substr(t2 + 1);
    bool starred = !item.sentence.empty() && item.sentence[0] == '*';
    if (starred) item.sentence.erase(0, 1);
    if (item.id.empty()) throw InputError("suite line " + std::to_string(lineno) + ": empty identifier");
    if (item.sentence.empty()) throw InputError("suite line " + std::to_string(lineno) + ": empty sentence");
    if (!seen.insert(item.id).second) throw InputError("suite line " + std::to_string(lineno) + ": duplicate id '" + item.id + "'");
    if (expected.empty()) {
      item.expected = starred ? Expected::ungrammatical : Expected::grammatical;
    } else {
      item.expected = parse_expected(expected);
      if (starred && item.expected == Expected::grammatical) {
        throw InputError("suite line " + std::to_string(lineno) + ": starred sentence annotated grammatical");
      }
    }
    out.push_back(std::move(item));
  }
  return out;
}

std::vector<TestItem> read_suite(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read suite '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_suite(ss.str());
}

std::filesystem::path resolve_suite_path(const std::string& name_or_path) {
  if (name_or_path == "grammatical" || name_or_path == "learner" || name_or_path == "ambiguity") {
    return data_dir() / "suites" / (name_or_path + ".tsv");
  }
  return name_or_path;
}

Aggregates compute_aggregates(const std::vector<ItemRecord>& records) {
  Aggregates a;
  a.items = records.size();
  std::size_t negative = 0, overgenerated = 0, readings = 0;
  for (const auto& r : records) {
    a.edges_built += r.edges_built;
    a.unification_attempts += r.unification_attempts;
    if (r.readings > 0) {
      ++a.covered;
      readings += r.readings;
    }
    if (r.expected != Expected::grammatical) {
      ++negative;
      if (r.verdict == "grammatical") ++overgenerated;
    }
  }
  if (a.items) a.coverage_pct = 100.0 * static_cast<double>(a.covered) / static_cast<double>(a.items);
  if (negative) a.overgeneration_pct = 100.0 * static_cast<double>(overgenerated) / static_cast<double>(negative);
  if (a.covered) a.mean_readings = static_cast<double>(readings) / static_cast<double>(a.covered);
  return a;
}

bool item_correct(const ItemRecord& r) {
  switch (r.expected) {
    case Expected::grammatical: return r.verdict == "grammatical";
    case Expected::ungrammatical: return r.verdict == "no_parse" || r.verdict == "learner";
    case Expected::learner: return r.verdict == "learner";
  }
  return false;
}

namespace {

ItemRecord profile_item(const TestItem& item, const Parser& parser, const ParseOptions& opts) {
  ItemRecord r;
  r.id = item.id;
  r.sentence = item.sentence;
  r.expected = item.expected;
  try {
    ParseResult res = parser.parse(item.sentence, opts);
    r.readings = res.stats.readings_found;
    r.edges_built = res.stats.edges_built;
    r.unification_attempts = res.stats.unification_attempts;
    r.wall_time_ms = res.stats.wall_time_ms;
    if (const Reading* best = select_reading(res)) {
      r.learner_uses = best->learner_uses.size();
      r.best_derivation = best->derivation_string;
      r.verdict = best->learner_uses.empty() ? "grammatical" : "learner";
    } else {
      r.verdict = "no_parse";
    }
  } catch (const std::exception& e) {
    r = ItemRecord{};
    r.id = item.id;
    r.sentence = item.sentence;
    r.expected = item.expected;
    r.verdict = "error";
    r.error = e.what();
  }
  return r;
}

json record_json(const ItemRecord& r) {
  json j = {{"id", r.id},
            {"sentence", r.sentence},
            {"expected", to_string(r.expected)},
            {"verdict", r.verdict},
            {"readings", r.readings},
            {"edges_built", r.edges_built},
            {"unification_attempts", r.unification_attempts},
            {"learner_uses", r.learner_uses},
            {"best_derivation", r.best_derivation},
            {"wall_time_ms", r.wall_time_ms}};
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

json aggregates_json(const Aggregates& a) {
  return {{"items", a.items},
          {"covered", a.covered},
          {"coverage_pct", a.coverage_pct},
          {"overgeneration_pct", a.overgeneration_pct},
          {"mean_readings", a.mean_readings},
          {"edges_built", a.edges_built},
          {"unification_attempts", a.unification_attempts}};
}

}  // namespace

Profile run_profile(const std::vector<TestItem>& suite, const Grammar& g, const ProfileOptions& opts) {
  if (suite.empty()) throw PreconditionError("run_profile needs a non-empty suite");
  Parser parser(g);
  std::vector<ItemRecord> records(suite.size());
  const std::size_t threads = std::max<std::size_t>(1, std::min(opts.threads, suite.size()));
  if (threads == 1) {
    for (std::size_t i = 0; i < suite.size(); ++i) records[i] = profile_item(suite[i], parser, opts.parse);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < suite.size(); i = next++) records[i] = profile_item(suite[i], parser, opts.parse);
      });
    }
    for (auto& th : pool) th.join();
  }
  std::sort(records.begin(), records.end(), [](const ItemRecord& a, const ItemRecord& b) { return a.id < b.id; });
  Profile p;
  p.version_label = g.version_label;
  p.suite = opts.suite_name;
  p.rule_filter = opts.parse.rule_filter;
  p.supertag_k = opts.parse.supertag_k;
  p.records = std::move(records);
  p.aggregates = compute_aggregates(p.records);
  return p;
}

std::string profile_to_json(const Profile& p) {
  json records = json::array();
  for (const auto& r : p.records) records.push_back(record_json(r));
  json j = {{"schema", kProfileSchema},
            {"version_label", p.version_label},
            {"suite", p.suite},
            {"options", {{"rule_filter", p.rule_filter}, {"supertag_k", p.supertag_k}}},
            {"records", records},
            {"aggregates", aggregates_json(p.aggregates)}};
  return j.dump(2) + "\n";
}

Profile profile_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("profile is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("schema").get<std::string>() != kProfileSchema) {
      throw InputError("unsupported profile schema '" + j.at("schema").get<std::string>() + "'");
    }
    Profile p;
    p.version_label = j.at("version_label").get<std::string>();
    p.suite = j.value("suite", "");
    if (j.contains("options")) {
      p.rule_filter = j["options"].value("rule_filter", true);
      p.supertag_k = j["options"].value("supertag_k", std::size_t{0});
    }
    for (const auto& r : j.at("records")) {
      ItemRecord rec;
      rec.id = r.at("id").get<std::string>();
      rec.sentence = r.at("sentence").get<std::string>();
      rec.expected = parse_expected(r.at("expected").get<std::string>());
      rec.verdict = r.at("verdict").get<std::string>();
      rec.readings = r.at("readings").get<std::size_t>();
      rec.edges_built = r.at("edges_built").get<std::size_t>();
      rec.unification_attempts = r.at("unification_attempts").get<std::size_t>();
      rec.learner_uses = r.value("learner_uses", std::size_t{0});
      rec.best_derivation = r.value("best_derivation", "");
      rec.error = r.value("error", "");
      rec.wall_time_ms = r.value("wall_time_ms", 0.0);
      p.records.push_back(std::move(rec));
    }
    const json& a = j.at("aggregates");
    p.aggregates.items = a.at("items").get<std::size_t>();
    p.aggregates.covered = a.at("covered").get<std::size_t>();
    p.aggregates.coverage_pct = a.at("coverage_pct").get<double>();
    p.aggregates.overgeneration_pct = a.at("overgeneration_pct").get<double>();
    p.aggregates.mean_readings = a.at("mean_readings").get<double>();
    p.aggregates.edges_built = a.at("edges_built").get<std::size_t>();
    p.aggregates.unification_attempts = a.at("unification_attempts").get<std::size_t>();
    if (!(compute_aggregates(p.records) == p.aggregates)) {
      throw InputError("profile aggregates do not match its records");
    }
    return p;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed profile: ") + e.what());
  }
}

void write_profile(const Profile& p, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write profile '" + path + "'");
  out << profile_to_json(p);
}

Profile read_profile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read profile '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return profile_from_json(ss.str());
}

Comparison compare_profiles(const Profile& a, const Profile& b) {
  std::map<std::string, const ItemRecord*> ra, rb;
  for (const auto& r : a.records) ra[r.id] = &r;
  for (const auto& r : b.records) rb[r.id] = &r;
  std::vector<std::string> only_a, only_b;
  for (const auto& [id, r] : ra) if (!rb.count(id)) only_a.push_back(id);
  for (const auto& [id, r] : rb) if (!ra.count(id)) only_b.push_back(id);
  if (!only_a.empty() || !only_b.empty()) {
    std::string msg = "profiles cover different items;";
    auto list = [&](const char* side, const std::vector<std::string>& ids) {
      if (ids.empty()) return;
      msg += std::string(" missing from ") + side + ":";
      for (const auto& id : ids) msg += " " + id;
      msg += ";";
    };
    list("the second profile", only_a);
    list("the first profile", only_b);
    msg.pop_back();
    throw InputError(msg);
  }
  Comparison c;
  c.version_a = a.version_label;
  c.version_b = b.version_label;
  c.a = a.aggregates;
  c.b = b.aggregates;
  for (const auto& [id, x] : ra) {
    const ItemRecord* y = rb.at(id);
    ItemDelta d;
    d.id = id;
    d.verdict_a = x->verdict;
    d.verdict_b = y->verdict;
    d.readings = static_cast<long long>(y->readings) - static_cast<long long>(x->readings);
    d.edges_built = static_cast<long long>(y->edges_built) - static_cast<long long>(x->edges_built);
    d.unification_attempts =
        static_cast<long long>(y->unification_attempts) - static_cast<long long>(x->unification_attempts);
    d.regressed = item_correct(*x) && !item_correct(*y);
    if (x->verdict != y->verdict) c.verdict_changes.push_back(id);
    if (d.regressed) c.regressions.push_back(id);
    c.items.push_back(std::move(d));
  }
  return c;
}

namespace {

std::string signed_int(long long v) { return v > 0 ? "+" + std::to_string(v) : std::to_string(v); }

std::string signed_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.2f", v);
  return buf;
}

std::string real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string pad(std::string s, std::size_t w, bool right = false) {
  if (s.size() >= w) return s;
  return right ? std::string(w - s.size(), ' ') + s : s + std::string(w - s.size(), ' ');
}

}  // namespace

std::string format_comparison(const Comparison& c) {
  std::string out = "a: " + c.version_a + "\nb: " + c.version_b + "\n\n";
  out += pad("item", 10) + pad("verdict a", 13) + pad("verdict b", 13) + pad("readings", 10, true) +
         pad("edges", 10, true) + pad("attempts", 10, true) + "  flag\n";
  for (const auto& d : c.items) {
    std::string flag = d.regressed ? "REGRESSION" : (d.verdict_a != d.verdict_b ? "changed" : "");
    out += pad(d.id, 10) + pad(d.verdict_a, 13) + pad(d.verdict_b, 13) + pad(signed_int(d.readings), 10, true) +
           pad(signed_int(d.edges_built), 10, true) + pad(signed_int(d.unification_attempts), 10, true) + "  " +
           flag;
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += "\n";
  }
  out += "\n" + pad("aggregate", 22) + pad("a", 12, true) + pad("b", 12, true) + pad("delta", 12, true) + "\n";
  auto row = [&](const std::string& name, double x, double y) {
    out += pad(name, 22) + pad(real(x), 12, true) + pad(real(y), 12, true) + pad(signed_real(y - x), 12, true) + "\n";
  };
  row("coverage %", c.a.coverage_pct, c.b.coverage_pct);
  row("overgeneration %", c.a.overgeneration_pct, c.b.overgeneration_pct);
  row("mean readings", c.a.mean_readings, c.b.mean_readings);
  row("edges built", static_cast<double>(c.a.edges_built), static_cast<double>(c.b.edges_built));
  row("unification attempts", static_cast<double>(c.a.unification_attempts),
      static_cast<double>(c.b.unification_attempts));
  out += "\nverdict changes: " + std::to_string(c.verdict_changes.size()) +
         "\nregressions: " + std::to_string(c.regressions.size()) + "\n";
  return out;
}

}  // namespace coach
