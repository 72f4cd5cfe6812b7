#include "coach/service.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "coach/errors.hpp"
#include "coach/morph.hpp"
#include "coach/semantics.hpp"

namespace coach {

using nlohmann::json;

void parse_listen(const std::string& listen, ServiceConfig& config) {
  auto colon = listen.rfind(':');
  if (colon == std::string::npos || colon + 1 == listen.size()) {
    throw InputError("listen address must be host:port, got '" + listen + "'");
  }
  int port = 0;
  try {
    std::size_t used = 0;
    port = std::stoi(listen.substr(colon + 1), &used);
    if (used != listen.size() - colon - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw InputError("bad port in listen address '" + listen + "'");
  }
  if (port < 0 || port > 65535) throw InputError("port out of range in '" + listen + "'");
  config.host = colon == 0 ? "127.0.0.1" : listen.substr(0, colon);
  config.port = port;
}

ServiceConfig parse_service_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InputError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("config must be a JSON object");
  ServiceConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "grammar") c.grammar = value.get<std::string>();
      else if (key == "supertag_model") c.supertag_model = value.get<std::string>();
      else if (key == "supertag_k") c.supertag_k = value.get<std::size_t>();
      else if (key == "reading_cap") c.reading_cap = value.get<std::size_t>();
      else if (key == "listen") parse_listen(value.get<std::string>(), c);
      else if (key == "cors_origin") c.cors_origin = value.get<std::string>();
      else throw InputError("unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("bad config value: ") + e.what());
  }
  if (c.reading_cap == 0) throw InputError("reading_cap must be positive");
  return c;
}

ServiceConfig load_service_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_service_config(ss.str());
}

void apply_env_overrides(ServiceConfig& config) {
  if (const char* listen = std::getenv("COACH_LISTEN"); listen && *listen) parse_listen(listen, config);
}

std::string verdict_json(const Verdict& v, const std::string& grammar_version, bool include_dependencies,
                         bool include_derivation) {
  json feedback = json::array();
  for (const auto& f : v.feedback) {
    feedback.push_back({{"category", f.category},
                        {"start", f.char_start},
                        {"end", f.char_end},
                        {"surface", f.surface},
                        {"expected", f.expected},
                        {"message", f.message},
                        {"severity", to_string(f.severity)},
                        {"rule", f.rule}});
  }
  const ParseStats& s = v.learner_stats ? *v.learner_stats : v.strict_stats;
  json j = {{"sentence", v.sentence},
            {"verdict", to_string(v.kind)},
            {"feedback", feedback},
            {"corrected", v.corrected ? json(*v.corrected) : json(nullptr)},
            {"stats",
             {{"edges_built", v.strict_stats.edges_built + (v.learner_stats ? v.learner_stats->edges_built : 0)},
              {"unification_attempts",
               v.strict_stats.unification_attempts + (v.learner_stats ? v.learner_stats->unification_attempts : 0)},
              {"readings", s.readings_found},
              {"wall_time_ms", v.strict_stats.wall_time_ms + (v.learner_stats ? v.learner_stats->wall_time_ms : 0)}}},
            {"grammar_version", grammar_version}};
  if (include_dependencies) {
    json deps = json::array();
    if (v.reading) {
      DependencyGraph d = to_dependencies(v.reading->semantics);
      for (const auto& a : d.arcs) {
        deps.push_back({{"head", d.nodes.at(a.head)}, {"role", a.role}, {"dependent", d.nodes.at(a.dependent)}});
      }
    }
    j["dependencies"] = deps;
  }
  if (include_derivation) j["derivation"] = v.reading ? json(v.reading->derivation_string) : json(nullptr);
  return j.dump();
}

namespace {

HttpReply error_reply(int status, const std::string& kind, const std::string& detail) {
  return {status, json{{"error", kind}, {"detail", detail}}.dump()};
}

std::string opaque_id() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng()));
  return buf;
}

HttpReply internal_error(const std::string& detail) {
  std::string id = opaque_id();
  std::cerr << "coach: internal error " << id << ": " << detail << "\n";
  return {500, json{{"error", "internal"}, {"id", id}}.dump()};
}

}  // namespace

CoachService::CoachService(const ServiceConfig& config) : config_(config) {
  coach_ = std::make_unique<Coach>(Coach::from_file(config_.grammar));
  if (!config_.supertag_model.empty()) model_ = load_supertag_model(config_.supertag_model);
}

HttpReply CoachService::coach_request(const std::string& body) const {
  try {
    json req;
    try {
      req = json::parse(body);
    } catch (const json::exception&) {
      return error_reply(400, "input", "request body is not valid JSON");
    }
    if (!req.is_object() || !req.contains("sentence") || !req["sentence"].is_string()) {
      return error_reply(400, "input", "request needs a string field 'sentence'");
    }
    std::string sentence = req["sentence"].get<std::string>();
    if (codepoint_count(sentence) > kMaxSentenceChars) {
      return error_reply(413, "input", "sentence longer than " + std::to_string(kMaxSentenceChars) + " characters");
    }
    ParseOptions opts;
    opts.reading_cap = config_.reading_cap;
    opts.supertag_k = config_.supertag_k;
    bool deps = false, deriv = false;
    if (req.contains("options")) {
      const json& o = req["options"];
      if (!o.is_object()) return error_reply(400, "input", "'options' must be an object");
      if (o.contains("supertag_k")) {
        if (!o["supertag_k"].is_number_unsigned()) return error_reply(400, "input", "supertag_k must be a non-negative integer");
        opts.supertag_k = o["supertag_k"].get<std::size_t>();
      }
      if (o.contains("include_dependencies")) {
        if (!o["include_dependencies"].is_boolean()) return error_reply(400, "input", "include_dependencies must be boolean");
        deps = o["include_dependencies"].get<bool>();
      }
      if (o.contains("include_derivation")) {
        if (!o["include_derivation"].is_boolean()) return error_reply(400, "input", "include_derivation must be boolean");
        deriv = o["include_derivation"].get<bool>();
      }
    }
    if (opts.supertag_k > 0 && !model_) {
      return error_reply(400, "input", "supertag filtering requested but no model is configured");
    }
    opts.supertag_model = model_ ? &*model_ : nullptr;
    Verdict v = coach_->check(sentence, opts);
    return {200, verdict_json(v, coach_->learner().version_label, deps, deriv)};
  } catch (const InputError& e) {
    return error_reply(400, "input", e.what());
  } catch (const std::exception& e) {
    return internal_error(e.what());
  }
}

HttpReply CoachService::health() const {
  json j = {{"status", "ok"},
            {"grammar_version", coach_->learner().version_label},
            {"strict_version", coach_->strict().version_label},
            {"model_hash", model_ ? json(model_->hash()) : json(nullptr)}};
  return {200, j.dump()};
}

HttpReply CoachService::grammar_info() const {
  const Grammar& g = coach_->learner();
  std::size_t types = g.hierarchy.size();
  json j = {{"grammar_version", g.version_label},
            {"types", types},
            {"lexicon_entries", g.lexicon_size()},
            {"lexical_rules", g.lexical_rules.size()},
            {"phrasal_rules", g.phrasal_rules.size()},
            {"learner_rules", g.learner_rule_count()},
            {"feedback_templates", g.feedback_templates.size()}};
  return {200, j.dump()};
}

HttpReply CoachService::handle(const std::string& method, const std::string& path, const std::string& body) const {
  if (path == "/v1/coach") {
    if (method != "POST") return error_reply(405, "method", "use POST");
    return coach_request(body);
  }
  if (path == "/v1/health" || path == "/v1/grammar-info") {
    if (method != "GET") return error_reply(405, "method", "use GET");
    return path == "/v1/health" ? health() : grammar_info();
  }
  return error_reply(404, "not_found", "no endpoint " + path);
}

void CoachService::serve() const {
  httplib::Server server;
  auto reply = [this](const httplib::Request& req, httplib::Response& res) {
    HttpReply r = handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  if (!config_.cors_origin.empty()) {
    server.set_default_headers({{"Access-Control-Allow-Origin", config_.cors_origin},
                                {"Access-Control-Allow-Headers", "Content-Type"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    server.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  }
  server.Post("/v1/coach", reply);
  server.Get("/v1/health", reply);
  server.Get("/v1/grammar-info", reply);
  std::cerr << "coach: serving " << coach_->learner().version_label << " on " << config_.host << ":" << config_.port
            << "\n";
  if (!server.listen(config_.host, config_.port)) {
    throw InputError("cannot listen on " + config_.host + ":" + std::to_string(config_.port));
  }
}

}  // namespace coach
