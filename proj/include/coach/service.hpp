#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>

#include "coach/coach.hpp"
#include "coach/supertagger.hpp"

namespace coach {

inline constexpr std::size_t kMaxSentenceChars = 500;

struct ServiceConfig {
  std::string grammar = "toy";  // bundled name or path
  std::string supertag_model;   // empty: no model
  std::size_t supertag_k = 0;
  std::size_t reading_cap = 64;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string cors_origin;  // empty: no CORS headers
};

// JSON object with any of: grammar, supertag_model, supertag_k, reading_cap,
// listen ("host:port"), cors_origin. Unknown keys are rejected.
ServiceConfig parse_service_config(const std::string& json_text);
ServiceConfig load_service_config(const std::string& path);
// COACH_LISTEN overrides the listen address.
void apply_env_overrides(ServiceConfig& config);
void parse_listen(const std::string& listen, ServiceConfig& config);

struct HttpReply {
  int status = 200;
  std::string body;  // JSON
};

class CoachService {
 public:
  explicit CoachService(const ServiceConfig& config);

  const ServiceConfig& config() const { return config_; }
  const Coach& coach() const { return *coach_; }

  HttpReply handle(const std::string& method, const std::string& path, const std::string& body) const;
  HttpReply coach_request(const std::string& body) const;
  HttpReply health() const;
  HttpReply grammar_info() const;

  // Blocks until the server stops.
  void serve() const;

 private:
  ServiceConfig config_;
  std::unique_ptr<Coach> coach_;
  std::optional<SupertagModel> model_;
};

// Wire form of a verdict.
std::string verdict_json(const Verdict& v, const std::string& grammar_version, bool include_dependencies,
                         bool include_derivation);

}  // namespace coach
