#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coach/grammar.hpp"
#include "coach/parser.hpp"

namespace coach {

enum class VerdictKind { grammatical, learner, no_parse };
std::string_view to_string(VerdictKind kind);

struct FeedbackItem {
  std::string category;
  std::size_t token_start = 0;  // token span [start, end)
  std::size_t token_end = 0;
  std::size_t char_start = 0;   // code-point offsets into the sentence
  std::size_t char_end = 0;
  std::string surface;
  std::string expected;  // empty when no paradigm member fits
  std::string message;
  std::string rule;
  Severity severity = Severity::error;
};

struct Verdict {
  VerdictKind kind = VerdictKind::no_parse;
  std::string sentence;
  std::vector<Token> tokens;
  std::optional<Reading> reading;
  std::vector<FeedbackItem> feedback;
  std::optional<std::string> corrected;
  std::vector<std::string> diagnostics;
  ParseStats strict_stats;
  std::optional<ParseStats> learner_stats;
};

// Lowest (learner uses, derivation nodes, derivation string); null when
// there are no readings.
const Reading* select_reading(const ParseResult& result);

// Learner rules in the derivation with the span each applied to, in span
// order. Throws
// InternalError when the root LEARNER value or the recorded learner_uses
// disagree with the derivation.
std::vector<LearnerUse> detect_learner(const Reading& reading, const Grammar& g);

struct Correction {
  std::optional<std::string> text;
  std::vector<std::string> diagnostics;
  // Per learner use (same order as detect_learner): the replacement form,
  // empty when none was found.
  std::vector<std::string> expected;
};

// Replaces each relaxed form with the paradigm member carrying the gender
// and number of the unified PNG node, then accepts the result only if the
// strict grammar parses it. Requires a reading with learner uses.
Correction suggest_correction(const Reading& reading, const std::string& sentence, const std::vector<Token>& tokens,
                              const Grammar& g_learner, const Parser& strict, const ParseOptions& opts = {});

// Strict and learner variants of one grammar, with their parsers.
class Coach {
 public:
  Coach(std::shared_ptr<const Grammar> strict, std::shared_ptr<const Grammar> learner);
  static Coach from_file(const std::string& grammar_name_or_path);

  const Grammar& strict() const { return *strict_; }
  const Grammar& learner() const { return *learner_; }
  const Parser& strict_parser() const { return strict_parser_; }
  const Parser& learner_parser() const { return learner_parser_; }

  // Strict first; if uncovered, learner; otherwise no_parse.
  Verdict check(const std::string& sentence, const ParseOptions& opts = {}) const;

 private:
  std::shared_ptr<const Grammar> strict_;
  std::shared_ptr<const Grammar> learner_;
  Parser strict_parser_;
  Parser learner_parser_;
};

Verdict coach_sentence(const std::string& sentence, const Grammar& g_learner, const Grammar& g_strict,
                       const ParseOptions& opts = {});

// `[category] start-end "surface" → "expected": message` lines plus the
// verdict and correction.
std::string format_verdict(const Verdict& v);

}  // namespace coach
