#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "coach/grammar.hpp"
#include "coach/morph.hpp"

namespace coach {

inline constexpr std::string_view kSentenceStart = "<s>";

struct SupertagModel {
  static constexpr std::string_view kFormat = "coach-supertag/1";

  std::map<std::string, std::map<std::string, std::uint64_t>> unigram;  // surface -> signature -> count
  std::map<std::string, std::map<std::string, std::uint64_t>> bigram;   // previous -> signature -> count
  double alpha = 0.1;

  bool knows(const std::string& surface) const { return unigram.count(surface) != 0; }

  std::string serialize() const;
  static SupertagModel deserialize(std::string_view text);
  // FNV-1a of the serialization, hex.
  std::string hash() const;
};

SupertagModel load_supertag_model(const std::filesystem::path& path);
// The model trained on the bundled mini-treebank.
std::filesystem::path bundled_supertag_model_path();

struct TreebankItem {
  std::string id;
  std::string sentence;
  std::string derivation;  // canonical derivation string
};

// `id TAB sentence TAB derivation` per line; '#' lines are comments.
std::vector<TreebankItem> read_treebank(const std::filesystem::path& path);
std::vector<TreebankItem> parse_treebank(std::string_view text);

// Counts the lexical signatures at the gold leaves. Derivations must parse
// against `g`, which should be the learner-mode grammar so relaxation
// signatures resolve.
SupertagModel train_supertagger(const std::vector<TreebankItem>& treebank, const Grammar& g);

// Gold signature of each leaf of a derivation, left to right.
std::vector<std::string> gold_signatures(const std::string& derivation, const Grammar& g);

struct ScoredSignature {
  std::string signature;
  double probability = 0;
};
using TokenRanking = std::vector<ScoredSignature>;  // best first, sums to 1

// Ranks each token's licensed signatures by smoothed unigram x bigram score,
// greedily left to right (the previous token's best signature is the
// context). Unknown tokens get the uniform distribution. Ties break on the
// signature string.
std::vector<TokenRanking> predict(const std::vector<std::string>& forms,
                                  const std::vector<std::vector<std::string>>& licensed, const SupertagModel& model);
// Licensed signatures come from the lexical edges of `g`.
std::vector<TokenRanking> predict(const std::vector<std::string>& forms, const SupertagModel& model,
                                  const Grammar& g);

// Keeps each token's edges whose signature ranks within the top k. A token
// never loses all of its edges: if the cut would empty it, the edges with
// the best-ranked licensed signature stay.
std::vector<std::vector<LexicalEdge>> filter_edges(const std::vector<std::vector<LexicalEdge>>& edges,
                                                   const std::vector<TokenRanking>& ranking, std::size_t k);

}  // namespace coach
