#include "coach/supertagger.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "coach/derivation.hpp"
#include "coach/errors.hpp"

namespace coach {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t b = 0;
  while (true) {
    auto t = line.find('\t', b);
    out.push_back(line.substr(b, t == std::string::npos ? std::string::npos : t - b));
    if (t == std::string::npos) break;
    b = t + 1;
  }
  return out;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void signature_of(const DerivationNode& n, std::vector<std::string>& chain, std::vector<std::string>& out,
                  const Grammar& g) {
  if (n.kind == DerivationNode::Kind::lexeme) {
    std::string sig = g.entry(n.label)->lex_type;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) sig += "+" + *it;
    out.push_back(sig);
    return;
  }
  if (n.kind == DerivationNode::Kind::lexrule) {
    chain.push_back(n.label);
    signature_of(n.children.front(), chain, out, g);
    chain.pop_back();
    return;
  }
  for (const auto& c : n.children) {
    std::vector<std::string> fresh;
    signature_of(c, fresh, out, g);
  }
}

}  // namespace

std::string SupertagModel::serialize() const {
  std::ostringstream out;
  out << kFormat << "\talpha=" << alpha << "\n";
  for (const auto& [surface, counts] : unigram) {
    for (const auto& [sig, n] : counts) out << "U\t" << surface << "\t" << sig << "\t" << n << "\n";
  }
  for (const auto& [prev, counts] : bigram) {
    for (const auto& [sig, n] : counts) out << "B\t" << prev << "\t" << sig << "\t" << n << "\n";
  }
  return out.str();
}

SupertagModel SupertagModel::deserialize(std::string_view text) {
  SupertagModel m;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty supertag model");
  auto header = split_tabs(line);
  if (header.empty() || header[0] != kFormat) throw InputError("not a " + std::string(kFormat) + " model");
  for (std::size_t i = 1; i < header.size(); ++i) {
    if (header[i].rfind("alpha=", 0) == 0) m.alpha = std::stod(header[i].substr(6));
  }
  if (!(m.alpha > 0)) throw InputError("supertag model alpha must be positive");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto f = split_tabs(line);
    if (f.size() != 4 || (f[0] != "U" && f[0] != "B")) {
      throw InputError("supertag model line " + std::to_string(line_no) + " is malformed");
    }
    std::uint64_t n = std::stoull(f[3]);
    (f[0] == "U" ? m.unigram : m.bigram)[f[1]][f[2]] = n;
  }
  return m;
}

std::string SupertagModel::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : serialize()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << h;
  return out.str();
}

std::filesystem::path bundled_supertag_model_path() { return data_dir() / "supertag.model"; }

SupertagModel load_supertag_model(const std::filesystem::path& path) {
  return SupertagModel::deserialize(read_text(path));
}

std::vector<TreebankItem> parse_treebank(std::string_view text) {
  std::vector<TreebankItem> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto f = split_tabs(line);
    if (f.size() != 3) throw InputError("treebank line " + std::to_string(line_no) + ": expected 3 fields");
    out.push_back({f[0], f[1], f[2]});
  }
  return out;
}

std::vector<TreebankItem> read_treebank(const std::filesystem::path& path) { return parse_treebank(read_text(path)); }

std::vector<std::string> gold_signatures(const std::string& derivation, const Grammar& g) {
  DerivationNode root = parse_derivation(derivation, g);
  std::vector<std::string> out;
  std::vector<std::string> chain;
  signature_of(root, chain, out, g);
  return out;
}

SupertagModel train_supertagger(const std::vector<TreebankItem>& treebank, const Grammar& g) {
  SupertagModel m;
  for (const auto& item : treebank) {
    DerivationNode root = parse_derivation(item.derivation, g);
    auto leaves = derivation_leaves(root);
    auto sigs = gold_signatures(item.derivation, g);
    std::string prev(kSentenceStart);
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      m.unigram[leaves[i]->surface][sigs[i]] += 1;
      m.bigram[prev][sigs[i]] += 1;
      prev = sigs[i];
    }
  }
  return m;
}

std::vector<TokenRanking> predict(const std::vector<std::string>& forms,
                                  const std::vector<std::vector<std::string>>& licensed, const SupertagModel& model) {
  if (forms.size() != licensed.size()) throw PreconditionError("predict: one licensed set per token is required");
  std::vector<TokenRanking> out;
  std::string prev(kSentenceStart);
  for (std::size_t i = 0; i < forms.size(); ++i) {
    std::vector<std::string> sigs = licensed[i];
    std::sort(sigs.begin(), sigs.end());
    sigs.erase(std::unique(sigs.begin(), sigs.end()), sigs.end());
    TokenRanking ranking;
    if (sigs.empty()) {
      out.push_back(ranking);
      prev = std::string(kSentenceStart);
      continue;
    }
    const double a = model.alpha;
    const double k = static_cast<double>(sigs.size());
    auto smoothed = [&](const std::map<std::string, std::map<std::string, std::uint64_t>>& table,
                        const std::string& key, const std::string& sig) {
      double total = 0;
      double count = 0;
      auto it = table.find(key);
      if (it != table.end()) {
        for (const auto& s : sigs) {
          auto c = it->second.find(s);
          if (c != it->second.end()) total += static_cast<double>(c->second);
        }
        auto c = it->second.find(sig);
        if (c != it->second.end()) count = static_cast<double>(c->second);
      }
      return (count + a) / (total + a * k);
    };
    const bool known = model.knows(forms[i]);
    double sum = 0;
    for (const auto& s : sigs) {
      double p = known ? smoothed(model.unigram, forms[i], s) * smoothed(model.bigram, prev, s) : 1.0;
      ranking.push_back({s, p});
      sum += p;
    }
    for (auto& r : ranking) r.probability /= sum;
    std::stable_sort(ranking.begin(), ranking.end(), [](const ScoredSignature& x, const ScoredSignature& y) {
      if (x.probability != y.probability) return x.probability > y.probability;
      return x.signature < y.signature;
    });
    prev = ranking.front().signature;
    out.push_back(std::move(ranking));
  }
  return out;
}

std::vector<TokenRanking> predict(const std::vector<std::string>& forms, const SupertagModel& model,
                                  const Grammar& g) {
  std::vector<std::vector<std::string>> licensed;
  for (const auto& f : forms) {
    std::vector<std::string> sigs;
    for (const auto& e : token_edges(f, g)) sigs.push_back(e.signature());
    licensed.push_back(std::move(sigs));
  }
  return predict(forms, licensed, model);
}

std::vector<std::vector<LexicalEdge>> filter_edges(const std::vector<std::vector<LexicalEdge>>& edges,
                                                   const std::vector<TokenRanking>& ranking, std::size_t k) {
  if (k == 0) throw PreconditionError("filter_edges: k must be at least 1");
  if (edges.size() != ranking.size()) throw PreconditionError("filter_edges: ranking does not match tokens");
  std::vector<std::vector<LexicalEdge>> out;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    std::set<std::string> keep;
    for (std::size_t r = 0; r < ranking[i].size() && r < k; ++r) keep.insert(ranking[i][r].signature);
    std::vector<LexicalEdge> kept;
    for (const auto& e : edges[i]) {
      if (keep.count(e.signature())) kept.push_back(e);
    }
    if (kept.empty() && !edges[i].empty()) {
      std::set<std::string> present;
      for (const auto& e : edges[i]) present.insert(e.signature());
      std::string best;
      for (const auto& r : ranking[i]) {
        if (present.count(r.signature)) {
          best = r.signature;
          break;
        }
      }
      if (best.empty()) best = *present.begin();
      for (const auto& e : edges[i]) {
        if (e.signature() == best) kept.push_back(e);
      }
    }
    out.push_back(std::move(kept));
  }
  return out;
}

}  // namespace coach
