#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "coach/coach.hpp"
#include "coach/feature_structure.hpp"
#include "coach/grammar.hpp"
#include "coach/profiler.hpp"
#include "coach/type_hierarchy.hpp"
#include "coach/unify.hpp"

namespace support {

inline const coach::Grammar& toy(coach::GrammarMode mode) {
  static const coach::Grammar strict =
      coach::load_grammar_file(coach::resolve_grammar_path("toy"), coach::GrammarMode::strict);
  static const coach::Grammar learner =
      coach::load_grammar_file(coach::resolve_grammar_path("toy"), coach::GrammarMode::learner);
  return mode == coach::GrammarMode::strict ? strict : learner;
}
inline const coach::Grammar& strict() { return toy(coach::GrammarMode::strict); }
inline const coach::Grammar& learner() { return toy(coach::GrammarMode::learner); }

inline const coach::Grammar& underconstrained() {
  static const coach::Grammar g =
      coach::load_grammar_file(coach::resolve_grammar_path("toy-underconstrained"), coach::GrammarMode::strict);
  return g;
}

inline const coach::Coach& toy_coach() {
  static const coach::Coach c = coach::Coach::from_file("toy");
  return c;
}

inline const std::vector<coach::TestItem>& suite(const std::string& name) {
  static std::map<std::string, std::vector<coach::TestItem>> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, coach::read_suite(coach::resolve_suite_path(name).string())).first;
  return it->second;
}

inline std::vector<coach::TestItem> desk_suite() {
  std::vector<coach::TestItem> all;
  for (const char* name : {"grammatical", "learner", "ambiguity"}) {
    const auto& s = suite(name);
    all.insert(all.end(), s.begin(), s.end());
  }
  return all;
}

// Structure from (path, type) pairs plus path equations.
inline coach::FeatureStructure build_fs(const coach::TypeHierarchy& h,
                                        const std::vector<std::pair<std::string, std::string>>& typed,
                                        const std::vector<std::pair<std::string, std::string>>& shared = {}) {
  coach::FsGraph g(h);
  coach::NodeId root = g.add_node(h.top());
  for (const auto& [path, type] : typed) {
    coach::NodeId n = g.ensure_path(root, coach::parse_path(path));
    if (!g.constrain(n, h.id(type))) throw std::runtime_error("build_fs: clash at " + path);
  }
  for (const auto& [p, q] : shared) {
    coach::NodeId a = g.ensure_path(root, coach::parse_path(p));
    coach::NodeId b = g.ensure_path(root, coach::parse_path(q));
    if (!g.unify(a, b)) throw std::runtime_error("build_fs: clash sharing " + p + " and " + q);
  }
  auto fs = g.extract(root);
  if (!fs) throw std::runtime_error("build_fs: cyclic");
  return *fs;
}

// A bounded-complete ten-type order with multiple inheritance:
// top; a; b; c < a; d < a, b; e < c; f < b; g < d; h < e; i < f.
inline const coach::TypeHierarchy& ten_types() {
  static const coach::TypeHierarchy h = [] {
    coach::TypeHierarchy::Builder b("top");
    b.add("a").add("b").add("c", {"a"}).add("d", {"a", "b"}).add("e", {"c"});
    b.add("f", {"b"}).add("g", {"d"}).add("h", {"e"}).add("i", {"f"});
    return b.build();
  }();
  return h;
}

// Random acyclic structures over the given hierarchy: up to `depth` levels,
// features drawn from a small set, and arcs that sometimes point at an
// already completed node so reentrancies appear without cycles.
class RandomFs {
 public:
  RandomFs(const coach::TypeHierarchy& h, std::uint64_t seed, std::size_t depth = 3)
      : h_(&h), rng_(seed), depth_(depth) {}

  coach::FeatureStructure next() {
    coach::FsGraph g(*h_);
    done_.clear();
    coach::NodeId root = grow(g, 0);
    return *g.extract(root);
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  coach::NodeId grow(coach::FsGraph& g, std::size_t level) {
    std::uniform_int_distribution<coach::TypeId> type(0, static_cast<coach::TypeId>(h_->size() - 1));
    coach::NodeId n = g.add_node(type(rng_));
    if (level < depth_) {
      static const std::vector<std::string> features = {"F", "G", "H"};
      for (const auto& f : features) {
        if (std::bernoulli_distribution(0.45)(rng_)) {
          coach::NodeId child;
          if (!done_.empty() && std::bernoulli_distribution(0.25)(rng_)) {
            child = done_[std::uniform_int_distribution<std::size_t>(0, done_.size() - 1)(rng_)];
          } else {
            child = grow(g, level + 1);
          }
          g.set_arc(n, f, child);
        }
      }
    }
    done_.push_back(n);
    return n;
  }

  const coach::TypeHierarchy* h_;
  std::mt19937_64 rng_;
  std::size_t depth_;
  std::vector<coach::NodeId> done_;
};

// Random hierarchies for the GLB oracle: each new type takes one to three
// earlier types as parents. Candidates that violate bounded completeness are
// skipped.
inline std::vector<coach::TypeHierarchy> random_hierarchies(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<coach::TypeHierarchy> out;
  while (out.size() < count) {
    std::size_t n = std::uniform_int_distribution<std::size_t>(4, 14)(rng);
    coach::TypeHierarchy::Builder b("top");
    std::vector<std::string> names = {"top"};
    for (std::size_t i = 1; i < n; ++i) {
      std::string name = "t" + std::to_string(i);
      std::set<std::string> parents;
      std::size_t k = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
      for (std::size_t j = 0; j < k; ++j) {
        parents.insert(names[std::uniform_int_distribution<std::size_t>(0, names.size() - 1)(rng)]);
      }
      if (parents.size() > 1) parents.erase("top");
      b.add(name, std::vector<std::string>(parents.begin(), parents.end()));
      names.push_back(name);
    }
    try {
      out.push_back(b.build());
    } catch (const coach::HierarchyError&) {
    }
  }
  return out;
}

}  // namespace support
