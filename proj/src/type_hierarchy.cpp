#include "coach/type_hierarchy.hpp"

#include <algorithm>
#include <deque>

#include "coach/errors.hpp"

namespace coach {

namespace {

using Bits = std::vector<std::uint64_t>;

bool test_bit(const Bits& b, std::size_t i) { return (b[i / 64] >> (i % 64)) & 1U; }
void set_bit(Bits& b, std::size_t i) { b[i / 64] |= std::uint64_t{1} << (i % 64); }

}  // namespace

TypeHierarchy::Builder::Builder(std::string top) : top_(std::move(top)) {
  names_.push_back(top_);
  parents_.emplace_back();
  index_[top_] = 0;
}

TypeHierarchy::Builder& TypeHierarchy::Builder::add(const std::string& name,
                                                    const std::vector<std::string>& parents) {
  if (name == top_) return *this;
  auto [it, inserted] = index_.try_emplace(name, names_.size());
  if (inserted) {
    names_.push_back(name);
    parents_.emplace_back();
  }
  auto& ps = parents_[it->second];
  for (const auto& p : parents) {
    if (std::find(ps.begin(), ps.end(), p) == ps.end()) ps.push_back(p);
  }
  return *this;
}

TypeHierarchy::Builder& TypeHierarchy::Builder::add_string(std::string_view literal) {
  const std::string string_type(kStringType);
  if (!contains(string_type)) add(string_type);
  return add(string_type_name(literal), {string_type});
}

TypeHierarchy TypeHierarchy::Builder::build() const {
  const std::size_t n = names_.size();
  TypeHierarchy h;
  h.names_ = names_;
  h.parents_.assign(n, {});
  for (std::size_t t = 0; t < n; ++t) {
    h.index_.emplace(names_[t], static_cast<TypeId>(t));
  }
  for (std::size_t t = 1; t < n; ++t) {
    if (parents_[t].empty()) {
      h.parents_[t].push_back(0);
      continue;
    }
    for (const auto& p : parents_[t]) {
      auto it = index_.find(p);
      if (it == index_.end()) {
        throw HierarchyError("unknown-type", {names_[t], p},
                             "type '" + names_[t] + "' has undeclared parent '" + p + "'");
      }
      h.parents_[t].push_back(static_cast<TypeId>(it->second));
    }
  }

  // Kahn's algorithm over child -> parent edges, parents first.
  std::vector<std::vector<TypeId>> children(n);
  std::vector<std::size_t> pending(n, 0);
  for (std::size_t t = 0; t < n; ++t) {
    pending[t] = h.parents_[t].size();
    for (TypeId p : h.parents_[t]) children[p].push_back(static_cast<TypeId>(t));
  }
  std::vector<TypeId> order;
  std::deque<TypeId> ready;
  for (std::size_t t = 0; t < n; ++t) {
    if (pending[t] == 0) ready.push_back(static_cast<TypeId>(t));
  }
  while (!ready.empty()) {
    TypeId t = ready.front();
    ready.pop_front();
    order.push_back(t);
    for (TypeId c : children[t]) {
      if (--pending[c] == 0) ready.push_back(c);
    }
  }
  if (order.size() != n) {
    for (std::size_t t = 0; t < n; ++t) {
      if (pending[t] != 0) {
        throw HierarchyError("cycle", {names_[t]}, "type '" + names_[t] + "' lies on a supertype cycle");
      }
    }
  }

  const std::size_t words = (n + 63) / 64;
  h.ancestors_.assign(n, Bits(words, 0));
  for (TypeId t : order) {
    set_bit(h.ancestors_[t], t);
    for (TypeId p : h.parents_[t]) {
      for (std::size_t w = 0; w < words; ++w) h.ancestors_[t][w] |= h.ancestors_[p][w];
    }
  }
  std::vector<Bits> desc(n, Bits(words, 0));
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t a = 0; a < n; ++a) {
      if (test_bit(h.ancestors_[t], a)) set_bit(desc[a], t);
    }
  }

  h.glb_.assign(n * n, -1);
  Bits common(words);
  for (std::size_t a = 0; a < n; ++a) {
    h.glb_[a * n + a] = static_cast<std::int32_t>(a);
    for (std::size_t b = a + 1; b < n; ++b) {
      bool any = false;
      for (std::size_t w = 0; w < words; ++w) {
        common[w] = desc[a][w] & desc[b][w];
        any = any || common[w] != 0;
      }
      if (!any) continue;
      std::int32_t greatest = -1;
      std::vector<std::size_t> maxima;
      for (std::size_t c = 0; c < n; ++c) {
        if (!test_bit(common, c)) continue;
        bool covers = true;
        bool maximal = true;
        for (std::size_t w = 0; w < words; ++w) {
          if ((common[w] & ~desc[c][w]) != 0) covers = false;
          std::uint64_t above = common[w] & h.ancestors_[c][w];
          if (w == c / 64) above &= ~(std::uint64_t{1} << (c % 64));
          if (above != 0) maximal = false;
        }
        if (covers) greatest = static_cast<std::int32_t>(c);
        if (maximal) maxima.push_back(c);
      }
      if (greatest < 0) {
        throw HierarchyError(
            "glb-ambiguity", {names_[a], names_[b], names_[maxima.at(0)], names_[maxima.at(1)]},
            "types '" + names_[a] + "' and '" + names_[b] + "' have no unique greatest lower bound: '" +
                names_[maxima[0]] + "' and '" + names_[maxima[1]] + "' are both maximal common subtypes");
      }
      h.glb_[a * n + b] = greatest;
      h.glb_[b * n + a] = greatest;
    }
  }
  return h;
}

std::optional<TypeId> TypeHierarchy::find(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TypeId TypeHierarchy::id(std::string_view name) const {
  auto t = find(name);
  if (!t) throw InputError("unknown type '" + std::string(name) + "'");
  return *t;
}

bool TypeHierarchy::subsumes(TypeId general, TypeId specific) const {
  return test_bit(ancestors_.at(specific), general);
}

std::optional<TypeId> TypeHierarchy::glb(TypeId a, TypeId b) const {
  std::int32_t g = glb_.at(static_cast<std::size_t>(a) * names_.size() + b);
  if (g < 0) return std::nullopt;
  return static_cast<TypeId>(g);
}

std::optional<std::string> TypeHierarchy::glb(std::string_view a, std::string_view b) const {
  auto g = glb(id(a), id(b));
  if (!g) return std::nullopt;
  return names_[*g];
}

std::string TypeHierarchy::string_type_name(std::string_view literal) {
  std::string out = "\"";
  out += literal;
  out += '"';
  return out;
}

bool TypeHierarchy::is_string_literal(std::string_view type_name) {
  return type_name.size() >= 2 && type_name.front() == '"' && type_name.back() == '"';
}

std::string TypeHierarchy::literal_value(std::string_view type_name) {
  if (!is_string_literal(type_name)) return std::string(type_name);
  return std::string(type_name.substr(1, type_name.size() - 2));
}

}  // namespace coach
