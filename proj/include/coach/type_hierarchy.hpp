#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace coach {

using TypeId = std::uint32_t;

inline constexpr std::string_view kTopType = "*top*";
inline constexpr std::string_view kStringType = "string";
inline constexpr std::string_view kListType = "list";
inline constexpr std::string_view kConsType = "cons";
inline constexpr std::string_view kNullType = "null";

// Raised by TypeHierarchy::Builder::build for cycles, unknown parents and
// bounded-completeness violations.
class HierarchyError : public std::runtime_error {
 public:
  HierarchyError(std::string kind, std::vector<std::string> types, const std::string& detail)
      : std::runtime_error(detail), kind_(std::move(kind)), types_(std::move(types)) {}
  const std::string& kind() const { return kind_; }
  // The offending types, e.g. both maximal common subtypes of a GLB violation.
  const std::vector<std::string>& types() const { return types_; }

 private:
  std::string kind_;
  std::vector<std::string> types_;
};

// A finite partial order of types with a unique top and unique greatest lower
// bounds. Immutable once built; all queries are O(1) table lookups.
class TypeHierarchy {
 public:
  class Builder {
   public:
    explicit Builder(std::string top = std::string(kTopType));

    // Declares `name` below `parents` (top when empty). Redeclaring a type
    // adds parents. Parents may be declared later.
    Builder& add(const std::string& name, const std::vector<std::string>& parents = {});
    // Registers a string literal as a leaf below `string`. The type name is
    // the literal wrapped in double quotes.
    Builder& add_string(std::string_view literal);
    bool contains(const std::string& name) const { return index_.count(name) != 0; }

    TypeHierarchy build() const;

   private:
    std::string top_;
    std::vector<std::string> names_;
    std::vector<std::vector<std::string>> parents_;
    std::map<std::string, std::size_t> index_;
  };

  TypeId top() const { return 0; }
  std::size_t size() const { return names_.size(); }
  const std::string& name(TypeId t) const { return names_.at(t); }
  std::optional<TypeId> find(std::string_view name) const;
  // Throws InputError for unknown names.
  TypeId id(std::string_view name) const;
  std::span<const TypeId> parents(TypeId t) const { return parents_.at(t); }

  // True when `specific` is `general` or one of its descendants.
  bool subsumes(TypeId general, TypeId specific) const;
  std::optional<TypeId> glb(TypeId a, TypeId b) const;
  // Name-based convenience; unknown names raise InputError.
  std::optional<std::string> glb(std::string_view a, std::string_view b) const;

  static std::string string_type_name(std::string_view literal);
  static bool is_string_literal(std::string_view type_name);
  static std::string literal_value(std::string_view type_name);

 private:
  std::vector<std::string> names_;
  std::map<std::string, TypeId, std::less<>> index_;
  std::vector<std::vector<TypeId>> parents_;
  // ancestors_[t] bitset (reflexive), packed into 64-bit words
  std::vector<std::vector<std::uint64_t>> ancestors_;
  std::vector<std::int32_t> glb_;  // size()*size(), -1 on failure
};

}  // namespace coach
