#pragma once

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <ranges>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gkahn/bitset.hpp"

namespace gkahn {

using ElementId = std::size_t;

/// A finite partial order with a least element. Every element of a finite
/// poset is compact, so these stand in for the compact elements K(D) of an
/// algebraic cpo.
template <class P>
concept PointedPoset = requires(const P& p, ElementId a, ElementId b) {
  { p.size() } -> std::convertible_to<std::size_t>;
  { p.leq(a, b) } -> std::same_as<bool>;
  { p.bottom() } -> std::convertible_to<ElementId>;
  { p.label(a) } -> std::convertible_to<std::string>;
  { p.upper_covers(a) } -> std::ranges::range;
};

class NotAPartialOrder : public std::runtime_error {
 public:
  NotAPartialOrder(std::string axiom, std::string lhs, std::string rhs)
      : std::runtime_error("not a partial order: " + axiom + " fails at (" + lhs + ", " + rhs + ")"),
        axiom_(std::move(axiom)),
        witness_(std::move(lhs), std::move(rhs)) {}

  const std::string& axiom() const { return axiom_; }
  const std::pair<std::string, std::string>& witness() const { return witness_; }

 private:
  std::string axiom_;
  std::pair<std::string, std::string> witness_;
};

class NoLeastElement : public std::runtime_error {
 public:
  NoLeastElement() : std::runtime_error("poset has no least element") {}
};

class NotMonotone : public std::runtime_error {
 public:
  NotMonotone(std::string lhs, std::string rhs)
      : std::runtime_error("map is not monotone: " + lhs + " <= " + rhs + " but images are unordered"),
        witness_(std::move(lhs), std::move(rhs)) {}

  const std::pair<std::string, std::string>& witness() const { return witness_; }

 private:
  std::pair<std::string, std::string> witness_;
};

/// Explicit finite pointed poset. Element ids are 0..size()-1 and their
/// numeric order is the canonical tie-break order used by every choice
/// made on the poset.
class FinitePointedPoset {
 public:
  /// Validates an explicitly given relation (reflexive pairs included).
  static FinitePointedPoset validate(std::vector<std::string> elements,
                                     std::span<const std::pair<std::string, std::string>> leq) {
    std::unordered_map<std::string, ElementId> index;
    for (ElementId i = 0; i < elements.size(); ++i) {
      if (!index.emplace(elements[i], i).second)
        throw std::invalid_argument("duplicate poset element '" + elements[i] + "'");
    }
    const auto n = elements.size();
    std::vector<Bitset> up(n, Bitset(n));
    for (const auto& [a, b] : leq) {
      auto ia = index.find(a);
      auto ib = index.find(b);
      if (ia == index.end() || ib == index.end())
        throw std::invalid_argument("order pair (" + a + ", " + b + ") mentions an unknown element");
      up[ia->second].set(ib->second);
    }
    return FinitePointedPoset(std::move(elements), std::move(up));
  }

  /// Builds and validates the poset whose order is given by a predicate.
  template <class Leq>
  static FinitePointedPoset from_order(std::vector<std::string> labels, Leq&& leq) {
    const auto n = labels.size();
    std::vector<Bitset> up(n, Bitset(n));
    for (ElementId a = 0; a < n; ++a)
      for (ElementId b = 0; b < n; ++b)
        if (leq(a, b)) up[a].set(b);
    return FinitePointedPoset(std::move(labels), std::move(up));
  }

  std::size_t size() const { return labels_.size(); }
  bool leq(ElementId a, ElementId b) const { return up_[a].test(b); }
  bool less(ElementId a, ElementId b) const { return a != b && up_[a].test(b); }
  ElementId bottom() const { return bottom_; }
  const std::string& label(ElementId a) const { return labels_[a]; }
  const std::vector<std::string>& labels() const { return labels_; }

  std::optional<ElementId> find(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) return std::nullopt;
    return static_cast<ElementId>(it - labels_.begin());
  }

  /// Principal filter and ideal as bitsets.
  const Bitset& up(ElementId a) const { return up_[a]; }
  const Bitset& down(ElementId a) const { return down_[a]; }

  const std::vector<ElementId>& upper_covers(ElementId a) const { return upper_covers_[a]; }
  const std::vector<ElementId>& lower_covers(ElementId a) const { return lower_covers_[a]; }

  bool is_cover(ElementId a, ElementId b) const {
    const auto& uc = upper_covers_[a];
    return std::binary_search(uc.begin(), uc.end(), b);
  }

  std::vector<ElementId> maximal_elements() const {
    std::vector<ElementId> out;
    for (ElementId a = 0; a < size(); ++a)
      if (upper_covers_[a].empty()) out.push_back(a);
    return out;
  }

 private:
  FinitePointedPoset(std::vector<std::string> labels, std::vector<Bitset> up)
      : labels_(std::move(labels)), up_(std::move(up)) {
    const auto n = labels_.size();
    if (n == 0) throw NoLeastElement();
    for (ElementId a = 0; a < n; ++a)
      if (!up_[a].test(a)) throw NotAPartialOrder("reflexivity", labels_[a], labels_[a]);
    for (ElementId a = 0; a < n; ++a)
      for (auto b = up_[a].find_next(a); b != Bitset::npos; b = up_[a].find_next(b))
        if (up_[b].test(a)) throw NotAPartialOrder("antisymmetry", labels_[a], labels_[b]);
    for (ElementId a = 0; a < n; ++a)
      for (auto b = up_[a].find_first(); b != Bitset::npos; b = up_[a].find_next(b))
        if (!up_[b].is_subset_of(up_[a])) {
          auto missing = up_[b] - up_[a];
          throw NotAPartialOrder("transitivity", labels_[a], labels_[missing.find_first()]);
        }
    down_.assign(n, Bitset(n));
    for (ElementId a = 0; a < n; ++a)
      for (auto b = up_[a].find_first(); b != Bitset::npos; b = up_[a].find_next(b)) down_[b].set(a);
    bottom_ = n;
    for (ElementId a = 0; a < n; ++a)
      if (up_[a].count() == n) {
        bottom_ = a;
        break;
      }
    if (bottom_ == n) throw NoLeastElement();

    upper_covers_.assign(n, {});
    lower_covers_.assign(n, {});
    for (ElementId a = 0; a < n; ++a) {
      Bitset strict_up = up_[a];
      strict_up.reset(a);
      for (auto b = strict_up.find_first(); b != Bitset::npos; b = strict_up.find_next(b)) {
        Bitset strict_down = down_[b];
        strict_down.reset(b);
        if (!strict_up.intersects(strict_down)) {
          upper_covers_[a].push_back(b);
          lower_covers_[b].push_back(a);
        }
      }
    }
  }

  std::vector<std::string> labels_;
  std::vector<Bitset> up_;
  std::vector<Bitset> down_;
  ElementId bottom_ = 0;
  std::vector<std::vector<ElementId>> upper_covers_;
  std::vector<std::vector<ElementId>> lower_covers_;
};

/// Cartesian product of pointed posets with the componentwise order,
/// evaluated lazily. Elements are mixed-radix indices with the first
/// component most significant, so id order is the lexicographic order of
/// component tuples.
class ProductPoset {
 public:
  ProductPoset() : strides_{}, size_(1) {}

  explicit ProductPoset(std::vector<std::shared_ptr<const FinitePointedPoset>> components)
      : components_(std::move(components)) {
    strides_.assign(components_.size(), 1);
    std::size_t stride = 1;
    for (std::size_t k = components_.size(); k-- > 0;) {
      strides_[k] = stride;
      const auto radix = components_[k]->size();
      if (stride > std::numeric_limits<std::size_t>::max() / radix)
        throw std::length_error("product poset too large to index");
      stride *= radix;
    }
    size_ = stride;
  }

  std::size_t size() const { return size_; }
  std::size_t arity() const { return components_.size(); }
  const FinitePointedPoset& component(std::size_t k) const { return *components_[k]; }
  const std::shared_ptr<const FinitePointedPoset>& component_ptr(std::size_t k) const { return components_[k]; }

  ElementId coordinate(ElementId x, std::size_t k) const { return (x / strides_[k]) % components_[k]->size(); }

  std::vector<ElementId> coordinates(ElementId x) const {
    std::vector<ElementId> out(arity());
    for (std::size_t k = 0; k < arity(); ++k) out[k] = coordinate(x, k);
    return out;
  }

  ElementId compose(std::span<const ElementId> coords) const {
    ElementId x = 0;
    for (std::size_t k = 0; k < arity(); ++k) x += coords[k] * strides_[k];
    return x;
  }

  bool leq(ElementId a, ElementId b) const {
    for (std::size_t k = 0; k < arity(); ++k)
      if (!components_[k]->leq(coordinate(a, k), coordinate(b, k))) return false;
    return true;
  }

  ElementId bottom() const {
    ElementId x = 0;
    for (std::size_t k = 0; k < arity(); ++k) x += components_[k]->bottom() * strides_[k];
    return x;
  }

  std::string label(ElementId x) const {
    std::string out = "(";
    for (std::size_t k = 0; k < arity(); ++k) {
      if (k) out += ",";
      out += components_[k]->label(coordinate(x, k));
    }
    return out + ")";
  }

  /// A cover in a product moves exactly one coordinate up by a cover.
  std::vector<ElementId> upper_covers(ElementId x) const {
    std::vector<ElementId> out;
    for (std::size_t k = 0; k < arity(); ++k) {
      const auto c = coordinate(x, k);
      for (auto next : components_[k]->upper_covers(c)) out.push_back(x + (next - c) * strides_[k]);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::vector<std::shared_ptr<const FinitePointedPoset>> components_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 1;
};

/// All pairs (x, y) with x strictly below y and nothing strictly between.
template <PointedPoset P>
std::vector<std::pair<ElementId, ElementId>> covers(const P& poset) {
  std::vector<std::pair<ElementId, ElementId>> out;
  for (ElementId a = 0; a < poset.size(); ++a)
    for (auto b : poset.upper_covers(a)) out.emplace_back(a, b);
  return out;
}

/// Covers b < c that take place below d (b, c both approximate d).
template <PointedPoset P>
std::vector<std::pair<ElementId, ElementId>> relative_covers(const P& poset, ElementId d) {
  std::vector<std::pair<ElementId, ElementId>> out;
  for (ElementId a = 0; a < poset.size(); ++a) {
    if (!poset.leq(a, d)) continue;
    for (auto b : poset.upper_covers(a))
      if (poset.leq(b, d)) out.emplace_back(a, b);
  }
  return out;
}

/// Total, monotone map between pointed posets, stored as a table.
template <PointedPoset Dom, PointedPoset Cod = Dom>
class MonotoneMap {
 public:
  MonotoneMap(std::shared_ptr<const Dom> domain, std::shared_ptr<const Cod> codomain,
              std::vector<ElementId> table)
      : domain_(std::move(domain)), codomain_(std::move(codomain)), table_(std::move(table)) {
    if (table_.size() != domain_->size())
      throw std::invalid_argument("map table does not cover the domain");
    for (auto y : table_)
      if (y >= codomain_->size()) throw std::invalid_argument("map table leaves the codomain");
    // Monotone iff every cover is sent to an ordered pair.
    for (ElementId x = 0; x < domain_->size(); ++x)
      for (auto y : domain_->upper_covers(x))
        if (!codomain_->leq(table_[x], table_[y]))
          throw NotMonotone(domain_->label(x), domain_->label(y));
  }

  ElementId operator()(ElementId x) const { return table_[x]; }
  const Dom& domain() const { return *domain_; }
  const Cod& codomain() const { return *codomain_; }
  const std::shared_ptr<const Dom>& domain_ptr() const { return domain_; }
  const std::shared_ptr<const Cod>& codomain_ptr() const { return codomain_; }
  const std::vector<ElementId>& table() const { return table_; }
  bool is_strict() const { return table_[domain_->bottom()] == codomain_->bottom(); }

  friend bool operator==(const MonotoneMap& a, const MonotoneMap& b) { return a.table_ == b.table_; }

 private:
  std::shared_ptr<const Dom> domain_;
  std::shared_ptr<const Cod> codomain_;
  std::vector<ElementId> table_;
};

template <PointedPoset P>
MonotoneMap<P> identity_map(std::shared_ptr<const P> poset) {
  std::vector<ElementId> table(poset->size());
  for (ElementId x = 0; x < table.size(); ++x) table[x] = x;
  return MonotoneMap<P>(poset, poset, std::move(table));
}

template <PointedPoset P>
MonotoneMap<P> constant_map(std::shared_ptr<const P> poset, ElementId value) {
  return MonotoneMap<P>(poset, poset, std::vector<ElementId>(poset->size(), value));
}

}  // namespace gkahn
