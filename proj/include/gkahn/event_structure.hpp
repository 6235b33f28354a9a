#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "gkahn/bitset.hpp"
#include "gkahn/poset.hpp"
#include "gkahn/verdict.hpp"

namespace gkahn {

using EventId = std::size_t;
using Sort = std::set<std::string>;

class AxiomViolation : public std::runtime_error {
 public:
  AxiomViolation(std::string axiom, std::vector<std::string> witness, const std::string& detail)
      : std::runtime_error("event structure axiom '" + axiom + "' violated: " + detail),
        axiom_(std::move(axiom)),
        witness_(std::move(witness)) {}

  const std::string& axiom() const { return axiom_; }
  const std::vector<std::string>& witness() const { return witness_; }

 private:
  std::string axiom_;
  std::vector<std::string> witness_;
};

class UnknownChannel : public std::runtime_error {
 public:
  explicit UnknownChannel(const std::string& name) : std::runtime_error("unknown channel '" + name + "'") {}
};

/// Prime event structure (E, <=, Con). Consistency is represented by the
/// minimal forbidden sets: A is consistent iff it includes none of them.
class EventStructure {
 public:
  EventStructure() = default;

  /// Causality pairs (a, b) mean a <= b and are closed reflexively and
  /// transitively; a cycle is rejected.
  static EventStructure validate(std::vector<std::string> events,
                                 const std::vector<std::pair<std::string, std::string>>& causality,
                                 const std::vector<std::vector<std::string>>& forbidden) {
    std::unordered_map<std::string, EventId> index;
    for (EventId e = 0; e < events.size(); ++e)
      if (!index.emplace(events[e], e).second)
        throw std::invalid_argument("duplicate event '" + events[e] + "'");
    auto lookup = [&](const std::string& name) {
      auto it = index.find(name);
      if (it == index.end()) throw std::invalid_argument("unknown event '" + name + "'");
      return it->second;
    };
    std::vector<std::pair<EventId, EventId>> pairs;
    for (const auto& [a, b] : causality) pairs.emplace_back(lookup(a), lookup(b));
    std::vector<Bitset> sets;
    for (const auto& f : forbidden) {
      Bitset s(events.size());
      for (const auto& name : f) s.set(lookup(name));
      sets.push_back(std::move(s));
    }
    return from_ids(std::move(events), pairs, std::move(sets));
  }

  static EventStructure from_ids(std::vector<std::string> events,
                                 const std::vector<std::pair<EventId, EventId>>& causality,
                                 std::vector<Bitset> forbidden) {
    EventStructure es;
    const auto n = events.size();
    es.names_ = std::move(events);
    es.down_.assign(n, Bitset(n));
    for (EventId e = 0; e < n; ++e) es.down_[e].set(e);
    for (const auto& [a, b] : causality) es.down_[b].set(a);
    for (bool changed = true; changed;) {
      changed = false;
      for (EventId e = 0; e < n; ++e) {
        Bitset closed = es.down_[e];
        for (auto p = es.down_[e].find_first(); p != Bitset::npos; p = es.down_[e].find_next(p))
          closed |= es.down_[p];
        if (closed != es.down_[e]) {
          es.down_[e] = std::move(closed);
          changed = true;
        }
      }
    }
    for (EventId a = 0; a < n; ++a)
      for (auto b = es.down_[a].find_first(); b != Bitset::npos; b = es.down_[a].find_next(b))
        if (b != a && es.down_[b].test(a))
          throw AxiomViolation("partial-order", {es.names_[a], es.names_[b]}, "causality has a cycle");
    es.up_.assign(n, Bitset(n));
    for (EventId a = 0; a < n; ++a)
      for (auto b = es.down_[a].find_first(); b != Bitset::npos; b = es.down_[a].find_next(b))
        es.up_[b].set(a);

    for (const auto& f : forbidden) {
      if (f.size() != n) throw std::invalid_argument("forbidden set over the wrong event universe");
      if (f.count() <= 1) {
        std::vector<std::string> w;
        for (auto e : members(f)) w.push_back(es.names_[e]);
        throw AxiomViolation("singletons-consistent", w, "a forbidden set has fewer than two events");
      }
    }
    // Binary conflicts go into per-event bitsets; larger sets are kept only
    // when minimal, in canonical order.
    es.conflict_.assign(n, Bitset(n));
    std::vector<Bitset> larger;
    for (auto& f : forbidden) {
      if (f.count() == 2) {
        const auto a = f.find_first();
        const auto b = f.find_next(a);
        es.conflict_[a].set(b);
        es.conflict_[b].set(a);
      } else {
        larger.push_back(std::move(f));
      }
    }
    std::sort(larger.begin(), larger.end(), canonical_less);
    larger.erase(std::unique(larger.begin(), larger.end()), larger.end());
    for (auto& f : larger) {
      bool redundant = false;
      for (auto e = f.find_first(); e != Bitset::npos && !redundant; e = f.find_next(e))
        redundant = es.conflict_[e].intersects(f);
      for (std::size_t i = 0; i < es.forbidden_.size() && !redundant; ++i)
        redundant = es.forbidden_[i].is_subset_of(f);
      if (!redundant) es.forbidden_.push_back(std::move(f));
    }
    es.by_event_.assign(n, {});
    for (std::size_t i = 0; i < es.forbidden_.size(); ++i)
      for (auto e : members(es.forbidden_[i])) es.by_event_[e].push_back(i);
    es.check_down_closure_axiom();
    return es;
  }

  std::size_t size() const { return names_.size(); }
  const std::string& name(EventId e) const { return names_[e]; }
  const std::vector<std::string>& names() const { return names_; }

  std::optional<EventId> find(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return static_cast<EventId>(it - names_.begin());
  }

  bool leq(EventId a, EventId b) const { return down_[b].test(a); }
  /// Down-set of e, e included.
  const Bitset& down(EventId e) const { return down_[e]; }
  const Bitset& up(EventId e) const { return up_[e]; }
  /// Events in binary conflict with e.
  const Bitset& conflicts(EventId e) const { return conflict_[e]; }
  /// Minimal forbidden sets with three or more events.
  const std::vector<Bitset>& larger_forbidden() const { return forbidden_; }

  /// All minimal forbidden sets, binary conflicts first.
  std::vector<Bitset> forbidden() const {
    std::vector<Bitset> out;
    for (EventId a = 0; a < size(); ++a)
      for (auto b = conflict_[a].find_next(a); b != Bitset::npos; b = conflict_[a].find_next(b))
        out.push_back(make_bitset(size(), {a, b}));
    out.insert(out.end(), forbidden_.begin(), forbidden_.end());
    return out;
  }

  Bitset empty_set() const { return Bitset(size()); }

  bool consistent(const Bitset& a) const {
    for (auto e = a.find_first(); e != Bitset::npos; e = a.find_next(e)) {
      if (conflict_[e].intersects(a)) return false;
      for (auto i : by_event_[e]) {
        const auto& f = forbidden_[i];
        if (f.find_first() == e && f.is_subset_of(a)) return false;
      }
    }
    return true;
  }

  bool down_closed(const Bitset& a) const {
    for (auto e = a.find_first(); e != Bitset::npos; e = a.find_next(e))
      if (!down_[e].is_subset_of(a)) return false;
    return true;
  }

  bool is_configuration(const Bitset& a) const { return a.size() == size() && down_closed(a) && consistent(a); }

  /// Whether x + {e} is a configuration, given that x is one.
  bool can_extend(const Bitset& x, EventId e) const {
    if (x.test(e)) return false;
    Bitset y = x;
    y.set(e);
    if (!down_[e].is_subset_of(y)) return false;
    if (conflict_[e].intersects(x)) return false;
    for (auto i : by_event_[e])
      if (forbidden_[i].is_subset_of(y)) return false;
    return true;
  }

  Bitset down_closure(const Bitset& a) const {
    Bitset out(size());
    for (auto e = a.find_first(); e != Bitset::npos; e = a.find_next(e)) out |= down_[e];
    return out;
  }

  std::string config_label(const Bitset& x) const {
    std::string out = "{";
    bool first = true;
    for (auto e = x.find_first(); e != Bitset::npos; e = x.find_next(e)) {
      if (!first) out += ",";
      out += names_[e];
      first = false;
    }
    return out + "}";
  }

 private:
  // A consistent => down(A) consistent. Equivalent to: replacing any member
  // f of a forbidden set by any a >= f leaves an inconsistent set (an
  // inconsistent set always contains a forbidden one, so replacements can be
  // iterated until every member lies in A).
  void check_down_closure_axiom() const {
    auto report = [&](const Bitset& replaced) {
      std::vector<std::string> w;
      for (auto e : members(replaced)) w.push_back(names_[e]);
      throw AxiomViolation("down-closure-consistent", w,
                           config_label(replaced) + " is consistent but its down-closure " +
                               config_label(down_closure(replaced)) + " is not");
    };
    for (EventId f = 0; f < size(); ++f)
      for (auto g = conflict_[f].find_first(); g != Bitset::npos; g = conflict_[f].find_next(g))
        for (auto a = up_[f].find_first(); a != Bitset::npos; a = up_[f].find_next(a)) {
          if (a == f || (a != g && conflict_[a].test(g))) continue;
          report(make_bitset(size(), {a, g}));
        }
    for (const auto& f : forbidden_)
      for (auto member : members(f))
        for (auto a = up_[member].find_first(); a != Bitset::npos; a = up_[member].find_next(a)) {
          if (a == member) continue;
          Bitset replaced = f;
          replaced.reset(member);
          replaced.set(a);
          if (consistent(replaced)) report(replaced);
        }
  }

  std::vector<std::string> names_;
  std::vector<Bitset> down_;
  std::vector<Bitset> up_;
  std::vector<Bitset> conflict_;
  std::vector<Bitset> forbidden_;
  std::vector<std::vector<std::size_t>> by_event_;
};

/// All configurations with at most max_size events, in canonical order
/// (by size, then lexicographically on event ids).
inline std::vector<Bitset> configurations(const EventStructure& es,
                                          std::size_t max_size = std::numeric_limits<std::size_t>::max()) {
  std::vector<Bitset> out{es.empty_set()};
  std::vector<Bitset> layer{es.empty_set()};
  for (std::size_t k = 0; k < max_size && !layer.empty(); ++k) {
    std::unordered_set<Bitset, BitsetHash> next;
    for (const auto& x : layer)
      for (EventId e = 0; e < es.size(); ++e)
        if (es.can_extend(x, e)) {
          Bitset y = x;
          y.set(e);
          next.insert(std::move(y));
        }
    layer.assign(next.begin(), next.end());
    std::sort(layer.begin(), layer.end(), canonical_less);
    out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

/// Configurations ordered by inclusion, with a reverse index.
struct ConfigurationDomain {
  std::vector<Bitset> configs;
  std::shared_ptr<const FinitePointedPoset> poset;
  std::unordered_map<Bitset, ElementId, BitsetHash> index;

  ElementId id_of(const Bitset& x) const {
    auto it = index.find(x);
    if (it == index.end()) throw std::out_of_range("not a configuration of this domain");
    return it->second;
  }
};

inline ConfigurationDomain config_poset(const EventStructure& es,
                                        std::size_t max_size = std::numeric_limits<std::size_t>::max()) {
  ConfigurationDomain dom;
  dom.configs = configurations(es, max_size);
  std::vector<std::string> labels;
  labels.reserve(dom.configs.size());
  for (ElementId i = 0; i < dom.configs.size(); ++i) {
    labels.push_back(es.config_label(dom.configs[i]));
    dom.index.emplace(dom.configs[i], i);
  }
  dom.poset = std::make_shared<const FinitePointedPoset>(FinitePointedPoset::from_order(
      std::move(labels), [&](ElementId a, ElementId b) { return dom.configs[a].is_subset_of(dom.configs[b]); }));
  return dom;
}

/// Named event structures, one per channel.
class ChannelFamily {
 public:
  ChannelFamily() = default;
  explicit ChannelFamily(std::vector<std::pair<std::string, EventStructure>> channels) {
    for (auto& [name, es] : channels)
      if (!channels_.emplace(name, std::move(es)).second)
        throw std::invalid_argument("duplicate channel '" + name + "'");
  }

  const std::map<std::string, EventStructure>& channels() const { return channels_; }
  bool contains(const std::string& name) const { return channels_.count(name) != 0; }
  const EventStructure& at(const std::string& name) const {
    auto it = channels_.find(name);
    if (it == channels_.end()) throw UnknownChannel(name);
    return it->second;
  }
  Sort all() const {
    Sort s;
    for (const auto& [name, es] : channels_) s.insert(name);
    return s;
  }

 private:
  std::map<std::string, EventStructure> channels_;
};

/// Disjoint union of the channel event structures of a sort. Events are
/// tagged (channel, event) pairs ordered by channel name, then by the
/// component event id, so each channel occupies a contiguous id range.
class ProductStructure {
 public:
  const EventStructure& es() const { return es_; }
  const std::vector<std::string>& channels() const { return channels_; }
  Sort sort() const { return Sort(channels_.begin(), channels_.end()); }

  std::optional<std::size_t> channel_index(const std::string& name) const {
    auto it = std::lower_bound(channels_.begin(), channels_.end(), name);
    if (it == channels_.end() || *it != name) return std::nullopt;
    return static_cast<std::size_t>(it - channels_.begin());
  }

  std::size_t channel_of(EventId e) const { return channel_of_[e]; }
  EventId local_of(EventId e) const { return e - offsets_[channel_of_[e]]; }
  EventId event(std::size_t channel, EventId local) const { return offsets_[channel] + local; }
  std::size_t offset(std::size_t channel) const { return offsets_[channel]; }
  std::size_t count(std::size_t channel) const { return counts_[channel]; }

  Bitset channel_events(std::size_t channel) const {
    Bitset b(es_.size());
    for (std::size_t i = 0; i < counts_[channel]; ++i) b.set(offsets_[channel] + i);
    return b;
  }

  Bitset sort_events(const Sort& sort) const {
    Bitset b(es_.size());
    for (const auto& name : sort) {
      auto ch = channel_index(name);
      if (!ch) throw UnknownChannel(name);
      b |= channel_events(*ch);
    }
    return b;
  }

  /// The channel's share of x, in component numbering.
  Bitset slice(const Bitset& x, std::size_t channel) const {
    Bitset local(counts_[channel]);
    for (std::size_t i = 0; i < counts_[channel]; ++i)
      if (x.test(offsets_[channel] + i)) local.set(i);
    return local;
  }

  Bitset embed(std::size_t channel, const Bitset& local) const {
    Bitset x(es_.size());
    for (auto i = local.find_first(); i != Bitset::npos; i = local.find_next(i)) x.set(offsets_[channel] + i);
    return x;
  }

 private:
  friend ProductStructure product_es(const ChannelFamily&, const Sort&);

  EventStructure es_;
  std::vector<std::string> channels_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> counts_;
  std::vector<std::size_t> channel_of_;
};

inline ProductStructure product_es(const ChannelFamily& family, const Sort& sort) {
  ProductStructure p;
  for (const auto& name : sort) {
    if (!family.contains(name)) throw UnknownChannel(name);
    p.channels_.push_back(name);
  }
  std::vector<std::string> names;
  std::size_t total = 0;
  for (std::size_t ch = 0; ch < p.channels_.size(); ++ch) {
    const auto& component = family.at(p.channels_[ch]);
    p.offsets_.push_back(total);
    p.counts_.push_back(component.size());
    for (EventId e = 0; e < component.size(); ++e) {
      names.push_back(p.channels_[ch] + ":" + component.name(e));
      p.channel_of_.push_back(ch);
    }
    total += component.size();
  }
  std::vector<std::pair<EventId, EventId>> causality;
  std::vector<Bitset> forbidden;
  for (std::size_t ch = 0; ch < p.channels_.size(); ++ch) {
    const auto& component = family.at(p.channels_[ch]);
    for (EventId b = 0; b < component.size(); ++b)
      for (auto a : members(component.down(b)))
        if (a != b) causality.emplace_back(p.offsets_[ch] + a, p.offsets_[ch] + b);
    for (const auto& f : component.forbidden()) {
      Bitset tagged(total);
      for (auto e : members(f)) tagged.set(p.offsets_[ch] + e);
      forbidden.push_back(std::move(tagged));
    }
  }
  p.es_ = EventStructure::from_ids(std::move(names), causality, std::move(forbidden));
  return p;
}

/// pi^S_T(x) = x restricted to the T-tagged events, renumbered into E_T.
inline Bitset project_config(const ProductStructure& from, const Bitset& x, const ProductStructure& to) {
  Bitset out = to.es().empty_set();
  for (std::size_t ch = 0; ch < to.channels().size(); ++ch) {
    auto src = from.channel_index(to.channels()[ch]);
    if (!src) throw std::invalid_argument("project_config: target sort is not a subsort");
    out |= to.embed(ch, from.slice(x, *src));
  }
  return out;
}

/// |E_S| is order-isomorphic to the product of the channel configuration
/// domains via x -> (x restricted to each channel).
inline Verdict check_product_iso(const ChannelFamily& family, const Sort& sort,
                                 std::size_t max_configs = 200'000) {
  const auto product = product_es(family, sort);
  const auto configs = configurations(product.es());
  if (configs.size() > max_configs) {
    Verdict v;
    v.name = "product-iso";
    v.status = Status::skipped;
    v.message = "configuration domain exceeds " + std::to_string(max_configs);
    return v;
  }
  std::vector<ConfigurationDomain> parts;
  std::vector<std::shared_ptr<const FinitePointedPoset>> posets;
  for (const auto& name : product.channels()) {
    parts.push_back(config_poset(family.at(name)));
    posets.push_back(parts.back().poset);
  }
  const ProductPoset target(posets);
  std::vector<ElementId> image(configs.size());
  std::vector<char> hit(target.size(), 0);
  for (std::size_t i = 0; i < configs.size(); ++i) {
    std::vector<ElementId> coords;
    for (std::size_t ch = 0; ch < parts.size(); ++ch) {
      auto slice = product.slice(configs[i], ch);
      auto it = parts[ch].index.find(slice);
      if (it == parts[ch].index.end())
        return Verdict::fail("product-iso", "a channel slice is not a configuration",
                             {{"configuration", product.es().config_label(configs[i])}});
      coords.push_back(it->second);
    }
    image[i] = target.compose(coords);
    if (hit[image[i]]++)
      return Verdict::fail("product-iso", "two configurations share an image",
                           {{"configuration", product.es().config_label(configs[i])}});
  }
  if (configs.size() != target.size())
    return Verdict::fail("product-iso", "projection is not onto the product",
                         {{"configurations", configs.size()}, {"product", target.size()}});
  const bool pairwise = configs.size() <= 3000;
  if (pairwise) {
    for (std::size_t i = 0; i < configs.size(); ++i)
      for (std::size_t j = 0; j < configs.size(); ++j)
        if (configs[i].is_subset_of(configs[j]) != target.leq(image[i], image[j]))
          return Verdict::fail("product-iso", "projection does not preserve and reflect the order",
                               {{"x", product.es().config_label(configs[i])},
                                {"y", product.es().config_label(configs[j])}});
  } else {
    // A bijection between finite posets that preserves covers and matches
    // the number of upper covers everywhere is an order isomorphism.
    std::unordered_map<Bitset, std::size_t, BitsetHash> index;
    for (std::size_t i = 0; i < configs.size(); ++i) index.emplace(configs[i], i);
    for (std::size_t i = 0; i < configs.size(); ++i) {
      std::size_t up = 0;
      for (EventId e = 0; e < product.es().size(); ++e) {
        if (!product.es().can_extend(configs[i], e)) continue;
        Bitset y = configs[i];
        y.set(e);
        ++up;
        const auto& uc = target.upper_covers(image[i]);
        if (std::find(uc.begin(), uc.end(), image[index.at(y)]) == uc.end())
          return Verdict::fail("product-iso", "a cover is not preserved",
                               {{"x", product.es().config_label(configs[i])},
                                {"y", product.es().config_label(y)}});
      }
      if (up != target.upper_covers(image[i]).size())
        return Verdict::fail("product-iso", "a product cover is not reflected",
                             {{"x", product.es().config_label(configs[i])}});
    }
  }
  auto v = Verdict::pass("product-iso", std::to_string(configs.size()) + " configurations match the product");
  v.data = {{"configurations", configs.size()}, {"pairwise", pairwise}};
  return v;
}

}  // namespace gkahn
