#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <boost/container_hash/hash.hpp>
#include <json.hpp>

#include "gkahn/bitset.hpp"
#include "gkahn/event_structure.hpp"
#include "gkahn/fixpoint.hpp"
#include "gkahn/poset.hpp"

namespace gkahn {

enum class TraceKind { pomset, linear };

inline const char* to_string(TraceKind k) { return k == TraceKind::pomset ? "pomset" : "linear"; }

inline TraceKind parse_trace_kind(const std::string& s) {
  if (s == "pomset") return TraceKind::pomset;
  if (s == "linear") return TraceKind::linear;
  throw std::invalid_argument("unknown model kind '" + s + "'");
}

/// Traces store predecessor sets as 32-bit masks over carrier positions.
inline constexpr std::size_t max_trace_events = 32;

class NotAConfiguration : public std::runtime_error {
 public:
  explicit NotAConfiguration(const std::string& carrier)
      : std::runtime_error("carrier " + carrier + " is not a configuration") {}
};

class OrderNotPartial : public std::runtime_error {
 public:
  OrderNotPartial(const std::string& a, const std::string& b)
      : std::runtime_error("trace order has a cycle through " + a + " and " + b) {}
};

class CausalityNotRespected : public std::runtime_error {
 public:
  CausalityNotRespected(std::string a, std::string b)
      : std::runtime_error("causality " + a + " <= " + b + " is missing from the trace order"),
        witness_(std::move(a), std::move(b)) {}
  const std::pair<std::string, std::string>& witness() const { return witness_; }

 private:
  std::pair<std::string, std::string> witness_;
};

class NotLinear : public std::runtime_error {
 public:
  NotLinear() : std::runtime_error("trace order is not total") {}
};

class BoundExceeded : public std::runtime_error {
 public:
  BoundExceeded(const std::string& what, std::size_t limit)
      : std::runtime_error(what + " exceeds the bound of " + std::to_string(limit)) {}
};

/// A configuration together with a causal order on it. events is ascending;
/// below[i] holds the strict predecessors of events[i] as a position mask.
struct Trace {
  std::vector<EventId> events;
  std::vector<std::uint32_t> below;

  std::size_t size() const { return events.size(); }
  bool empty() const { return events.empty(); }

  std::optional<std::size_t> position(EventId e) const {
    auto it = std::lower_bound(events.begin(), events.end(), e);
    if (it == events.end() || *it != e) return std::nullopt;
    return static_cast<std::size_t>(it - events.begin());
  }
  bool contains(EventId e) const { return std::binary_search(events.begin(), events.end(), e); }

  /// Position i strictly precedes position j.
  bool precedes(std::size_t i, std::size_t j) const { return (below[j] >> i) & 1u; }

  std::uint32_t all_positions() const {
    return events.size() == 32 ? ~0u : ((1u << events.size()) - 1u);
  }

  /// Positions with no strict successor.
  std::uint32_t maximal_positions() const {
    std::uint32_t has_successor = 0;
    for (auto b : below) has_successor |= b;
    return all_positions() & ~has_successor;
  }

  bool is_linear() const {
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = i + 1; j < size(); ++j)
        if (!precedes(i, j) && !precedes(j, i)) return false;
    return true;
  }

  Bitset carrier(std::size_t universe) const {
    Bitset b(universe);
    for (auto e : events) b.set(e);
    return b;
  }

  friend bool operator==(const Trace&, const Trace&) = default;
  friend auto operator<=>(const Trace&, const Trace&) = default;
};

struct TraceHash {
  std::size_t operator()(const Trace& t) const {
    std::size_t seed = 0;
    boost::hash_combine(seed, boost::hash_range(t.events.begin(), t.events.end()));
    boost::hash_combine(seed, boost::hash_range(t.below.begin(), t.below.end()));
    return seed;
  }
};

/// Canonical trace order: by carrier size, then structurally.
inline bool trace_canonical_less(const Trace& a, const Trace& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

/// Validates (carrier, order) as a trace. The order pairs are closed
/// reflexively and transitively but causality is not added: every causal
/// pair inside the carrier has to be implied by the given pairs.
inline Trace validate_trace(const EventStructure& es, const Bitset& carrier,
                            const std::vector<std::pair<EventId, EventId>>& order) {
  if (carrier.size() != es.size()) throw std::invalid_argument("carrier over the wrong event universe");
  if (!es.is_configuration(carrier)) throw NotAConfiguration(es.config_label(carrier));
  Trace t;
  t.events = members(carrier);
  if (t.size() > max_trace_events) throw BoundExceeded("trace carrier", max_trace_events);
  t.below.assign(t.size(), 0);
  for (const auto& [a, b] : order) {
    auto pa = t.position(a);
    auto pb = t.position(b);
    if (!pa || !pb) throw std::invalid_argument("order pair mentions an event outside the carrier");
    if (a != b) t.below[*pb] |= 1u << *pa;
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t j = 0; j < t.size(); ++j) {
      auto closed = t.below[j];
      for (std::size_t i = 0; i < t.size(); ++i)
        if ((t.below[j] >> i) & 1u) closed |= t.below[i];
      if (closed != t.below[j]) {
        t.below[j] = closed;
        changed = true;
      }
    }
  }
  for (std::size_t j = 0; j < t.size(); ++j)
    if ((t.below[j] >> j) & 1u) {
      for (std::size_t i = 0; i < t.size(); ++i)
        if (i != j && t.precedes(i, j) && t.precedes(j, i))
          throw OrderNotPartial(es.name(t.events[i]), es.name(t.events[j]));
      throw OrderNotPartial(es.name(t.events[j]), es.name(t.events[j]));
    }
  for (std::size_t j = 0; j < t.size(); ++j)
    for (std::size_t i = 0; i < t.size(); ++i)
      if (i != j && es.leq(t.events[i], t.events[j]) && !t.precedes(i, j))
        throw CausalityNotRespected(es.name(t.events[i]), es.name(t.events[j]));
  return t;
}

/// Name-based overload; order pairs are (earlier, later).
inline Trace validate_trace(const EventStructure& es, const std::vector<std::string>& carrier,
                            const std::vector<std::pair<std::string, std::string>>& order) {
  auto lookup = [&](const std::string& name) {
    auto e = es.find(name);
    if (!e) throw std::invalid_argument("unknown event '" + name + "'");
    return *e;
  };
  Bitset x = es.empty_set();
  for (const auto& name : carrier) x.set(lookup(name));
  std::vector<std::pair<EventId, EventId>> pairs;
  for (const auto& [a, b] : order) pairs.emplace_back(lookup(a), lookup(b));
  return validate_trace(es, x, pairs);
}

/// t below u: x_t a subset of x_u that is down-closed in u, with the
/// induced order.
inline bool trace_leq(const Trace& t, const Trace& u) {
  if (t.size() > u.size()) return false;
  std::vector<std::size_t> at(t.size());
  std::uint32_t image = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    auto p = u.position(t.events[i]);
    if (!p) return false;
    at[i] = *p;
    image |= 1u << *p;
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    if ((u.below[at[i]] & ~image) != 0) return false;
    std::uint32_t mapped = 0;
    for (std::size_t k = 0; k < t.size(); ++k)
      if (t.precedes(k, i)) mapped |= 1u << at[k];
    if (mapped != u.below[at[i]]) return false;
  }
  return true;
}

/// The sub-trace on a set of positions (assumed down-closed), with the
/// induced order.
inline Trace sub_trace(const Trace& t, std::uint32_t positions) {
  Trace out;
  std::vector<int> renumber(t.size(), -1);
  for (std::size_t i = 0; i < t.size(); ++i)
    if ((positions >> i) & 1u) {
      renumber[i] = static_cast<int>(out.events.size());
      out.events.push_back(t.events[i]);
    }
  out.below.assign(out.events.size(), 0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (renumber[i] < 0) continue;
    for (std::size_t k = 0; k < t.size(); ++k)
      if (renumber[k] >= 0 && t.precedes(k, i)) out.below[renumber[i]] |= 1u << renumber[k];
  }
  return out;
}

/// Adds e on top of the positions in preds (a down-set of t).
inline Trace extend_trace(const Trace& t, EventId e, std::uint32_t preds) {
  const auto p = static_cast<std::size_t>(std::lower_bound(t.events.begin(), t.events.end(), e) - t.events.begin());
  auto shift = [p](std::uint32_t mask) {
    const std::uint32_t low = p == 0 ? 0u : (p >= 32 ? ~0u : ((1u << p) - 1u));
    return (mask & low) | ((mask & ~low) << 1);
  };
  Trace u;
  u.events = t.events;
  u.events.insert(u.events.begin() + static_cast<std::ptrdiff_t>(p), e);
  u.below.reserve(u.events.size());
  for (std::size_t i = 0; i < t.size(); ++i) u.below.push_back(shift(t.below[i]));
  u.below.insert(u.below.begin() + static_cast<std::ptrdiff_t>(p), shift(preds));
  return u;
}

/// rho(t) = (x_t on keep, order induced).
inline Trace restrict_trace(const Trace& t, const Bitset& keep) {
  std::uint32_t positions = 0;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (keep.test(t.events[i])) positions |= 1u << i;
  return sub_trace(t, positions);
}

/// mu(t) = x_t.
inline Bitset eval_trace(const Trace& t, std::size_t universe) { return t.carrier(universe); }

/// Closes a position set downwards in the trace order.
inline std::uint32_t down_closure(const Trace& t, std::uint32_t positions) {
  std::uint32_t out = positions;
  for (std::size_t i = 0; i < t.size(); ++i)
    if ((positions >> i) & 1u) out |= t.below[i];
  return out;
}

/// t restricted to the down-closure of X, for X a subset of x_t.
inline Trace trace_restrict_to(const Trace& t, const Bitset& x) {
  std::uint32_t positions = 0;
  for (auto e = x.find_first(); e != Bitset::npos; e = x.find_next(e)) {
    auto p = t.position(e);
    if (!p) throw std::invalid_argument("trace_restrict_to: event outside the carrier");
    positions |= 1u << *p;
  }
  return sub_trace(t, down_closure(t, positions));
}

/// Calls fn(mask) for every down-set of t that includes required (which
/// must itself be down-closed).
template <class Fn>
void for_each_down_set(const Trace& t, std::uint32_t required, Fn&& fn) {
  std::vector<std::size_t> order(t.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  // Fewer predecessors first: a linear extension of the trace order.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::popcount(t.below[a]) < std::popcount(t.below[b]);
  });
  auto walk = [&](auto&& self, std::size_t k, std::uint32_t current) -> void {
    if (k == order.size()) {
      fn(current);
      return;
    }
    const auto p = order[k];
    const auto bit = 1u << p;
    if (required & bit) {
      self(self, k + 1, current | bit);
      return;
    }
    self(self, k + 1, current);
    if ((t.below[p] & ~current) == 0) self(self, k + 1, current | bit);
  };
  walk(walk, 0, 0);
}

inline std::vector<std::uint32_t> down_sets(const Trace& t) {
  std::vector<std::uint32_t> out;
  for_each_down_set(t, 0, [&](std::uint32_t m) { out.push_back(m); });
  std::sort(out.begin(), out.end());
  return out;
}

/// Predecessor sets available to a new event e on top of t: every down-set
/// containing e's causes (pomset), or the whole carrier (linear).
inline std::vector<std::uint32_t> extension_predecessors(const Trace& t, const EventStructure& es, EventId e,
                                                         TraceKind kind) {
  if (kind == TraceKind::linear) return {t.all_positions()};
  std::uint32_t causes = 0;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t.events[i] != e && es.leq(t.events[i], e)) causes |= 1u << i;
  std::vector<std::uint32_t> out;
  for_each_down_set(t, down_closure(t, causes), [&](std::uint32_t m) { out.push_back(m); });
  std::sort(out.begin(), out.end());
  return out;
}

/// All one-event extensions of t within allowed, in canonical order.
inline std::vector<Trace> trace_extensions(const Trace& t, const EventStructure& es, TraceKind kind,
                                           const Bitset& allowed) {
  std::vector<Trace> out;
  const auto x = t.carrier(es.size());
  for (auto e = allowed.find_first(); e != Bitset::npos; e = allowed.find_next(e)) {
    if (!es.can_extend(x, e)) continue;
    for (auto preds : extension_predecessors(t, es, e, kind)) out.push_back(extend_trace(t, e, preds));
  }
  return out;
}

inline std::string trace_label(const Trace& t, const EventStructure& es) {
  std::string out = "{";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += ",";
    out += es.name(t.events[i]);
  }
  std::string order;
  for (std::size_t j = 0; j < t.size(); ++j)
    for (std::size_t i = 0; i < t.size(); ++i)
      if (t.precedes(i, j)) {
        if (!order.empty()) order += ",";
        order += es.name(t.events[i]) + "<" + es.name(t.events[j]);
      }
  if (!order.empty()) out += " | " + order;
  return out + "}";
}

/// {carrier: [...], order: [[e, e'], ...]} with the full strict order.
inline nlohmann::json trace_to_json(const Trace& t, const EventStructure& es) {
  nlohmann::json carrier = nlohmann::json::array();
  nlohmann::json order = nlohmann::json::array();
  for (auto e : t.events) carrier.push_back(es.name(e));
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = 0; j < t.size(); ++j)
      if (t.precedes(i, j)) order.push_back({es.name(t.events[i]), es.name(t.events[j])});
  return {{"carrier", carrier}, {"order", order}};
}

inline Trace trace_from_json(const nlohmann::json& j, const EventStructure& es) {
  std::vector<std::pair<std::string, std::string>> order;
  for (const auto& p : j.at("order")) order.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
  return validate_trace(es, j.at("carrier").get<std::vector<std::string>>(), order);
}

/// Traces of one kind with at most `bound` events drawn from `allowed`,
/// ordered as traces.
struct TraceDomain {
  TraceKind kind = TraceKind::pomset;
  std::vector<Trace> traces;
  std::unordered_map<Trace, ElementId, TraceHash> index;
  std::shared_ptr<const FinitePointedPoset> poset;
  /// Pairs (t, u) where u adds one event to t, as generated.
  std::vector<std::pair<ElementId, ElementId>> extensions;

  std::optional<ElementId> find(const Trace& t) const {
    auto it = index.find(t);
    if (it == index.end()) return std::nullopt;
    return it->second;
  }
  ElementId id_of(const Trace& t) const {
    auto it = index.find(t);
    if (it == index.end()) throw std::out_of_range("trace is not in this domain");
    return it->second;
  }
};

inline TraceDomain build_trace_domain(const EventStructure& es, TraceKind kind, std::size_t bound,
                                      const Bitset* allowed = nullptr, std::size_t max_elements = 5000) {
  if (bound > max_trace_events) throw BoundExceeded("trace event bound", max_trace_events);
  const Bitset all = allowed ? *allowed : ~es.empty_set();
  TraceDomain dom;
  dom.kind = kind;
  std::vector<Trace> layer{Trace{}};
  dom.traces.push_back(Trace{});
  std::vector<std::pair<Trace, Trace>> steps;
  for (std::size_t k = 0; k < bound && !layer.empty(); ++k) {
    std::unordered_set<Trace, TraceHash> next;
    for (const auto& t : layer)
      for (auto& u : trace_extensions(t, es, kind, all)) {
        steps.emplace_back(t, u);
        next.insert(std::move(u));
      }
    layer.assign(next.begin(), next.end());
    std::sort(layer.begin(), layer.end());
    dom.traces.insert(dom.traces.end(), layer.begin(), layer.end());
    if (dom.traces.size() > max_elements) throw BoundExceeded("trace domain size", max_elements);
  }
  std::vector<std::string> labels;
  for (ElementId i = 0; i < dom.traces.size(); ++i) {
    dom.index.emplace(dom.traces[i], i);
    labels.push_back(trace_label(dom.traces[i], es));
  }
  for (const auto& [t, u] : steps) dom.extensions.emplace_back(dom.index.at(t), dom.index.at(u));
  std::sort(dom.extensions.begin(), dom.extensions.end());
  dom.poset = std::make_shared<const FinitePointedPoset>(FinitePointedPoset::from_order(
      std::move(labels), [&](ElementId a, ElementId b) { return trace_leq(dom.traces[a], dom.traces[b]); }));
  return dom;
}

/// Positions of a linear trace listed in its order.
inline std::vector<std::size_t> linear_order(const Trace& t) {
  if (!t.is_linear()) throw NotLinear();
  std::vector<std::size_t> order(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) order[static_cast<std::size_t>(std::popcount(t.below[i]))] = i;
  return order;
}

/// The covering sequence of configurations that adds the events of a linear
/// trace one at a time.
inline CoveringSequence linear_to_covseq(const Trace& t, const ConfigurationDomain& dom, std::size_t universe) {
  Bitset x(universe);
  CoveringSequence seq{{dom.id_of(x)}};
  for (auto p : linear_order(t)) {
    x.set(t.events[p]);
    seq.steps.push_back(dom.id_of(x));
  }
  return seq;
}

/// Inverse of linear_to_covseq: e_n is the event added at step n.
inline Trace covseq_to_linear(const CoveringSequence& seq, const ConfigurationDomain& dom) {
  if (!is_covering_sequence(*dom.poset, seq)) throw std::invalid_argument("covseq_to_linear: not a covering sequence");
  Trace t;
  for (std::size_t n = 0; n + 1 < seq.steps.size(); ++n) {
    const auto diff = dom.configs[seq.steps[n + 1]] - dom.configs[seq.steps[n]];
    if (diff.count() != 1) throw std::invalid_argument("covseq_to_linear: step adds more than one event");
    t = extend_trace(t, diff.find_first(), t.all_positions());
  }
  return t;
}

}  // namespace gkahn
