#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gkahn/event_structure.hpp"
#include "gkahn/streams.hpp"
#include "gkahn/trace.hpp"
#include "gkahn/verdict.hpp"

namespace gkahn {

class PomsetNotChannelLinear : public std::runtime_error {
 public:
  explicit PomsetNotChannelLinear(const std::string& channel)
      : std::runtime_error("points on channel '" + channel + "' are not linearly ordered") {}
};

/// Labelled partial order with labels (channel, datum), kept in canonical
/// form: points sorted by channel, then by rank on their channel.
struct LabelledPomset {
  std::vector<std::pair<std::string, char>> labels;
  std::vector<std::uint32_t> below;

  std::size_t size() const { return labels.size(); }
  bool precedes(std::size_t i, std::size_t j) const { return (below[j] >> i) & 1u; }

  friend bool operator==(const LabelledPomset&, const LabelledPomset&) = default;
  friend auto operator<=>(const LabelledPomset&, const LabelledPomset&) = default;
};

/// Channel signature of a sort: the stream domain of every channel.
using StreamSignature = std::map<std::string, StreamDomain>;

/// Builds the canonical form of an arbitrary labelled partial order given
/// by strict predecessor masks (already transitively closed).
inline LabelledPomset canonical_pomset(const std::vector<std::pair<std::string, char>>& labels,
                                       const std::vector<std::uint32_t>& below) {
  const auto n = labels.size();
  std::vector<std::size_t> rank(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i == j || labels[i].first != labels[j].first) continue;
      const bool ij = (below[j] >> i) & 1u;
      const bool ji = (below[i] >> j) & 1u;
      if (!ij && !ji) throw PomsetNotChannelLinear(labels[j].first);
      if (ij) ++rank[j];
    }
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (labels[a].first != labels[b].first) return labels[a].first < labels[b].first;
    return rank[a] < rank[b];
  });
  std::vector<std::size_t> renumber(n);
  for (std::size_t k = 0; k < n; ++k) renumber[order[k]] = k;
  LabelledPomset p;
  p.below.assign(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    p.labels.push_back(labels[order[k]]);
    for (std::size_t i = 0; i < n; ++i)
      if ((below[order[k]] >> i) & 1u) p.below[k] |= 1u << renumber[i];
  }
  return p;
}

/// Validates a hand-built pomset. Order pairs are (earlier, later) point
/// indices and are closed transitively.
inline LabelledPomset validate_pomset(const std::vector<std::pair<std::string, char>>& labels,
                                      const std::vector<std::pair<std::size_t, std::size_t>>& order) {
  const auto n = labels.size();
  if (n > max_trace_events) throw BoundExceeded("pomset size", max_trace_events);
  std::vector<std::uint32_t> below(n, 0);
  for (const auto& [a, b] : order) {
    if (a >= n || b >= n) throw std::invalid_argument("pomset order mentions an unknown point");
    if (a != b) below[b] |= 1u << a;
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t j = 0; j < n; ++j) {
      auto closed = below[j];
      for (std::size_t i = 0; i < n; ++i)
        if ((below[j] >> i) & 1u) closed |= below[i];
      if (closed != below[j]) {
        below[j] = closed;
        changed = true;
      }
    }
  }
  for (std::size_t j = 0; j < n; ++j)
    if ((below[j] >> j) & 1u) throw std::invalid_argument("pomset order has a cycle");
  return canonical_pomset(labels, below);
}

namespace detail {

inline std::pair<std::string, std::string> split_event_name(const ProductStructure& product, EventId e) {
  const auto& channel = product.channels()[product.channel_of(e)];
  return {channel, product.es().name(e).substr(channel.size() + 1)};
}

}  // namespace detail

/// phi: forget which stream event each point is, keep (channel, datum).
inline LabelledPomset pomset_of_trace(const Trace& t, const ProductStructure& product) {
  std::vector<std::pair<std::string, char>> labels;
  for (auto e : t.events) {
    auto [channel, word] = detail::split_event_name(product, e);
    if (word.empty()) throw TypeMismatch("event '" + product.es().name(e) + "' is not a stream event");
    labels.emplace_back(channel, word.back());
  }
  return canonical_pomset(labels, t.below);
}

/// psi: each point becomes the stream event named by the data of its
/// channel predecessors followed by its own datum.
inline Trace trace_of_pomset(const LabelledPomset& p, const ProductStructure& product,
                             const StreamSignature& signature) {
  Bitset carrier = product.es().empty_set();
  std::vector<EventId> event_of(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    const auto& [channel, datum] = p.labels[j];
    auto sig = signature.find(channel);
    if (sig == signature.end() || !product.channel_index(channel)) throw UnknownChannel(channel);
    std::string word;
    for (std::size_t i = 0; i < p.size(); ++i)
      if (p.labels[i].first == channel && p.precedes(i, j)) word += p.labels[i].second;
    // Canonical form lists channel points by rank, so word is in order.
    word += datum;
    if (!sig->second.has_symbol(datum))
      throw AlphabetMismatch(std::string("datum '") + datum + "' is not in the alphabet of channel '" + channel + "'");
    if (word.size() > sig->second.depth())
      throw DepthExceeded("channel '" + channel + "' has more points than its depth");
    auto e = product.es().find(channel + ":" + word);
    if (!e) throw DepthExceeded("no event for '" + channel + ":" + word + "'");
    event_of[j] = *e;
    carrier.set(*e);
  }
  std::vector<std::pair<EventId, EventId>> order;
  for (std::size_t j = 0; j < p.size(); ++j)
    for (std::size_t i = 0; i < p.size(); ++i)
      if (p.precedes(i, j)) order.emplace_back(event_of[i], event_of[j]);
  return validate_trace(product.es(), carrier, order);
}

/// p is a prefix of q: the k-th point of each channel of p matches the
/// k-th point of that channel in q, the image is down-closed and the order
/// is induced. Channel linearity makes this embedding the only candidate.
inline bool pomset_leq(const LabelledPomset& p, const LabelledPomset& q) {
  if (p.size() > q.size()) return false;
  std::vector<std::size_t> at(p.size());
  std::uint32_t image = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::size_t rank = 0;
    for (std::size_t k = 0; k < i; ++k)
      if (p.labels[k].first == p.labels[i].first) ++rank;
    std::size_t seen = 0;
    bool found = false;
    for (std::size_t k = 0; k < q.size(); ++k)
      if (q.labels[k].first == p.labels[i].first && seen++ == rank) {
        at[i] = k;
        found = true;
        break;
      }
    if (!found || q.labels[at[i]] != p.labels[i]) return false;
    image |= 1u << at[i];
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    if ((q.below[at[i]] & ~image) != 0) return false;
    std::uint32_t mapped = 0;
    for (std::size_t k = 0; k < p.size(); ++k)
      if (p.precedes(k, i)) mapped |= 1u << at[k];
    if (mapped != q.below[at[i]]) return false;
  }
  return true;
}

/// All pomsets over the signature with at most max_points points, grown one
/// point at a time on top of a down-set containing the last point of its
/// channel. Sorted canonically.
inline std::vector<LabelledPomset> enumerate_pomsets(const StreamSignature& signature, std::size_t max_points,
                                                     bool linear_only = false) {
  std::set<LabelledPomset> seen{LabelledPomset{}};
  std::vector<LabelledPomset> layer{LabelledPomset{}};
  for (std::size_t k = 0; k < max_points && !layer.empty(); ++k) {
    std::set<LabelledPomset> next;
    for (const auto& p : layer) {
      Trace shape{std::vector<EventId>(p.size()), p.below};
      for (std::size_t i = 0; i < p.size(); ++i) shape.events[i] = i;
      for (const auto& [channel, dom] : signature) {
        std::size_t count = 0;
        std::uint32_t last = 0;
        for (std::size_t i = 0; i < p.size(); ++i)
          if (p.labels[i].first == channel) {
            ++count;
            last = 1u << i;
          }
        if (count >= dom.depth()) continue;
        std::vector<std::uint32_t> preds;
        if (linear_only) {
          preds.push_back(shape.all_positions());
        } else {
          for_each_down_set(shape, down_closure(shape, last), [&](std::uint32_t m) { preds.push_back(m); });
        }
        for (auto m : preds)
          for (char d : dom.alphabet()) {
            auto labels = p.labels;
            auto below = p.below;
            labels.emplace_back(channel, d);
            below.push_back(m);
            next.insert(canonical_pomset(labels, below));
          }
      }
    }
    layer.assign(next.begin(), next.end());
    seen.insert(next.begin(), next.end());
  }
  std::vector<LabelledPomset> out(seen.begin(), seen.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const LabelledPomset& a, const LabelledPomset& b) { return a.size() < b.size(); });
  return out;
}

inline nlohmann::json pomset_to_json(const LabelledPomset& p) {
  nlohmann::json points = nlohmann::json::array();
  nlohmann::json order = nlohmann::json::array();
  for (const auto& [channel, datum] : p.labels) points.push_back({channel, std::string(1, datum)});
  for (std::size_t j = 0; j < p.size(); ++j)
    for (std::size_t i = 0; i < p.size(); ++i)
      if (p.precedes(i, j)) order.push_back({i, j});
  return {{"points", points}, {"order", order}};
}

/// phi and psi are mutually inverse monotone bijections between the
/// traces of the domain and the pomsets over the signature.
inline Verdict check_pomset_iso(const TraceDomain& domain, const ProductStructure& product,
                                const StreamSignature& signature, std::size_t max_points) {
  const auto& es = product.es();
  std::vector<LabelledPomset> image;
  image.reserve(domain.traces.size());
  for (const auto& t : domain.traces) {
    auto p = pomset_of_trace(t, product);
    if (trace_of_pomset(p, product, signature) != t)
      return Verdict::fail("pomset-iso", "psi(phi(t)) differs from t", {{"trace", trace_to_json(t, es)}});
    image.push_back(std::move(p));
  }
  const auto pomsets = enumerate_pomsets(signature, max_points, domain.kind == TraceKind::linear);
  std::set<LabelledPomset> distinct(image.begin(), image.end());
  if (distinct.size() != image.size())
    return Verdict::fail("pomset-iso", "phi is not injective", {{"traces", domain.traces.size()}});
  for (const auto& p : pomsets) {
    if (!distinct.count(p))
      return Verdict::fail("pomset-iso", "a pomset has no trace", {{"pomset", pomset_to_json(p)}});
    auto t = trace_of_pomset(p, product, signature);
    if (pomset_of_trace(t, product) != p)
      return Verdict::fail("pomset-iso", "phi(psi(p)) differs from p", {{"pomset", pomset_to_json(p)}});
  }
  if (pomsets.size() != image.size())
    return Verdict::fail("pomset-iso", "phi is not onto the pomsets",
                         {{"traces", image.size()}, {"pomsets", pomsets.size()}});
  for (std::size_t a = 0; a < image.size(); ++a)
    for (std::size_t b = 0; b < image.size(); ++b)
      if (domain.poset->leq(a, b) != pomset_leq(image[a], image[b]))
        return Verdict::fail("pomset-iso", "phi does not preserve and reflect the order",
                             {{"t", trace_to_json(domain.traces[a], es)}, {"u", trace_to_json(domain.traces[b], es)}});
  auto v = Verdict::pass("pomset-iso", std::to_string(image.size()) + " traces match " +
                                           std::to_string(pomsets.size()) + " pomsets");
  v.data = {{"traces", image.size()}, {"pomsets", pomsets.size()}};
  return v;
}

}  // namespace gkahn
