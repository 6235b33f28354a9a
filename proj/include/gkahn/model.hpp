#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gkahn/bitset.hpp"
#include "gkahn/event_structure.hpp"
#include "gkahn/poset.hpp"
#include "gkahn/pomset.hpp"
#include "gkahn/streams.hpp"
#include "gkahn/trace.hpp"
#include "gkahn/verdict.hpp"

namespace gkahn {

/// Enumeration limits. trace_events caps the carrier of every trace;
/// max_domain caps a materialized trace domain; max_search caps the traces
/// visited when a process is computed by search.
struct Bounds {
  std::size_t trace_events = 12;
  std::size_t max_domain = 5000;
  std::size_t max_search = 2'000'000;
};

/// A sort's value poset V_S: the product of its channel configuration
/// posets, in channel-name order.
struct ValueSpace {
  Sort sort;
  std::vector<std::size_t> channels;  // universe channel indices
  std::shared_ptr<const ProductPoset> poset;
};

/// Replacement for the restriction map, used to build mutated models.
using Restriction = std::function<Trace(const EventStructure&, const Trace&, const Bitset& keep)>;

/// Drops the trace order down to causality: a deliberately wrong
/// restriction for negative controls.
inline Trace causality_only_restriction(const EventStructure& es, const Trace& t, const Bitset& keep) {
  auto r = restrict_trace(t, keep);
  for (std::size_t j = 0; j < r.size(); ++j) {
    r.below[j] = 0;
    for (std::size_t i = 0; i < r.size(); ++i)
      if (i != j && es.leq(r.events[i], r.events[j])) r.below[j] |= 1u << i;
  }
  return r;
}

/// The model (T, V, mu) over a fixed set of channels. Traces of every sort
/// live in one universe event structure: a trace over S is a trace whose
/// carrier lies in the S-tagged events.
class ModelInstance {
 public:
  ModelInstance(std::vector<Channel> channels, TraceKind kind, Bounds bounds = {})
      : channels_(std::move(channels)), kind_(kind), bounds_(bounds) {
    std::sort(channels_.begin(), channels_.end(), [](const Channel& a, const Channel& b) { return a.name < b.name; });
    std::vector<std::pair<std::string, EventStructure>> parts;
    for (const auto& c : channels_) parts.emplace_back(c.name, c.es);
    family_ = ChannelFamily(std::move(parts));
    universe_ = std::make_shared<const ProductStructure>(product_es(family_, family_.all()));
  }

  TraceKind kind() const { return kind_; }
  const Bounds& bounds() const { return bounds_; }
  const std::vector<Channel>& channels() const { return channels_; }
  const ChannelFamily& family() const { return family_; }
  const ProductStructure& universe() const { return *universe_; }
  const EventStructure& es() const { return universe_->es(); }
  Sort all_channels() const { return family_.all(); }

  const Channel& channel(const std::string& name) const {
    auto k = universe_->channel_index(name);
    if (!k) throw UnknownChannel(name);
    return channels_[*k];
  }

  Bitset mask(const Sort& sort) const { return universe_->sort_events(sort); }

  ValueSpace value_space(const Sort& sort) const {
    ValueSpace space;
    space.sort = sort;
    std::vector<std::shared_ptr<const FinitePointedPoset>> parts;
    for (const auto& name : sort) {
      auto k = universe_->channel_index(name);
      if (!k) throw UnknownChannel(name);
      space.channels.push_back(*k);
      parts.push_back(channels_[*k].values.poset);
    }
    space.poset = std::make_shared<const ProductPoset>(std::move(parts));
    return space;
  }

  /// Value of a set of universe events in V_S (events off S are ignored).
  template <class Events>
  ElementId value_of(const Events& events, const ValueSpace& space) const {
    std::vector<ElementId> coords(space.channels.size());
    std::vector<Bitset> local;
    local.reserve(space.channels.size());
    for (auto ch : space.channels) local.emplace_back(universe_->count(ch));
    for (EventId e : events) {
      const auto ch = universe_->channel_of(e);
      for (std::size_t k = 0; k < space.channels.size(); ++k)
        if (space.channels[k] == ch) local[k].set(universe_->local_of(e));
    }
    for (std::size_t k = 0; k < space.channels.size(); ++k)
      coords[k] = channels_[space.channels[k]].values.id_of(local[k]);
    return space.poset->compose(coords);
  }

  ElementId value_of_config(const Bitset& x, const ValueSpace& space) const { return value_of(members(x), space); }

  /// The universe configuration of a value.
  Bitset config_of(ElementId v, const ValueSpace& space) const {
    Bitset x = es().empty_set();
    for (std::size_t k = 0; k < space.channels.size(); ++k) {
      const auto ch = space.channels[k];
      x |= universe_->embed(ch, channels_[ch].values.configs[space.poset->coordinate(v, k)]);
    }
    return x;
  }

  Trace restrict(const Trace& t, const Sort& target) const { return restrict_to_mask(t, mask(target)); }

  Trace restrict_to_mask(const Trace& t, const Bitset& keep) const {
    return restriction_ ? restriction_(es(), t, keep) : restrict_trace(t, keep);
  }

  Bitset eval(const Trace& t) const { return eval_trace(t, es().size()); }

  /// noo^S_T = mu_T . rho^S_T. Both composites are computed and compared.
  Bitset observe(const Trace& t, const Sort& target) const {
    const auto keep = mask(target);
    auto via_restriction = eval(restrict_to_mask(t, keep));
    auto via_projection = eval(t) & keep;
    if (via_restriction != via_projection)
      throw std::logic_error("observation composites disagree on " + trace_label(t, es()));
    return via_restriction;
  }

  TraceDomain trace_domain(const Sort& sort) const {
    const auto keep = mask(sort);
    return build_trace_domain(es(), kind_, bounds_.trace_events, &keep, bounds_.max_domain);
  }

  bool is_stream_sort(const Sort& sort) const {
    for (const auto& name : sort)
      if (!channel(name).stream) return false;
    return true;
  }

  StreamSignature signature(const Sort& sort) const {
    StreamSignature sig;
    for (const auto& name : sort) {
      const auto& c = channel(name);
      if (!c.stream) throw TypeMismatch("channel '" + name + "' does not carry a stream");
      sig.emplace(name, *c.stream);
    }
    return sig;
  }

  /// Channel-by-channel rendering of a value.
  nlohmann::json value_json(ElementId v, const ValueSpace& space) const {
    nlohmann::json out = nlohmann::json::object();
    std::size_t k = 0;
    for (const auto& name : space.sort) {
      out[name] = channels_[space.channels[k]].value_json(space.poset->coordinate(v, k));
      ++k;
    }
    return out;
  }

  std::string value_label(ElementId v, const ValueSpace& space) const {
    std::string out;
    std::size_t k = 0;
    for (const auto& name : space.sort) {
      if (k) out += " ";
      out += name + "=" + channels_[space.channels[k]].value_label(space.poset->coordinate(v, k));
      ++k;
    }
    return out.empty() ? "()" : out;
  }

  ModelInstance with_restriction(Restriction r) const {
    ModelInstance copy = *this;
    copy.restriction_ = std::move(r);
    return copy;
  }

  ModelInstance with_kind(TraceKind kind) const {
    ModelInstance copy = *this;
    copy.kind_ = kind;
    return copy;
  }

  ModelInstance with_bounds(Bounds bounds) const {
    ModelInstance copy = *this;
    copy.bounds_ = bounds;
    return copy;
  }

 private:
  std::vector<Channel> channels_;
  TraceKind kind_;
  Bounds bounds_;
  ChannelFamily family_;
  std::shared_ptr<const ProductStructure> universe_;
  Restriction restriction_;
};

/// Every subset of a sort, smallest first.
inline std::vector<Sort> subsorts(const Sort& sort) {
  std::vector<std::string> names(sort.begin(), sort.end());
  if (names.size() > 16) throw BoundExceeded("sort size", 16);
  std::vector<Sort> out;
  for (std::uint32_t m = 0; m < (1u << names.size()); ++m) {
    Sort s;
    for (std::size_t i = 0; i < names.size(); ++i)
      if ((m >> i) & 1u) s.insert(names[i]);
    out.push_back(std::move(s));
  }
  std::stable_sort(out.begin(), out.end(), [](const Sort& a, const Sort& b) { return a.size() < b.size(); });
  return out;
}

inline nlohmann::json sort_json(const Sort& s) { return nlohmann::json(std::vector<std::string>(s.begin(), s.end())); }

inline bool is_subsort(const Sort& small, const Sort& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

/// Exhaustive check of the model laws on the listed sorts: restriction lands
/// in the target domain, identity, functoriality, strictness, monotonicity,
/// naturality of evaluation, the cover law, linearity (linear kind) and
/// V_S as a product.
inline Verdict check_model_axioms(const ModelInstance& model, const std::vector<Sort>& sorts) {
  const auto& es = model.es();
  auto fail = [&](const std::string& law, const Sort& s, const Sort& t, const nlohmann::json& witness,
                  const std::string& message) {
    return Verdict::fail("axioms", law + ": " + message,
                         {{"law", law}, {"sort", sort_json(s)}, {"subsort", sort_json(t)}, {"witness", witness}});
  };

  std::map<Sort, TraceDomain> domains;
  for (const auto& s : sorts) domains.emplace(s, model.trace_domain(s));

  std::size_t traces = 0;
  std::size_t pairs = 0;
  for (const auto& [s, dom] : domains) {
    traces += dom.traces.size();
    const auto space_s = model.value_space(s);
    const Trace bottom;

    if (auto v = check_product_iso(model.family(), s); !v.passed())
      return fail("value-product", s, s, v.counterexample, v.message);

    if (!model.eval(bottom).none()) return fail("strictness", s, s, trace_to_json(bottom, es), "mu(bottom) is not empty");

    for (const auto& t : dom.traces) {
      if (model.kind() == TraceKind::linear && !t.is_linear())
        return fail("linearity", s, s, trace_to_json(t, es), "a trace of the linear model is not total");
      if (model.restrict(t, s) != t)
        return fail("functoriality", s, s, trace_to_json(t, es), "rho^S_S is not the identity");
    }

    // Cover law: poset covers coincide with one-event extensions by a
    // maximal event.
    const auto poset_covers = covers(*dom.poset);
    for (const auto& [a, b] : poset_covers) {
      const auto& t = dom.traces[a];
      const auto& u = dom.traces[b];
      const auto diff = model.eval(u) - model.eval(t);
      bool ok = diff.count() == 1;
      if (ok) {
        const auto p = *u.position(diff.find_first());
        ok = (u.maximal_positions() >> p) & 1u;
      }
      if (!ok) return fail("cover-law", s, s, {{"t", trace_to_json(t, es)}, {"u", trace_to_json(u, es)}},
                           "a cover does not add exactly one maximal event");
    }
    if (poset_covers != dom.extensions) {
      std::vector<std::pair<ElementId, ElementId>> missing;
      std::set_symmetric_difference(poset_covers.begin(), poset_covers.end(), dom.extensions.begin(),
                                    dom.extensions.end(), std::back_inserter(missing));
      const auto& [a, b] = missing.front();
      return fail("cover-law", s, s,
                  {{"t", trace_to_json(dom.traces[a], es)}, {"u", trace_to_json(dom.traces[b], es)}},
                  "one-event extensions and covers differ");
    }

    for (const auto& [t_sort, t_dom] : domains) {
      if (!is_subsort(t_sort, s)) continue;
      ++pairs;
      const auto space_t = model.value_space(t_sort);
      if (model.restrict(bottom, t_sort) != bottom)
        return fail("strictness", s, t_sort, trace_to_json(bottom, es), "rho(bottom) is not bottom");
      std::vector<ElementId> image(dom.traces.size());
      for (std::size_t i = 0; i < dom.traces.size(); ++i) {
        const auto& t = dom.traces[i];
        const auto r = model.restrict(t, t_sort);
        auto id = t_dom.find(r);
        if (!id) return fail("domain", s, t_sort, trace_to_json(t, es), "restriction leaves the target trace domain");
        image[i] = *id;
        // mu_T . rho = pi . mu_S, compared in the value posets.
        const auto lhs = model.value_of(r.events, space_t);
        const auto full = model.value_of(t.events, space_s);
        std::vector<ElementId> projected;
        std::size_t k = 0;
        for (const auto& name : s) {
          if (t_sort.count(name)) projected.push_back(space_s.poset->coordinate(full, k));
          ++k;
        }
        if (lhs != space_t.poset->compose(projected))
          return fail("naturality", s, t_sort, trace_to_json(t, es), "mu_T(rho(t)) differs from pi(mu_S(t))");
        for (const auto& [u_sort, u_dom] : domains) {
          if (!is_subsort(u_sort, t_sort)) continue;
          if (model.restrict(r, u_sort) != model.restrict(t, u_sort))
            return fail("functoriality", s, t_sort, {{"trace", trace_to_json(t, es)}, {"inner", sort_json(u_sort)}},
                        "restricting in two steps differs from restricting at once");
        }
      }
      for (const auto& [a, b] : poset_covers) {
        if (!t_dom.poset->leq(image[a], image[b]))
          return fail("monotonicity", s, t_sort,
                      {{"t", trace_to_json(dom.traces[a], es)}, {"u", trace_to_json(dom.traces[b], es)}},
                      "restriction is not monotone");
        if (!model.eval(dom.traces[a]).is_subset_of(model.eval(dom.traces[b])))
          return fail("monotonicity", s, s,
                      {{"t", trace_to_json(dom.traces[a], es)}, {"u", trace_to_json(dom.traces[b], es)}},
                      "evaluation is not monotone");
      }
    }
  }
  auto v = Verdict::pass("axioms", "model laws hold on " + std::to_string(domains.size()) + " sorts");
  v.data = {{"sorts", domains.size()}, {"sort_pairs", pairs}, {"traces", traces}, {"kind", to_string(model.kind())}};
  return v;
}

/// The restriction rho^S_T between trace domains as a map of posets.
inline MonotoneMap<FinitePointedPoset> restriction_map(const ModelInstance& model, const TraceDomain& from,
                                                       const TraceDomain& to, const Sort& target) {
  std::vector<ElementId> table(from.traces.size());
  for (std::size_t i = 0; i < from.traces.size(); ++i) table[i] = to.id_of(model.restrict(from.traces[i], target));
  return MonotoneMap<FinitePointedPoset>(from.poset, to.poset, std::move(table));
}

/// Every restriction between the listed sorts is an incremental morphism.
inline Verdict check_restrictions_incremental(const ModelInstance& model, const std::vector<Sort>& sorts) {
  std::map<Sort, TraceDomain> domains;
  for (const auto& s : sorts) domains.emplace(s, model.trace_domain(s));
  std::size_t maps = 0;
  for (const auto& [s, dom] : domains)
    for (const auto& [t, t_dom] : domains) {
      if (!is_subsort(t, s)) continue;
      auto v = check_incremental_morphism(restriction_map(model, dom, t_dom, t));
      ++maps;
      if (!v.passed()) {
        v.name = "incremental";
        v.counterexample["sort"] = sort_json(s);
        v.counterexample["subsort"] = sort_json(t);
        return v;
      }
    }
  auto v = Verdict::pass("incremental", std::to_string(maps) + " restriction maps weakly preserve and lift covers");
  v.data = {{"maps", maps}, {"kind", to_string(model.kind())}};
  return v;
}

/// L(E) and C(|E|) are isomorphic: linear traces correspond to covering
/// sequences of configurations, ordered by prefix.
inline Verdict check_covseq_iso(const EventStructure& es, std::size_t bound, std::size_t max_elements = 5000) {
  const auto configs = config_poset(es);
  const auto linear = build_trace_domain(es, TraceKind::linear, bound, nullptr, max_elements);
  std::vector<CoveringSequence> sequences;
  for (ElementId d = 0; d < configs.configs.size(); ++d) {
    if (configs.configs[d].count() > bound) continue;
    for (auto& seq : covering_sequences_for(*configs.poset, d, max_elements)) sequences.push_back(std::move(seq));
  }
  std::sort(sequences.begin(), sequences.end());
  std::vector<CoveringSequence> image;
  for (const auto& t : linear.traces) {
    auto seq = linear_to_covseq(t, configs, es.size());
    if (covseq_to_linear(seq, configs) != t)
      return Verdict::fail("covseq-iso", "round trip through covering sequences changes a trace",
                           {{"trace", trace_to_json(t, es)}});
    image.push_back(std::move(seq));
  }
  for (const auto& seq : sequences)
    if (linear_to_covseq(covseq_to_linear(seq, configs), configs, es.size()) != seq)
      return Verdict::fail("covseq-iso", "round trip through linear traces changes a covering sequence",
                           {{"sequence", seq.steps}});
  auto sorted = image;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    return Verdict::fail("covseq-iso", "two linear traces share a covering sequence", {{"traces", image.size()}});
  if (sorted != sequences)
    return Verdict::fail("covseq-iso", "linear traces and covering sequences differ in number",
                         {{"traces", image.size()}, {"sequences", sequences.size()}});
  auto is_prefix_of = [](const CoveringSequence& a, const CoveringSequence& b) {
    return a.steps.size() <= b.steps.size() && std::equal(a.steps.begin(), a.steps.end(), b.steps.begin());
  };
  for (std::size_t a = 0; a < image.size(); ++a)
    for (std::size_t b = 0; b < image.size(); ++b)
      if (linear.poset->leq(a, b) != is_prefix_of(image[a], image[b]))
        return Verdict::fail("covseq-iso", "the correspondence does not preserve and reflect the order",
                             {{"t", trace_to_json(linear.traces[a], es)}, {"u", trace_to_json(linear.traces[b], es)}});
  auto v = Verdict::pass("covseq-iso", std::to_string(image.size()) + " linear traces match " +
                                           std::to_string(sequences.size()) + " covering sequences");
  v.data = {{"traces", image.size()}, {"sequences", sequences.size()}};
  return v;
}

}  // namespace gkahn
