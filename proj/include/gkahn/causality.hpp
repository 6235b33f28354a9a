#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gkahn/bitset.hpp"
#include "gkahn/fixpoint.hpp"
#include "gkahn/model.hpp"
#include "gkahn/network.hpp"
#include "gkahn/poset.hpp"
#include "gkahn/trace.hpp"
#include "gkahn/verdict.hpp"

namespace gkahn {

/// <_t on the configurations below mu(t): b <_t c iff on every covering
/// sequence of t, b is reached strictly before c.
struct TraceCausality {
  Trace trace;
  std::vector<Bitset> values;  // configurations contained in x_t, canonical order
  std::vector<std::pair<std::size_t, std::size_t>> relation;  // indices into values
  std::size_t sequences = 0;

  std::optional<std::size_t> index_of(const Bitset& b) const {
    auto it = std::lower_bound(values.begin(), values.end(), b, canonical_less);
    if (it == values.end() || *it != b) return std::nullopt;
    return static_cast<std::size_t>(it - values.begin());
  }

  bool precedes(const Bitset& b, const Bitset& c) const {
    auto i = index_of(b);
    auto j = index_of(c);
    if (!i || !j) return false;
    return std::binary_search(relation.begin(), relation.end(), std::make_pair(*i, *j));
  }
};

/// The sub-traces of t (t restricted to its down-sets), ordered as traces;
/// these are exactly the elements of the trace domain below t.
inline std::pair<FinitePointedPoset, std::vector<std::uint32_t>> subtrace_poset(const Trace& t) {
  auto sets = down_sets(t);
  std::vector<std::string> labels;
  for (auto m : sets) labels.push_back(std::to_string(m));
  auto poset = FinitePointedPoset::from_order(
      std::move(labels), [&](ElementId a, ElementId b) { return (sets[a] & ~sets[b]) == 0; });
  return {std::move(poset), std::move(sets)};
}

inline TraceCausality trace_causality(const Trace& t, const EventStructure& es, std::size_t limit = 100'000) {
  if (t.size() > 20) throw BoundExceeded("trace size for causality", 20);
  TraceCausality out;
  out.trace = t;
  for (std::uint32_t m = 0; m < (1u << t.size()); ++m) {
    Bitset b = es.empty_set();
    for (std::size_t i = 0; i < t.size(); ++i)
      if ((m >> i) & 1u) b.set(t.events[i]);
    if (es.is_configuration(b)) out.values.push_back(std::move(b));
  }
  std::sort(out.values.begin(), out.values.end(), canonical_less);

  const auto [poset, sets] = subtrace_poset(t);
  ElementId top = 0;
  for (ElementId i = 0; i < sets.size(); ++i)
    if (sets[i] == t.all_positions()) top = i;
  const auto sequences = covering_sequences_for(poset, top, limit);
  out.sequences = sequences.size();

  const auto n = out.values.size();
  std::vector<char> always(n * n, 1);
  for (const auto& seq : sequences) {
    std::vector<Bitset> carriers;
    for (auto step : seq.steps) carriers.push_back(sub_trace(t, sets[step]).carrier(es.size()));
    std::vector<std::size_t> index(n);
    for (std::size_t v = 0; v < n; ++v) {
      std::size_t k = 0;
      while (!out.values[v].is_subset_of(carriers[k])) ++k;
      index[v] = k;
    }
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        if (index[a] >= index[b]) always[a * n + b] = 0;
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (always[a * n + b]) out.relation.emplace_back(a, b);
  return out;
}

/// Realizes a chain in V_S by a trace: refine it into a covering sequence
/// and read that off as a linear trace.
inline Trace causal_witness(const CompactChain& chain, const ModelInstance& model, const ValueSpace& space) {
  return linear_trace_of(model, space, refine_chain(chain, *space.poset));
}

namespace detail {

/// Elements of V_S below d, ascending.
inline std::vector<ElementId> elements_below(const ValueSpace& space, ElementId d) {
  const auto& vp = *space.poset;
  std::vector<std::vector<ElementId>> per;
  for (std::size_t k = 0; k < vp.arity(); ++k) per.push_back(members(vp.component(k).down(vp.coordinate(d, k))));
  std::size_t total = 1;
  for (const auto& p : per) total *= p.size();
  std::vector<ElementId> out;
  out.reserve(total);
  std::vector<ElementId> coords(per.size());
  for (std::size_t i = 0; i < total; ++i) {
    auto rest = i;
    for (std::size_t k = per.size(); k-- > 0;) {
      coords[k] = per[k][rest % per[k].size()];
      rest /= per[k].size();
    }
    out.push_back(vp.compose(coords));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Checks one chain: the witness evaluates to the last link, is a trace of
/// the model, and its causality contains the chain's.
inline std::optional<nlohmann::json> verify_witness(const CompactChain& chain, const ModelInstance& model,
                                                    const ValueSpace& space) {
  const auto& es = model.es();
  const auto d = chain.links.back();
  const auto w = causal_witness(chain, model, space);
  nlohmann::json links = nlohmann::json::array();
  for (auto l : chain.links) links.push_back(model.value_json(l, space));
  if (model.eval(w) != model.config_of(d, space))
    return nlohmann::json{{"chain", links}, {"witness", trace_to_json(w, es)}, {"problem", "value"}};
  try {
    std::vector<std::pair<EventId, EventId>> order;
    for (std::size_t j = 0; j < w.size(); ++j)
      for (std::size_t i = 0; i < w.size(); ++i)
        if (w.precedes(i, j)) order.emplace_back(w.events[i], w.events[j]);
    if (validate_trace(es, model.eval(w), order) != w) throw std::logic_error("trace does not round-trip");
  } catch (const std::exception& e) {
    return nlohmann::json{{"chain", links}, {"witness", trace_to_json(w, es)}, {"problem", e.what()}};
  }
  const auto chain_order = chain_causality(chain, *space.poset, d);
  const auto tc = trace_causality(w, es);
  for (const auto& [b, c] : chain_order.relation)
    if (!tc.precedes(model.config_of(b, space), model.config_of(c, space)))
      return nlohmann::json{{"chain", links},
                            {"witness", trace_to_json(w, es)},
                            {"problem", "causality"},
                            {"b", model.value_json(b, space)},
                            {"c", model.value_json(c, space)}};
  return std::nullopt;
}

}  // namespace detail

/// Every strictly ascending chain from bottom to any d of V_S is realized by
/// a causal witness. When there are more than sample_size chains, or V_S is
/// large, a seeded sample of random chains is checked instead.
inline Verdict check_causally_expressive(const ModelInstance& model, const Sort& sort, std::size_t sample_size,
                                         std::uint64_t seed) {
  const auto space = model.value_space(sort);
  const auto& vp = *space.poset;
  if (sort.empty()) {
    Verdict v = Verdict::pass("expressive", "empty sort");
    v.status = Status::vacuous;
    return v;
  }
  std::size_t checked = 0;
  bool exhaustive = false;

  if (vp.size() <= 2000) {
    // Count chains ending at each element by dynamic programming.
    std::vector<double> count(vp.size(), 0.0);
    double total = 0;
    for (ElementId d = 0; d < vp.size(); ++d) {
      const auto below = detail::elements_below(space, d);
      double c = d == vp.bottom() ? 1.0 : 0.0;
      for (auto b : below)
        if (b != d) c += count[b];
      count[d] = c;
      total += c;
    }
    if (total <= static_cast<double>(sample_size)) {
      exhaustive = true;
      for (ElementId d = 0; d < vp.size(); ++d) {
        const auto below = detail::elements_below(space, d);
        std::vector<ElementId> links{vp.bottom()};
        auto walk = [&](auto&& self) -> std::optional<nlohmann::json> {
          if (links.back() == d) {
            ++checked;
            return detail::verify_witness(CompactChain{links}, model, space);
          }
          for (auto c : below)
            if (c != links.back() && vp.leq(links.back(), c)) {
              links.push_back(c);
              if (auto bad = self(self)) return bad;
              links.pop_back();
            }
          return std::nullopt;
        };
        if (auto bad = walk(walk)) return Verdict::fail("expressive", "a chain has no causal witness", *bad);
      }
    }
  }
  if (!exhaustive) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < sample_size; ++i) {
      const ElementId d = rng() % vp.size();
      const auto below = detail::elements_below(space, d);
      std::vector<ElementId> links{vp.bottom()};
      while (links.back() != d) {
        std::vector<ElementId> up;
        for (auto c : below)
          if (c != links.back() && vp.leq(links.back(), c)) up.push_back(c);
        links.push_back(up[rng() % up.size()]);
      }
      ++checked;
      if (auto bad = detail::verify_witness(CompactChain{links}, model, space))
        return Verdict::fail("expressive", "a chain has no causal witness", *bad);
    }
  }
  auto v = Verdict::pass("expressive", std::to_string(checked) + (exhaustive ? " chains (all)" : " sampled chains") +
                                           " have causal witnesses");
  v.data = {{"chains", checked}, {"exhaustive", exhaustive}, {"values", vp.size()}};
  return v;
}

/// The Kleene chain of every G_f meets the three chain conditions against
/// the least fixpoint found by scanning all of V_S.
inline Verdict check_jung(const ModelInstance& model, const Network& net, const KahnSemantics& k,
                          std::size_t sample_size, std::uint64_t seed) {
  const auto& vp = *k.space.poset;
  std::vector<std::size_t> chosen(k.selections.size());
  for (std::size_t i = 0; i < chosen.size(); ++i) chosen[i] = i;
  bool sampled = false;
  if (chosen.size() > sample_size) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = chosen.size(); i > 1; --i) std::swap(chosen[i - 1], chosen[rng() % i]);
    chosen.resize(sample_size);
    std::sort(chosen.begin(), chosen.end());
    sampled = true;
  }
  for (auto i : chosen) {
    const auto& sel = k.selections[i];
    auto g = [&](ElementId x) { return k.apply(net, sel, x); };
    std::vector<ElementId> fixed;
    for (ElementId x = 0; x < vp.size(); ++x)
      if (g(x) == x) fixed.push_back(x);
    std::optional<ElementId> least;
    for (auto x : fixed)
      if (std::all_of(fixed.begin(), fixed.end(), [&](ElementId y) { return vp.leq(x, y); })) least = x;
    if (!least)
      return Verdict::fail("jung", "G_f has no least fixpoint", {{"selection", selection_label(net, sel)}});
    const auto chain = kleene_iterates<ElementId>(g, vp.bottom());
    const int bad = jung_violation(chain, g, [&](ElementId a, ElementId b) { return vp.leq(a, b); }, vp.bottom(), *least);
    if (bad != 0) {
      nlohmann::json links = nlohmann::json::array();
      for (auto l : chain) links.push_back(model.value_json(l, k.space));
      return Verdict::fail("jung", "chain condition " + std::to_string(bad) + " fails",
                           {{"selection", selection_label(net, sel)}, {"chain", links}, {"condition", bad}});
    }
  }
  auto v = Verdict::pass("jung", std::to_string(chosen.size()) + (sampled ? " sampled" : "") +
                                     " chains meet the chain conditions");
  v.data = {{"selections", k.selections.size()}, {"checked", chosen.size()}, {"sampled", sampled}};
  return v;
}

}  // namespace gkahn
