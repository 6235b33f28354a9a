#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gkahn/bitset.hpp"
#include "gkahn/fixpoint.hpp"
#include "gkahn/model.hpp"
#include "gkahn/poset.hpp"
#include "gkahn/streams.hpp"
#include "gkahn/trace.hpp"
#include "gkahn/verdict.hpp"

namespace gkahn {

class ProducerConditionViolated : public std::runtime_error {
 public:
  ProducerConditionViolated(std::string channel, std::size_t count)
      : std::runtime_error("channel '" + channel + "' has " + std::to_string(count) + " producers, expected 1"),
        channel_(std::move(channel)),
        count_(count) {}
  const std::string& channel() const { return channel_; }
  std::size_t count() const { return count_; }

 private:
  std::string channel_;
  std::size_t count_;
};

struct NodeSpec {
  std::string name;
  Sort inputs;
  Sort outputs;
  std::vector<StreamFunctionSpec> functions;
  std::vector<std::string> labels;  // optional, one per function
};

/// A node with its functions tabulated over V_I -> V_O.
struct Node {
  std::string name;
  Sort inputs;
  Sort outputs;
  Sort sort;
  std::vector<CompiledFunction> functions;
  std::vector<std::string> labels;
  ValueSpace in_space;
  ValueSpace out_space;
  Bitset mask;

  ElementId in_value(const ModelInstance& m, const std::vector<EventId>& events) const {
    return m.value_of(events, in_space);
  }
  ElementId out_value(const ModelInstance& m, const std::vector<EventId>& events) const {
    return m.value_of(events, out_space);
  }
};

inline Node compile_node(const ModelInstance& model, const NodeSpec& spec) {
  Node node;
  node.name = spec.name;
  node.inputs = spec.inputs;
  node.outputs = spec.outputs;
  node.sort = spec.inputs;
  node.sort.insert(spec.outputs.begin(), spec.outputs.end());
  node.in_space = model.value_space(spec.inputs);
  node.out_space = model.value_space(spec.outputs);
  node.mask = model.mask(node.sort);
  std::vector<const Channel*> in;
  std::vector<const Channel*> out;
  for (const auto& n : spec.inputs) in.push_back(&model.channel(n));
  for (const auto& n : spec.outputs) out.push_back(&model.channel(n));
  std::set<std::vector<ElementId>> seen;
  for (std::size_t i = 0; i < spec.functions.size(); ++i) {
    auto f = compile_function(spec.functions[i], in, out);
    // Identical tables denote the same function of F.
    if (!seen.insert(f.map.table()).second) continue;
    node.functions.push_back(std::move(f));
    node.labels.push_back(i < spec.labels.size() ? spec.labels[i] : "f" + std::to_string(i));
  }
  return node;
}

class Network {
 public:
  /// Compiles the nodes and checks that every channel of the network has
  /// exactly one producing node.
  static Network build(const ModelInstance& model, const std::vector<NodeSpec>& specs) {
    Network net;
    std::map<std::string, std::size_t> producers;
    for (const auto& spec : specs) {
      for (const auto& c : spec.inputs) producers.try_emplace(c, 0);
      for (const auto& c : spec.outputs) ++producers[c];
    }
    for (const auto& [channel, count] : producers) {
      if (count != 1) throw ProducerConditionViolated(channel, count);
      net.sort_.insert(channel);
    }
    for (const auto& spec : specs) net.nodes_.push_back(compile_node(model, spec));
    for (std::size_t j = 0; j < net.nodes_.size(); ++j)
      for (const auto& c : net.nodes_[j].outputs) net.producer_[c] = j;
    return net;
  }

  const std::vector<Node>& nodes() const { return nodes_; }
  const Sort& sort() const { return sort_; }
  std::size_t producer_of(const std::string& channel) const { return producer_.at(channel); }

 private:
  std::vector<Node> nodes_;
  Sort sort_;
  std::map<std::string, std::size_t> producer_;
};

/// A sort with a set of traces over it, sorted canonically.
struct Process {
  Sort sort;
  std::vector<Trace> traces;

  void normalize() {
    std::sort(traces.begin(), traces.end(), trace_canonical_less);
    traces.erase(std::unique(traces.begin(), traces.end()), traces.end());
  }
  bool contains(const Trace& t) const {
    return std::binary_search(traces.begin(), traces.end(), t, trace_canonical_less);
  }
};

namespace detail {

inline std::vector<EventId> events_at(const Trace& t, std::uint32_t positions) {
  std::vector<EventId> out;
  for (std::size_t i = 0; i < t.size(); ++i)
    if ((positions >> i) & 1u) out.push_back(t.events[i]);
  return out;
}

/// Removes from `alive` every function that fails clause (2) on a cover
/// ending at a down-set of t that contains the positions in `required`.
inline void prune_covers(const ModelInstance& m, const Node& node, const Trace& t, std::uint32_t required,
                         Bitset& alive) {
  for_each_down_set(t, required, [&](std::uint32_t b) {
    if (alive.none()) return;
    const auto out = node.out_value(m, events_at(t, b));
    std::uint32_t maximal = b;
    for (std::size_t i = 0; i < t.size(); ++i)
      if ((b >> i) & 1u) maximal &= ~t.below[i];
    for (std::size_t p = 0; p < t.size(); ++p) {
      if (!((maximal >> p) & 1u)) continue;
      const auto in = node.in_value(m, events_at(t, b & ~(1u << p)));
      for (auto f = alive.find_first(); f != Bitset::npos; f = alive.find_next(f))
        if (!node.out_space.poset->leq(out, node.functions[f].map(in))) alive.reset(f);
    }
  });
}

inline std::uint32_t down_closure_of(const Trace& t, std::size_t p) { return (1u << p) | t.below[p]; }

}  // namespace detail

/// Functions of the node satisfying clause (2) on every cover below t.
inline Bitset clause2_survivors(const ModelInstance& m, const Node& node, const Trace& t) {
  Bitset alive(node.functions.size());
  alive.set();
  detail::prune_covers(m, node, t, 0, alive);
  return alive;
}

/// Functions f with noo_O(t) = f(noo_I(t)), among candidates.
inline Bitset clause1_holders(const ModelInstance& m, const Node& node, const Trace& t, const Bitset& candidates) {
  Bitset out(node.functions.size());
  const auto in = node.in_value(m, t.events);
  const auto o = node.out_value(m, t.events);
  for (auto f = candidates.find_first(); f != Bitset::npos; f = candidates.find_next(f))
    if (node.functions[f].map(in) == o) out.set(f);
  return out;
}

/// Functions of F the trace computes: clause (1) at t and clause (2) on
/// every cover u < v <= t (covers of sub-traces add one maximal event).
inline Bitset witnessing_functions(const ModelInstance& m, const Node& node, const Trace& t) {
  return clause1_holders(m, node, t, clause2_survivors(m, node, t));
}

/// The composition of the processes computing each node's F, found by
/// search. Clause (2) only gets harder as a trace grows, so the search walks
/// covers from bottom and drops every trace some node cannot justify; the
/// survivors are then filtered by clause (1).
inline Process compose_by_search(const ModelInstance& model, const std::vector<const Node*>& nodes, const Sort& sort) {
  const auto& es = model.es();
  const auto keep = model.mask(sort);
  std::vector<Bitset> node_masks;
  for (const auto* n : nodes) node_masks.push_back(n->mask);

  struct State {
    std::vector<Bitset> alive;
  };
  std::unordered_map<Trace, State, TraceHash> seen;
  std::vector<Trace> layer{Trace{}};
  {
    State s;
    for (const auto* n : nodes) {
      Bitset all(n->functions.size());
      all.set();
      s.alive.push_back(std::move(all));
    }
    seen.emplace(Trace{}, std::move(s));
  }
  const auto bound = model.bounds().trace_events;
  while (!layer.empty()) {
    std::vector<Trace> next;
    for (const auto& t : layer) {
      const auto state = seen.at(t);
      for (auto& u : trace_extensions(t, es, model.kind(), keep)) {
        if (seen.count(u)) continue;
        if (u.size() > bound) throw BoundExceeded("trace carrier during process search", bound);
        EventId added = 0;
        for (auto e : u.events)
          if (!t.contains(e)) added = e;
        State s{state.alive};
        bool ok = true;
        for (std::size_t j = 0; j < nodes.size() && ok; ++j) {
          if (!node_masks[j].test(added)) continue;
          const auto r = model.restrict_to_mask(u, node_masks[j]);
          detail::prune_covers(model, *nodes[j], r, detail::down_closure_of(r, *r.position(added)), s.alive[j]);
          ok = s.alive[j].any();
        }
        if (!ok) continue;
        seen.emplace(u, std::move(s));
        next.push_back(std::move(u));
        if (seen.size() > model.bounds().max_search)
          throw BoundExceeded("traces visited by process search", model.bounds().max_search);
      }
    }
    std::sort(next.begin(), next.end());
    layer = std::move(next);
  }
  Process p{sort, {}};
  for (const auto& [t, s] : seen) {
    bool member = true;
    for (std::size_t j = 0; j < nodes.size() && member; ++j)
      member = clause1_holders(model, *nodes[j], model.restrict_to_mask(t, node_masks[j]), s.alive[j]).any();
    if (member) p.traces.push_back(t);
  }
  p.normalize();
  return p;
}

/// The process computing a node's F (over the node's sort), by search.
inline Process process_computing(const ModelInstance& model, const Node& node) {
  return compose_by_search(model, {&node}, node.sort);
}

/// The same process by filtering the whole trace domain with the literal
/// definition: covers u < v <= t are taken from the trace poset.
inline Process process_by_filter(const ModelInstance& model, const Node& node, const TraceDomain& domain) {
  Process p{node.sort, {}};
  const auto all_covers = covers(*domain.poset);
  std::vector<ElementId> in(domain.traces.size());
  std::vector<ElementId> out(domain.traces.size());
  for (std::size_t i = 0; i < domain.traces.size(); ++i) {
    in[i] = node.in_value(model, domain.traces[i].events);
    out[i] = node.out_value(model, domain.traces[i].events);
  }
  for (ElementId t = 0; t < domain.traces.size(); ++t) {
    for (std::size_t f = 0; f < node.functions.size(); ++f) {
      const auto& fn = node.functions[f].map;
      if (fn(in[t]) != out[t]) continue;
      bool ok = true;
      for (const auto& [u, v] : all_covers)
        if (domain.poset->leq(v, t) && !node.out_space.poset->leq(out[v], fn(in[u]))) {
          ok = false;
          break;
        }
      if (ok) {
        p.traces.push_back(domain.traces[t]);
        break;
      }
    }
  }
  p.normalize();
  return p;
}

/// Network composition by filtering: t is in the result iff its restriction
/// to every component sort lies in that component.
inline Process compose(const ModelInstance& model, const std::vector<Process>& processes, const TraceDomain& domain) {
  Sort sort;
  for (const auto& p : processes) sort.insert(p.sort.begin(), p.sort.end());
  Process out{sort, {}};
  for (const auto& t : domain.traces) {
    bool member = true;
    for (const auto& p : processes)
      if (!p.contains(model.restrict(t, p.sort))) {
        member = false;
        break;
      }
    if (member) out.traces.push_back(t);
  }
  out.normalize();
  return out;
}

/// Compares a process against the reference process computing F.
inline Verdict computes_check(const ModelInstance& model, const Node& node, const Process& process,
                              const Process& reference) {
  const auto& es = model.es();
  for (const auto& t : process.traces)
    if (!reference.contains(t))
      return Verdict::fail("computes", "node '" + node.name + "': a trace does not compute F",
                           {{"node", node.name}, {"direction", "extra"}, {"trace", trace_to_json(t, es)}});
  for (const auto& t : reference.traces)
    if (!process.contains(t))
      return Verdict::fail("computes", "node '" + node.name + "': a trace computing F is missing",
                           {{"node", node.name}, {"direction", "missing"}, {"trace", trace_to_json(t, es)}});
  auto v = Verdict::pass("computes", "node '" + node.name + "': " + std::to_string(process.traces.size()) +
                                         " traces, equal to the process computing F");
  v.data = {{"node", node.name}, {"traces", process.traces.size()}};
  return v;
}

/// For every t in P and every function witnessing it, every u <= t obeys
/// noo_O(u) <= f(noo_I(u)).
inline Verdict lemma1_check(const ModelInstance& model, const Node& node, const Process& process) {
  const auto& es = model.es();
  std::size_t checked = 0;
  for (const auto& t : process.traces) {
    const auto witnesses = witnessing_functions(model, node, t);
    if (witnesses.none())
      return Verdict::fail("lemma1", "node '" + node.name + "': a trace has no witnessing function",
                           {{"node", node.name}, {"trace", trace_to_json(t, es)}});
    for (auto b : down_sets(t)) {
      const auto events = detail::events_at(t, b);
      const auto in = node.in_value(model, events);
      const auto out = node.out_value(model, events);
      for (auto f = witnesses.find_first(); f != Bitset::npos; f = witnesses.find_next(f)) {
        ++checked;
        if (!node.out_space.poset->leq(out, node.functions[f].map(in)))
          return Verdict::fail("lemma1", "node '" + node.name + "': output runs ahead of f(input)",
                               {{"node", node.name},
                                {"trace", trace_to_json(t, es)},
                                {"prefix", trace_to_json(sub_trace(t, b), es)},
                                {"function", node.labels[f]}});
      }
    }
  }
  auto v = Verdict::pass("lemma1", "node '" + node.name + "': " + std::to_string(checked) + " prefix bounds hold");
  v.data = {{"node", node.name}, {"traces", process.traces.size()}, {"bounds", checked}};
  return v;
}

/// Selections f in the product of the F_j (lexicographic, node order then
/// function index), the endomaps G_f on V_S and their least fixpoints.
struct KahnSemantics {
  ValueSpace space;
  std::vector<std::vector<std::size_t>> selections;
  std::vector<ElementId> fixpoints;  // per selection
  std::vector<ElementId> values;     // distinct fixpoints, ascending
  // Per node: positions in V_S of its input and output channels.
  std::vector<std::vector<std::size_t>> in_pos;
  std::vector<std::vector<std::size_t>> out_pos;

  /// G_f(v): every channel takes the matching component of its producer's
  /// function applied to v.
  ElementId apply(const Network& net, const std::vector<std::size_t>& selection, ElementId v) const {
    const auto& vp = *space.poset;
    auto coords = vp.coordinates(v);
    std::vector<ElementId> result(coords.size());
    for (std::size_t j = 0; j < net.nodes().size(); ++j) {
      const auto& node = net.nodes()[j];
      std::vector<ElementId> in(in_pos[j].size());
      for (std::size_t k = 0; k < in.size(); ++k) in[k] = coords[in_pos[j][k]];
      const auto out = node.functions[selection[j]].map(node.in_space.poset->compose(in));
      for (std::size_t k = 0; k < out_pos[j].size(); ++k)
        result[out_pos[j][k]] = node.out_space.poset->coordinate(out, k);
    }
    return vp.compose(result);
  }
};

inline KahnSemantics build_kahn(const ModelInstance& model, const Network& net) {
  KahnSemantics k;
  k.space = model.value_space(net.sort());
  auto position = [&](const std::string& c) {
    return static_cast<std::size_t>(std::distance(net.sort().begin(), net.sort().find(c)));
  };
  for (const auto& node : net.nodes()) {
    std::vector<std::size_t> in;
    std::vector<std::size_t> out;
    for (const auto& c : node.inputs) in.push_back(position(c));
    for (const auto& c : node.outputs) out.push_back(position(c));
    k.in_pos.push_back(std::move(in));
    k.out_pos.push_back(std::move(out));
  }
  std::size_t total = 1;
  for (const auto& node : net.nodes()) total *= node.functions.size();
  for (std::size_t i = 0; i < total; ++i) {
    // Mixed radix with the first node most significant.
    std::vector<std::size_t> sel(net.nodes().size());
    auto rest = i;
    for (std::size_t j = sel.size(); j-- > 0;) {
      sel[j] = rest % net.nodes()[j].functions.size();
      rest /= net.nodes()[j].functions.size();
    }
    k.selections.push_back(std::move(sel));
  }
  for (const auto& s : k.selections)
    k.fixpoints.push_back(least_fixpoint<ElementId>([&](ElementId v) { return k.apply(net, s, v); }, k.space.poset->bottom()));
  k.values = k.fixpoints;
  std::sort(k.values.begin(), k.values.end());
  k.values.erase(std::unique(k.values.begin(), k.values.end()), k.values.end());
  return k;
}

inline std::string selection_label(const Network& net, const std::vector<std::size_t>& sel) {
  std::string out;
  for (std::size_t j = 0; j < sel.size(); ++j) {
    if (j) out += ", ";
    out += net.nodes()[j].name + ":" + net.nodes()[j].labels[sel[j]];
  }
  return out;
}

/// Whether t lies in the composition, decided from t alone: each node's
/// restriction must compute some function of that node.
inline bool computes_network(const ModelInstance& model, const Network& net, const Trace& t) {
  for (const auto& node : net.nodes())
    if (witnessing_functions(model, node, model.restrict_to_mask(t, node.mask)).none()) return false;
  return true;
}

/// The linear trace that climbs a covering sequence of V_S one event at a
/// time.
inline Trace linear_trace_of(const ModelInstance& model, const ValueSpace& space, const CoveringSequence& seq) {
  Trace t;
  for (std::size_t n = 0; n + 1 < seq.steps.size(); ++n) {
    const auto diff = model.config_of(seq.steps[n + 1], space) - model.config_of(seq.steps[n], space);
    if (diff.count() != 1) throw std::invalid_argument("covering step adds more than one event");
    t = extend_trace(t, diff.find_first(), t.all_positions());
  }
  return t;
}

struct GkpResult {
  Verdict gkp;
  Verdict safety;
  Verdict liveness;
};

/// mu_S(P) against the least fixpoints of the G_f. Safety is inclusion of
/// the trace values in the fixpoints; liveness is the converse, with a
/// witness trace built from the Kleene chain of each G_f and checked for
/// membership on its own.
inline GkpResult gkp_check(const ModelInstance& model, const Network& net, const Process& p, const KahnSemantics& k) {
  const auto& es = model.es();
  const auto& space = k.space;
  std::vector<std::string> warnings;
  // Saturated: a fixpoint coordinate sits at the depth of a channel whose
  // producer has cut some output there.
  std::vector<std::size_t> cut;
  {
    std::size_t k_pos = 0;
    for (const auto& c : space.sort) {
      for (const auto& f : net.nodes()[net.producer_of(c)].functions)
        if (f.saturates) {
          cut.push_back(k_pos);
          break;
        }
      ++k_pos;
    }
  }
  std::vector<std::string> saturated;
  for (auto v : k.values)
    for (auto pos : cut)
      if (model.channels()[space.channels[pos]].is_maximal(space.poset->coordinate(v, pos))) {
        saturated.push_back(model.value_label(v, space));
        break;
      }
  if (!saturated.empty()) {
    std::string list;
    for (std::size_t i = 0; i < saturated.size() && i < 4; ++i) list += (i ? "; " : "") + saturated[i];
    if (saturated.size() > 4) list += "; ...";
    warnings.push_back(std::to_string(saturated.size()) + " of " + std::to_string(k.values.size()) +
                       " fixpoints are saturated (" + list + "): only the truncated instance is tested");
  }
  for (const auto& node : net.nodes())
    if (node.functions.empty()) warnings.push_back("node '" + node.name + "' has an empty function set");

  std::map<ElementId, const Trace*> realized;
  for (const auto& t : p.traces) realized.emplace(model.value_of(t.events, space), &t);
  std::vector<ElementId> trace_values;
  for (const auto& [v, t] : realized) trace_values.push_back(v);

  auto values_json = [&](const std::vector<ElementId>& ids) {
    nlohmann::json out = nlohmann::json::array();
    for (auto v : ids) out.push_back(model.value_json(v, space));
    return out;
  };

  GkpResult r;
  // Safety.
  {
    Verdict v = Verdict::pass("safety", std::to_string(trace_values.size()) + " trace values are all fixpoints");
    for (const auto& [value, t] : realized)
      if (!std::binary_search(k.values.begin(), k.values.end(), value)) {
        v = Verdict::fail("safety", "a trace value is no least fixpoint",
                          {{"trace", trace_to_json(*t, es)}, {"value", model.value_json(value, space)}});
        break;
      }
    v.warnings = warnings;
    v.data = {{"trace_values", values_json(trace_values)}};
    r.safety = std::move(v);
  }
  // Liveness.
  {
    Verdict v = Verdict::pass("liveness", std::to_string(k.values.size()) + " fixpoints are all realized");
    nlohmann::json witnesses = nlohmann::json::array();
    for (std::size_t i = 0; i < k.selections.size() && v.passed(); ++i) {
      const auto fix = k.fixpoints[i];
      const auto& sel = k.selections[i];
      const auto chain = CompactChain{
          kleene_iterates<ElementId>([&](ElementId x) { return k.apply(net, sel, x); }, space.poset->bottom())};
      const auto seq = refine_chain(chain, *space.poset);
      const auto w = linear_trace_of(model, space, seq);
      const bool value_ok = model.value_of(w.events, space) == fix;
      const bool computes = computes_network(model, net, w);
      const bool found = p.contains(w);
      if (!value_ok || !computes || !found) {
        v = Verdict::fail("liveness", "the witness trace for a fixpoint is not in P",
                          {{"selection", selection_label(net, sel)},
                           {"fixpoint", model.value_json(fix, space)},
                           {"witness", trace_to_json(w, es)},
                           {"value_matches", value_ok},
                           {"computes", computes},
                           {"in_process", found}});
        break;
      }
      witnesses.push_back({{"selection", selection_label(net, sel)}, {"witness", trace_to_json(w, es)}});
    }
    if (v.passed())
      for (auto value : k.values)
        if (!realized.count(value)) {
          v = Verdict::fail("liveness", "a fixpoint has no trace", {{"fixpoint", model.value_json(value, space)}});
          break;
        }
    v.warnings = warnings;
    v.data = {{"fixpoints", values_json(k.values)}, {"witnesses", witnesses}};
    r.liveness = std::move(v);
  }
  // Both directions at once.
  {
    Verdict v;
    v.name = "gkp";
    if (!r.safety.passed() || !r.liveness.passed()) {
      v = Verdict::fail("gkp", "trace values and fixpoints differ",
                        !r.safety.passed() ? r.safety.counterexample : r.liveness.counterexample);
    } else if (trace_values != k.values) {
      v = Verdict::fail("gkp", "trace values and fixpoints differ",
                        {{"trace_values", values_json(trace_values)}, {"fixpoints", values_json(k.values)}});
    } else {
      v = Verdict::pass("gkp", "mu(P) equals the set of least fixpoints (" + std::to_string(k.values.size()) +
                                   (k.values.size() == 1 ? " value)" : " values)"));
    }
    v.warnings = warnings;
    v.data = {{"values", values_json(k.values)},
              {"trace_values", values_json(trace_values)},
              {"selections", k.selections.size()},
              {"traces", p.traces.size()}};
    r.gkp = std::move(v);
  }
  return r;
}

/// Membership in the literal composition agrees, on the whole trace domain,
/// with: some selection f has mu(t) = G_f(mu(t)) and mu(v) <= G_f(mu(u)) on
/// every cover u < v <= t. Also confirms that the literal composition
/// equals the searched one.
inline Verdict global_characterization_check(const ModelInstance& model, const Network& net, const Process& searched) {
  const auto& es = model.es();
  const auto domain = model.trace_domain(net.sort());
  std::vector<Process> parts;
  for (const auto& node : net.nodes()) parts.push_back(process_by_filter(model, node, model.trace_domain(node.sort)));
  const auto literal = compose(model, parts, domain);
  for (const auto& t : literal.traces)
    if (!searched.contains(t))
      return Verdict::fail("global-char", "the literal composition has a trace the search missed",
                           {{"trace", trace_to_json(t, es)}});
  for (const auto& t : searched.traces)
    if (!literal.contains(t))
      return Verdict::fail("global-char", "the search found a trace outside the literal composition",
                           {{"trace", trace_to_json(t, es)}});

  const auto k = build_kahn(model, net);
  const auto all_covers = covers(*domain.poset);
  std::vector<ElementId> value(domain.traces.size());
  for (std::size_t i = 0; i < domain.traces.size(); ++i) value[i] = model.value_of(domain.traces[i].events, k.space);
  const auto& vp = *k.space.poset;
  for (ElementId t = 0; t < domain.traces.size(); ++t) {
    bool characterized = false;
    for (const auto& sel : k.selections) {
      if (k.apply(net, sel, value[t]) != value[t]) continue;
      bool ok = true;
      for (const auto& [u, v] : all_covers)
        if (domain.poset->leq(v, t) && !vp.leq(value[v], k.apply(net, sel, value[u]))) {
          ok = false;
          break;
        }
      if (ok) {
        characterized = true;
        break;
      }
    }
    if (characterized != literal.contains(domain.traces[t]))
      return Verdict::fail("global-char",
                           characterized ? "a trace satisfies the characterization but is not in P"
                                         : "a trace of P does not satisfy the characterization",
                           {{"trace", trace_to_json(domain.traces[t], es)}});
  }
  auto v = Verdict::pass("global-char", "membership agrees with the characterization on " +
                                            std::to_string(domain.traces.size()) + " traces");
  v.data = {{"traces", domain.traces.size()}, {"members", literal.traces.size()}};
  return v;
}

}  // namespace gkahn
