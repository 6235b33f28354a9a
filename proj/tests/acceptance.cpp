// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Expected values come from oracles written here, not from the
// library's own algorithms.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "support.hpp"

using namespace gkahn;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

class Failed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void require(bool condition, const std::string& what) {
  if (!condition) throw Failed(what);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fixed(double x, int digits = 2) {
  std::ostringstream out;
  out.precision(digits);
  out << std::fixed << x;
  return out.str();
}

std::vector<const Node*> pointers(const Network& net) {
  std::vector<const Node*> out;
  for (const auto& n : net.nodes()) out.push_back(&n);
  return out;
}

/// Domain cap for the exhaustive law checks, above the default so that
/// every fixture sort but the large merge ones is enumerated.
constexpr std::size_t law_domain_cap = 20000;

ModelInstance widened(const ModelInstance& m) {
  auto b = m.bounds();
  b.max_domain = law_domain_cap;
  return m.with_bounds(b);
}

/// Subsorts of the network sort whose trace domains fit the model bounds.
std::vector<Sort> fitting_sorts(const ModelInstance& m, const Sort& sort, std::size_t& skipped) {
  std::vector<Sort> out;
  for (const auto& s : subsorts(sort)) {
    try {
      (void)m.trace_domain(s);
      out.push_back(s);
    } catch (const BoundExceeded&) {
      ++skipped;
    }
  }
  return out;
}

// ---------------------------------------------------------------- oracles

/// Merge by the recursive equations, written independently of the library.
std::string merge_oracle(const std::string& x, const std::string& y, const std::string& o) {
  if (o.empty()) return "";
  if (o[0] == '0') return x.empty() ? "" : x[0] + merge_oracle(x.substr(1), y, o.substr(1));
  return y.empty() ? "" : y[0] + merge_oracle(x, y.substr(1), o.substr(1));
}

/// Strict partial orders on the points of chains with the given lengths
/// that contain every chain. Points are numbered chain by chain.
std::size_t orders_extending_chains(const std::vector<std::size_t>& lengths, bool linear) {
  std::size_t n = 0;
  std::vector<std::size_t> chain_of;
  for (std::size_t c = 0; c < lengths.size(); ++c)
    for (std::size_t i = 0; i < lengths[c]; ++i) chain_of.push_back(c), ++n;
  std::vector<std::pair<std::size_t, std::size_t>> free_pairs;
  std::vector<std::vector<char>> base(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (chain_of[i] == chain_of[j]) {
        base[i][j] = i < j;
      } else {
        free_pairs.emplace_back(i, j);
      }
    }
  std::size_t count = 0;
  for (std::uint64_t m = 0; m < (1ull << free_pairs.size()); ++m) {
    auto lt = base;
    for (std::size_t s = 0; s < free_pairs.size(); ++s)
      if ((m >> s) & 1u) lt[free_pairs[s].first][free_pairs[s].second] = 1;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i)
      for (std::size_t j = 0; j < n && ok; ++j) {
        if (lt[i][j] && lt[j][i]) ok = false;
        if (linear && i != j && !lt[i][j] && !lt[j][i]) ok = false;
        for (std::size_t k = 0; k < n && ok; ++k)
          if (lt[i][j] && lt[j][k] && !lt[i][k]) ok = false;
      }
    count += ok;
  }
  return count;
}

/// Pomsets over a stream signature: one word per channel, times the orders
/// extending the per-channel chains. Labels fix each point, so distinct
/// relations are distinct pomsets.
std::size_t pomset_count(const std::vector<std::pair<std::string, std::size_t>>& channels, bool linear) {
  std::size_t total = 0;
  std::function<void(std::size_t, std::vector<std::size_t>&, std::size_t)> walk =
      [&](std::size_t c, std::vector<std::size_t>& lengths, std::size_t words) {
        if (c == channels.size()) {
          total += words * orders_extending_chains(lengths, linear);
          return;
        }
        std::size_t per_length = 1;
        for (std::size_t len = 0; len <= channels[c].second; ++len) {
          lengths.push_back(len);
          walk(c + 1, lengths, words * per_length);
          lengths.pop_back();
          per_length *= channels[c].first.size();
        }
      };
  std::vector<std::size_t> lengths;
  walk(0, lengths, 1);
  return total;
}

/// A small event structure given by masks: down[e] holds the strict causes
/// of e; forbidden lists the inconsistent sets that generate Con.
struct SmallEs {
  std::size_t n = 0;
  std::vector<std::uint32_t> down;
  std::vector<std::uint32_t> forbidden;

  bool consistent(std::uint32_t x) const {
    for (auto f : forbidden)
      if ((f & x) == f) return false;
    return true;
  }

  EventStructure build() const {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));
    std::vector<std::pair<EventId, EventId>> causal;
    for (std::size_t e = 0; e < n; ++e)
      for (std::size_t d = 0; d < n; ++d)
        if ((down[e] >> d) & 1u) causal.emplace_back(d, e);
    std::vector<Bitset> sets;
    for (auto f : forbidden) {
      Bitset b(n);
      for (std::size_t i = 0; i < n; ++i)
        if ((f >> i) & 1u) b.set(i);
      sets.push_back(b);
    }
    return EventStructure::from_ids(names, causal, sets);
  }
};

/// Sequences of events whose every prefix is a configuration: the linear
/// traces, counted by depth-first search.
std::size_t sequence_count(const SmallEs& es) {
  std::size_t total = 0;
  std::function<void(std::uint32_t)> walk = [&](std::uint32_t x) {
    ++total;
    for (std::size_t e = 0; e < es.n; ++e) {
      const auto bit = 1u << e;
      if ((x & bit) || (es.down[e] & ~x) || !es.consistent(x | bit)) continue;
      walk(x | bit);
    }
  };
  walk(0);
  return total;
}

/// Event structures on n events with binary conflict only, one per
/// isomorphism class. Every poset has a labelling by a linear extension, so
/// causality is drawn from the natural order; conflict must be inherited.
std::vector<SmallEs> binary_conflict_structures(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  std::set<std::vector<std::uint32_t>> posets;
  for (std::uint32_t m = 0; m < (1u << pairs.size()); ++m) {
    std::vector<std::uint32_t> down(n, 0);
    for (std::size_t s = 0; s < pairs.size(); ++s)
      if ((m >> s) & 1u) down[pairs[s].second] |= 1u << pairs[s].first;
    for (std::size_t e = 0; e < n; ++e)
      for (std::size_t d = 0; d < e; ++d)
        if ((down[e] >> d) & 1u) down[e] |= down[d];
    posets.insert(down);
  }
  std::vector<std::size_t> perm(n);
  std::set<std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>> seen;
  std::vector<SmallEs> out;
  for (const auto& down : posets) {
    auto leq = [&](std::size_t a, std::size_t b) { return a == b || ((down[b] >> a) & 1u); };
    std::vector<std::pair<std::size_t, std::size_t>> open;
    for (auto [i, j] : pairs)
      if (!leq(i, j) && !leq(j, i)) open.emplace_back(i, j);
    for (std::uint32_t m = 0; m < (1u << open.size()); ++m) {
      std::vector<std::uint32_t> conflict(n, 0);
      for (std::size_t s = 0; s < open.size(); ++s)
        if ((m >> s) & 1u) {
          conflict[open[s].first] |= 1u << open[s].second;
          conflict[open[s].second] |= 1u << open[s].first;
        }
      bool inherited = true;
      for (std::size_t a = 0; a < n && inherited; ++a)
        for (std::size_t b = 0; b < n && inherited; ++b)
          if ((conflict[a] >> b) & 1u)
            for (std::size_t c = 0; c < n && inherited; ++c)
              if (leq(a, c) && !((conflict[c] >> b) & 1u)) inherited = false;
      if (!inherited) continue;
      // Canonical form: least relabelling.
      for (std::size_t i = 0; i < n; ++i) perm[i] = i;
      std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>> best;
      bool first = true;
      do {
        std::vector<std::uint32_t> d2(n, 0), c2(n, 0);
        for (std::size_t a = 0; a < n; ++a)
          for (std::size_t b = 0; b < n; ++b) {
            if ((down[a] >> b) & 1u) d2[perm[a]] |= 1u << perm[b];
            if ((conflict[a] >> b) & 1u) c2[perm[a]] |= 1u << perm[b];
          }
        auto key = std::make_pair(std::move(d2), std::move(c2));
        if (first || key < best) best = std::move(key);
        first = false;
      } while (std::next_permutation(perm.begin(), perm.end()));
      if (!seen.insert(best).second) continue;
      SmallEs es;
      es.n = n;
      es.down = best.first;
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
          if ((best.second[a] >> b) & 1u) es.forbidden.push_back((1u << a) | (1u << b));
      out.push_back(std::move(es));
    }
  }
  return out;
}

/// A random structure with a forbidden set of three or more events, closed
/// so that replacing a member by anything above it stays inconsistent.
std::optional<SmallEs> random_large_conflict(std::mt19937_64& rng) {
  SmallEs es;
  es.n = 3 + rng() % 3;
  es.down.assign(es.n, 0);
  for (std::size_t j = 0; j < es.n; ++j)
    for (std::size_t i = 0; i < j; ++i)
      if (rng() % 4 == 0) es.down[j] |= (1u << i) | es.down[i];
  const std::size_t k = 3 + rng() % (es.n - 2);
  std::vector<std::size_t> ids(es.n);
  for (std::size_t i = 0; i < es.n; ++i) ids[i] = i;
  std::shuffle(ids.begin(), ids.end(), rng);
  std::uint32_t f = 0;
  for (std::size_t i = 0; i < k; ++i) f |= 1u << ids[i];
  es.forbidden.push_back(f);
  if (rng() % 2) {
    const auto a = rng() % es.n;
    const auto b = rng() % es.n;
    if (a != b) es.forbidden.push_back((1u << a) | (1u << b));
  }
  for (std::size_t i = 0; i < es.forbidden.size(); ++i)
    for (std::size_t m = 0; m < es.n; ++m) {
      if (!((es.forbidden[i] >> m) & 1u)) continue;
      for (std::size_t a = 0; a < es.n; ++a)
        if ((es.down[a] >> m) & 1u) {
          const auto g = (es.forbidden[i] & ~(1u << m)) | (1u << a);
          if (es.consistent(g)) es.forbidden.push_back(g);
        }
    }
  try {
    (void)es.build();
  } catch (const AxiomViolation&) {
    return std::nullopt;
  }
  return es;
}

/// The three chain conditions, checked directly on a poset.
bool chain_conditions_hold(const FinitePointedPoset& p, const std::vector<ElementId>& f,
                           const std::vector<ElementId>& chain, ElementId lfp) {
  if (chain.empty() || chain.front() != p.bottom()) return false;
  for (std::size_t i = 0; i + 1 < chain.size(); ++i)
    if (!p.leq(chain[i + 1], f[chain[i]]) || !p.leq(chain[i], chain[i + 1])) return false;
  return chain.back() == lfp;
}

// ------------------------------------------------------------- criteria

Outcome gkp_deterministic() {
  const auto start = std::chrono::steady_clock::now();
  const auto doc = support::load_fixture("feedback_prepend.json");
  const auto p = compose_by_search(doc.model, pointers(doc.network), doc.network.sort());
  const auto k = build_kahn(doc.model, doc.network);
  const auto r = gkp_check(doc.model, doc.network, p, k);
  const double t = seconds_since(start);
  require(r.gkp.status == Status::pass, "gkp: " + r.gkp.message);
  const auto expected = nlohmann::json::parse(R"([{"x": "000"}])");
  require(r.gkp.data["values"] == expected, "fixpoints " + r.gkp.data["values"].dump());
  require(r.gkp.data["trace_values"] == expected, "trace values " + r.gkp.data["trace_values"].dump());
  require(t < 1.0, "took " + fixed(t) + " s");
  return {true, "values {000} = least fixpoints, " + fixed(t, 3) + " s"};
}

Outcome gkp_dmerge() {
  const auto start = std::chrono::steady_clock::now();
  const auto doc = support::load_fixture("dmerge_constants.json");
  const auto p = compose_by_search(doc.model, pointers(doc.network), doc.network.sort());
  const auto k = build_kahn(doc.model, doc.network);
  const auto r = gkp_check(doc.model, doc.network, p, k);
  const double t = seconds_since(start);
  require(r.gkp.status == Status::pass && r.safety.status == Status::pass && r.liveness.status == Status::pass,
          "gkp: " + r.gkp.message);

  std::set<std::string> expected;
  for (std::size_t len = 0; len <= 4; ++len)
    for (std::uint32_t bits = 0; bits < (1u << len); ++bits) {
      std::string o;
      for (std::size_t i = 0; i < len; ++i) o += ((bits >> (len - 1 - i)) & 1u) ? '1' : '0';
      expected.insert(merge_oracle("ab", "cd", o));
    }
  std::set<std::string> fixpoints;
  for (const auto& v : r.gkp.data["values"]) {
    require(v["x"] == "ab" && v["y"] == "cd", "constant channels " + v.dump());
    fixpoints.insert(v["z"].get<std::string>());
  }
  std::set<std::string> traces;
  for (const auto& v : r.gkp.data["trace_values"]) traces.insert(v["z"].get<std::string>());
  require(fixpoints == expected, std::to_string(fixpoints.size()) + " fixpoints, expected " +
                                     std::to_string(expected.size()));
  require(traces == expected, "trace values differ from the merges");
  require(merge_oracle("ab", "cd", "0101") == "acbd" && dmerge("ab", "cd", "0101") == "acbd", "spot value 0101");
  require(fixpoints.count("acbd") == 1, "acbd missing");
  require(t < 60.0, "took " + fixed(t) + " s");
  return {true, std::to_string(expected.size()) + " merged words, 0101 -> acbd, " + fixed(t) + " s"};
}

Outcome pomset_correspondence() {
  std::size_t sorts = 0;
  std::size_t traces = 0;
  const std::vector<std::string> alphabets{"0", "01"};
  for (auto kind : {TraceKind::pomset, TraceKind::linear})
    for (std::size_t channels = 1; channels <= 2; ++channels)
      for (const auto& a1 : alphabets)
        for (std::size_t d1 = 0; d1 <= 2; ++d1)
          for (const auto& a2 : alphabets)
            for (std::size_t d2 = 0; d2 <= 2; ++d2) {
              if (channels == 1 && (a2 != "0" || d2 != 0)) continue;
              std::vector<Channel> cs{Channel::of_stream("p", a1, d1)};
              std::vector<std::pair<std::string, std::size_t>> sig{{a1, d1}};
              if (channels == 2) {
                cs.push_back(Channel::of_stream("q", a2, d2));
                sig.emplace_back(a2, d2);
              }
              const ModelInstance m(cs, kind);
              const auto sort = m.all_channels();
              const auto dom = m.trace_domain(sort);
              auto v = check_pomset_iso(dom, m.universe(), m.signature(sort), m.bounds().trace_events);
              const std::string where = std::string(to_string(kind)) + " " + a1 + "/" + std::to_string(d1) +
                                        (channels == 2 ? " " + a2 + "/" + std::to_string(d2) : "");
              require(v.status == Status::pass, where + ": " + v.message);
              const auto expected = pomset_count(sig, kind == TraceKind::linear);
              require(dom.traces.size() == expected, where + ": " + std::to_string(dom.traces.size()) +
                                                         " traces, expected " + std::to_string(expected));
              ++sorts;
              traces += dom.traces.size();
            }
  return {true, std::to_string(sorts) + " stream sorts, " + std::to_string(traces) + " traces, 0 exceptions"};
}

Outcome covseq_correspondence() {
  std::size_t structures = 0;
  std::size_t sequences = 0;
  auto check = [&](const SmallEs& small, const std::string& where) {
    const auto es = small.build();
    auto v = check_covseq_iso(es, small.n, 100'000);
    require(v.status == Status::pass, where + ": " + v.message);
    const auto expected = sequence_count(small);
    require(v.data["traces"] == expected && v.data["sequences"] == expected,
            where + ": " + v.data.dump() + ", expected " + std::to_string(expected));
    ++structures;
    sequences += expected;
  };
  // Class counts small enough to list by hand.
  const std::vector<std::size_t> by_hand{1, 1, 3, 11};
  for (std::size_t n = 0; n < by_hand.size(); ++n)
    require(binary_conflict_structures(n).size() == by_hand[n], "class count on " + std::to_string(n) + " events");
  std::size_t classes = 0;
  for (std::size_t n = 0; n <= 5; ++n)
    for (const auto& es : binary_conflict_structures(n)) {
      check(es, "binary conflict structure on " + std::to_string(n) + " events");
      ++classes;
    }
  std::mt19937_64 rng(20240601);
  std::size_t larger = 0;
  for (int trial = 0; trial < 400 && larger < 100; ++trial)
    if (auto es = random_large_conflict(rng)) {
      if (es->build().larger_forbidden().empty()) continue;
      check(*es, "random structure " + std::to_string(trial));
      ++larger;
    }
  require(larger >= 50, "only " + std::to_string(larger) + " structures with larger forbidden sets");
  return {true, std::to_string(classes) + " binary-conflict classes (<= 5 events) + " + std::to_string(larger) +
                    " with larger forbidden sets, " + std::to_string(sequences) + " sequences"};
}

Outcome incrementality() {
  std::size_t families = 0;
  std::size_t maps = 0;
  std::size_t skipped = 0;
  auto run = [&](const ModelInstance& m, const Sort& sort, const std::string& where) {
    for (auto kind : {TraceKind::pomset, TraceKind::linear}) {
      const auto mk = widened(m).with_kind(kind);
      const auto sorts = fitting_sorts(mk, sort, skipped);
      auto v = check_restrictions_incremental(mk, sorts);
      require(v.status == Status::pass, where + " (" + to_string(kind) + "): " + v.message);
      maps += v.data["maps"].get<std::size_t>();
      ++families;
    }
  };
  for (const auto& name : support::passing_fixtures()) {
    const auto doc = support::load_fixture(name);
    run(doc.model, doc.network.sort(), name);
  }
  for (const std::string a : {"0", "01"})
    for (std::size_t d = 0; d <= 2; ++d)
      run(ModelInstance({Channel::of_stream("p", a, d), Channel::of_stream("q", a, d)}, TraceKind::pomset),
          {"p", "q"}, "streams " + a + "/" + std::to_string(d));
  const auto es = EventStructure::validate({"a", "b", "c"}, {{"a", "c"}}, {{"b", "c"}});
  run(ModelInstance({Channel::of_structure("e", es), Channel::of_stream("s", "01", 1)}, TraceKind::pomset),
      {"e", "s"}, "mixed");
  std::string detail = std::to_string(maps) + " restriction maps in " + std::to_string(families) + " families";
  if (skipped) detail += ", " + std::to_string(skipped) + " sorts over the domain bound not enumerated";
  return {true, detail};
}

Outcome chain_conditions() {
  std::mt19937_64 rng(7);
  std::size_t nontrivial = 0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 1 + rng() % 8;
    const auto p = std::make_shared<const FinitePointedPoset>(support::random_poset(rng, n));
    const auto table = support::random_monotone(rng, *p);
    const MonotoneMap<FinitePointedPoset> f(p, p, table);
    const auto lfp = support::brute_lfp(*p, table);
    require(lfp.has_value(), "no least fixpoint in case " + std::to_string(i));
    const auto chain = jung_chain(f);
    require(chain_conditions_hold(*p, table, chain.links, *lfp), "case " + std::to_string(i));
    require(jung_violation(chain.links, [&](ElementId x) { return table[x]; },
                           [&](ElementId a, ElementId b) { return p->leq(a, b); }, p->bottom(), *lfp) == 0,
            "library disagrees in case " + std::to_string(i));
    nontrivial += chain.links.size() > 2;
  }
  return {true, "100 maps on posets of <= 8 elements, " + std::to_string(nontrivial) + " chains longer than 2"};
}

Outcome prefix_bound() {
  std::size_t nodes = 0;
  std::size_t bounds = 0;
  for (const auto& name : support::passing_fixtures()) {
    const auto doc = support::load_fixture(name);
    const auto& m = doc.model;
    for (const auto& node : doc.network.nodes()) {
      const auto p = process_computing(m, node);
      auto v = lemma1_check(m, node, p);
      require(v.status == Status::pass, name + ": " + v.message);
      // Direct form: some function matches t and bounds every down-set.
      for (const auto& t : p.traces) {
        bool found = false;
        for (const auto& fn : node.functions) {
          if (fn.map(node.in_value(m, t.events)) != node.out_value(m, t.events)) continue;
          bool ok = true;
          for (std::uint32_t s = 0; s <= t.all_positions() && ok; ++s) {
            bool closed = true;
            for (std::size_t i = 0; i < t.size(); ++i)
              if (((s >> i) & 1u) && (t.below[i] & ~s)) closed = false;
            if (!closed) continue;
            std::vector<EventId> u;
            for (std::size_t i = 0; i < t.size(); ++i)
              if ((s >> i) & 1u) u.push_back(t.events[i]);
            ++bounds;
            ok = node.out_space.poset->leq(node.out_value(m, u), fn.map(node.in_value(m, u)));
            if (s == t.all_positions()) break;
          }
          if (ok) {
            found = true;
            break;
          }
        }
        require(found, name + ": node '" + node.name + "' trace " + trace_label(t, m.es()));
      }
      ++nodes;
    }
  }
  return {true, std::to_string(nodes) + " node processes, " + std::to_string(bounds) + " prefix bounds"};
}

Outcome safety_liveness() {
  std::size_t networks = 0;
  std::size_t values = 0;
  for (const auto& name : support::passing_fixtures()) {
    const auto doc = support::load_fixture(name);
    RunOptions o;
    o.checks = {"gkp", "safety", "liveness"};
    const auto report = run_checks(doc, o);
    for (const auto& r : report.results)
      require(r.verdict.status == Status::pass,
              name + " " + r.verdict.name + ": " + r.verdict.message + " " + r.verdict.counterexample.dump());
    // Least fixpoints by scanning V_S, per selection.
    const auto k = build_kahn(doc.model, doc.network);
    const auto& vp = *k.space.poset;
    std::set<ElementId> scanned;
    for (const auto& sel : k.selections) {
      std::vector<ElementId> fixed;
      for (ElementId v = 0; v < vp.size(); ++v)
        if (k.apply(doc.network, sel, v) == v) fixed.push_back(v);
      std::optional<ElementId> least;
      for (auto v : fixed)
        if (std::all_of(fixed.begin(), fixed.end(), [&](ElementId w) { return vp.leq(v, w); })) least = v;
      require(least.has_value(), name + ": a selection has no least fixpoint");
      scanned.insert(*least);
    }
    require(std::vector<ElementId>(scanned.begin(), scanned.end()) == k.values, name + ": scanned fixpoints differ");
    values += k.values.size();
    ++networks;
  }
  require(networks >= 10, "only " + std::to_string(networks) + " networks");
  return {true, std::to_string(networks) + " networks, " + std::to_string(values) + " fixpoints, all realized"};
}

Outcome model_axioms() {
  std::size_t models = 0;
  std::size_t skipped = 0;
  for (const auto& name : support::passing_fixtures()) {
    const auto doc = support::load_fixture(name);
    const auto m = widened(doc.model);
    auto v = check_model_axioms(m, fitting_sorts(m, doc.network.sort(), skipped));
    require(v.status == Status::pass, name + ": " + v.message);
    ++models;
  }

  RunOptions o;
  o.checks = {"axioms", "computes"};
  {
    const auto doc = support::load_fixture("mutations/corrupt_restriction.json");
    const auto v = run_checks(doc, o).results[0].verdict;
    require(v.status == Status::fail, "corrupted restriction not detected");
    // Replay: the witness is moved by the corrupted restriction only.
    const auto t = trace_from_json(v.counterexample["witness"], doc.model.es());
    const Sort s = v.counterexample["sort"].get<Sort>();
    const auto honest = support::load_fixture("pipeline_copy.json");
    require(doc.model.restrict(t, s) != t && honest.model.restrict(t, s) == t, "corrupted witness does not replay");
  }
  for (const std::string mutation : {"inject_trace", "drop_maximal"}) {
    const auto doc = support::load_fixture("mutations/" + mutation + ".json");
    const auto report = run_checks(doc, o);
    require(report.results[0].verdict.status == Status::pass, mutation + ": axioms should still hold");
    const auto& v = report.results[1].verdict;
    require(v.status == Status::fail, mutation + " not detected");
    const auto t = trace_from_json(v.counterexample["trace"], doc.model.es());
    const auto& node = doc.network.nodes()[0].name == v.counterexample["node"] ? doc.network.nodes()[0]
                                                                               : doc.network.nodes().back();
    const bool computes = process_computing(doc.model, node).contains(t);
    require(computes == (mutation == "drop_maximal"), mutation + ": witness does not replay");
  }
  std::string detail = std::to_string(models) + " fixture models pass; corrupt, inject and drop detected";
  if (skipped) detail += " (" + std::to_string(skipped) + " sorts over the domain bound not enumerated)";
  return {true, detail};
}

Outcome determinism() {
  std::vector<std::string> files = support::passing_fixtures();
  for (const auto& m : support::mutation_fixtures()) files.push_back(m);
  std::size_t bytes = 0;
  for (const auto& f : files) {
    const std::string cmd = std::string(GKAHN_CLI) + " --format json --no-timing " + support::fixture(f);
    int s1 = -1;
    int s2 = -1;
    const auto a = support::run_command(cmd, s1);
    const auto b = support::run_command(cmd, s2);
    require(!a.empty() && a == b, f + ": reports differ");
    require(s1 == s2 && s1 == (f.rfind("mutations/", 0) == 0 ? 1 : 0), f + ": exit status " + std::to_string(s1));
    bytes += a.size();
  }
  return {true, std::to_string(files.size()) + " documents, " + std::to_string(bytes) + " bytes identical"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gkp-deterministic", gkp_deterministic},
      {"gkp-dmerge", gkp_dmerge},
      {"pomset-correspondence", pomset_correspondence},
      {"covseq-correspondence", covseq_correspondence},
      {"incrementality", incrementality},
      {"chain-conditions", chain_conditions},
      {"prefix-bound", prefix_bound},
      {"safety-liveness", safety_liveness},
      {"model-axioms", model_axioms},
      {"determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = run();
    } catch (const std::exception& e) {
      out = {false, e.what()};
    }
    failed += !out.ok;
    std::printf("%s  %-22s %s  [%s s]\n", out.ok ? "PASS" : "FAIL", name.c_str(), out.detail.c_str(),
                fixed(seconds_since(start)).c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
