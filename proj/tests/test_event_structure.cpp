#include <catch_amalgamated.hpp>

#include <random>

#include "support.hpp"

using namespace gkahn;

namespace {

EventStructure conflict_es() { return EventStructure::validate({"a", "b"}, {}, {{"a", "b"}}); }

std::set<std::string> labels_of(const EventStructure& es, const std::vector<Bitset>& xs) {
  std::set<std::string> out;
  for (const auto& x : xs) out.insert(es.config_label(x));
  return out;
}

/// Down-closed consistent subsets by brute force over all subsets.
std::size_t brute_configuration_count(const EventStructure& es) {
  std::size_t n = 0;
  for (std::uint32_t m = 0; m < (1u << es.size()); ++m) {
    Bitset x = es.empty_set();
    for (std::size_t i = 0; i < es.size(); ++i)
      if ((m >> i) & 1u) x.set(i);
    bool closed = true;
    for (auto e : members(x))
      for (EventId d = 0; d < es.size(); ++d)
        if (es.leq(d, e) && !x.test(d)) closed = false;
    bool consistent = true;
    for (const auto& f : es.forbidden())
      if (f.is_subset_of(x)) consistent = false;
    n += closed && consistent;
  }
  return n;
}

}  // namespace

TEST_CASE("validate_es accepts binary conflict and the empty structure") {
  auto es = conflict_es();
  CHECK(es.size() == 2);
  CHECK(es.forbidden().size() == 1);
  CHECK(EventStructure::validate({}, {}, {}).size() == 0);
}

TEST_CASE("validate_es rejects conflict between causally ordered events") {
  try {
    (void)EventStructure::validate({"a", "b"}, {{"a", "b"}}, {{"a", "b"}});
    FAIL("accepted");
  } catch (const AxiomViolation& e) {
    CHECK(e.axiom() == "down-closure-consistent");
    CHECK(e.witness() == std::vector<std::string>{"b"});
  }
}

TEST_CASE("validate_es rejects other axiom violations") {
  CHECK_THROWS_AS(EventStructure::validate({"a", "b"}, {{"a", "b"}, {"b", "a"}}, {}), AxiomViolation);
  CHECK_THROWS_AS(EventStructure::validate({"a"}, {}, {{"a"}}), AxiomViolation);
  CHECK_THROWS_AS(EventStructure::validate({"a"}, {}, {{}}), AxiomViolation);
  // Conflict not inherited along causality.
  CHECK_THROWS_AS(EventStructure::validate({"a", "b", "c"}, {{"a", "c"}}, {{"a", "b"}}), AxiomViolation);
  CHECK_NOTHROW(EventStructure::validate({"a", "b", "c"}, {{"a", "c"}}, {{"a", "b"}, {"b", "c"}}));
  // A ternary forbidden set must be inherited too.
  CHECK_THROWS_AS(EventStructure::validate({"a", "b", "c", "d"}, {{"a", "d"}}, {{"a", "b", "c"}}), AxiomViolation);
  CHECK_NOTHROW(EventStructure::validate({"a", "b", "c", "d"}, {{"a", "d"}}, {{"a", "b", "c"}, {"b", "c", "d"}}));
}

TEST_CASE("configurations") {
  auto es = conflict_es();
  CHECK(labels_of(es, configurations(es)) == std::set<std::string>{"{}", "{a}", "{b}"});
  auto free2 = EventStructure::validate({"a", "b"}, {}, {});
  CHECK(labels_of(free2, configurations(free2)) == std::set<std::string>{"{}", "{a}", "{b}", "{a,b}"});
  auto empty = EventStructure::validate({}, {}, {});
  CHECK(configurations(empty).size() == 1);
}

TEST_CASE("configuration posets: covers add one event") {
  auto dom = config_poset(conflict_es());
  CHECK(dom.poset->size() == 3);
  CHECK(covers(*dom.poset).size() == 2);
  CHECK(config_poset(EventStructure::validate({}, {}, {})).poset->size() == 1);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    // Random causality on the natural order, binary conflicts inherited.
    const std::size_t n = 1 + rng() % 6;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("e" + std::to_string(i));
    std::vector<std::pair<EventId, EventId>> causal;
    for (EventId i = 0; i < n; ++i)
      for (EventId j = i + 1; j < n; ++j)
        if (rng() % 4 == 0) causal.emplace_back(i, j);
    auto plain = EventStructure::from_ids(names, causal, {});
    std::vector<Bitset> conflicts;
    for (EventId i = 0; i < n; ++i)
      for (EventId j = i + 1; j < n; ++j)
        if (!plain.leq(i, j) && rng() % 4 == 0) {
          // Close under inheritance: everything above i conflicts with everything above j.
          for (auto a : members(plain.up(i)))
            for (auto b : members(plain.up(j))) conflicts.push_back(make_bitset(n, {a, b}));
        }
    std::optional<EventStructure> es;
    try {
      es = EventStructure::from_ids(names, causal, conflicts);
    } catch (const AxiomViolation&) {
      continue;  // inherited conflict hit a causal pair
    }
    auto d = config_poset(*es);
    CHECK(d.configs.size() == brute_configuration_count(*es));
    for (ElementId x = 0; x < d.configs.size(); ++x)
      for (ElementId y = 0; y < d.configs.size(); ++y) {
        const bool one_more = d.configs[x].is_subset_of(d.configs[y]) && (d.configs[y] - d.configs[x]).count() == 1;
        CHECK(d.poset->is_cover(x, y) == one_more);
      }
    CHECK(check_incremental_domain(*d.poset).passed());
  }
}

TEST_CASE("product event structures") {
  ChannelFamily family({{"p", conflict_es()}, {"q", conflict_es()}});
  auto prod = product_es(family, {"p", "q"});
  CHECK(prod.es().size() == 4);
  CHECK(configurations(prod.es()).size() == 9);
  CHECK(prod.es().name(0) == "p:a");
  auto single = product_es(family, {"p"});
  CHECK(configurations(single.es()).size() == 3);
  CHECK(product_es(family, {}).es().size() == 0);
  CHECK_THROWS_AS(product_es(family, {"r"}), UnknownChannel);
}

TEST_CASE("projections compose") {
  auto free2 = EventStructure::validate({"a", "b"}, {}, {});
  ChannelFamily family({{"p", conflict_es()}, {"q", free2}, {"r", conflict_es()}});
  auto s = product_es(family, {"p", "q", "r"});
  auto t = product_es(family, {"p", "q"});
  auto u = product_es(family, {"p"});
  auto empty = product_es(family, {});
  for (const auto& x : configurations(s.es())) {
    auto xt = project_config(s, x, t);
    CHECK(t.es().is_configuration(xt));
    CHECK(project_config(t, xt, u) == project_config(s, x, u));
    CHECK(project_config(s, x, s) == x);
    CHECK(project_config(s, x, empty).none());
  }
  auto x = make_bitset(s.es().size(), {*s.es().find("p:a"), *s.es().find("q:b")});
  CHECK(u.es().config_label(project_config(s, x, u)) == "{p:a}");
}

TEST_CASE("product isomorphism") {
  auto free2 = EventStructure::validate({"a", "b"}, {}, {});
  auto chain3 = EventStructure::validate({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}}, {});
  ChannelFamily family({{"p", conflict_es()}, {"q", conflict_es()}, {"r", free2}, {"s", chain3}});
  auto v = check_product_iso(family, {"p", "q"});
  CHECK(v.passed());
  CHECK(check_product_iso(family, {"p"}).passed());
  CHECK(check_product_iso(family, {"p", "r", "s"}).passed());
}
