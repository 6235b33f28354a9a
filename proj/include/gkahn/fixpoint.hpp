#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "gkahn/poset.hpp"
#include "gkahn/verdict.hpp"

namespace gkahn {

/// Ascending chain b_0 <= b_1 <= ... of elements of a finite poset.
struct CompactChain {
  std::vector<ElementId> links;
  friend bool operator==(const CompactChain&, const CompactChain&) = default;
};

/// Bottom-rooted sequence of consecutive covers: a step-by-step history.
struct CoveringSequence {
  std::vector<ElementId> steps;
  friend bool operator==(const CoveringSequence&, const CoveringSequence&) = default;
  friend auto operator<=>(const CoveringSequence&, const CoveringSequence&) = default;
};

class NotIncremental : public std::runtime_error {
 public:
  NotIncremental(std::string lower, std::string upper)
      : std::runtime_error("no covering path from " + lower + " to " + upper) {}
};

class NotStrict : public std::runtime_error {
 public:
  NotStrict() : std::runtime_error("map does not send bottom to bottom") {}
};

template <PointedPoset P>
bool is_chain(const P& poset, const CompactChain& chain) {
  if (chain.links.empty()) return false;
  for (std::size_t i = 0; i + 1 < chain.links.size(); ++i)
    if (!poset.leq(chain.links[i], chain.links[i + 1])) return false;
  return true;
}

template <PointedPoset P>
bool is_covering_sequence(const P& poset, const CoveringSequence& seq) {
  if (seq.steps.empty() || seq.steps.front() != poset.bottom()) return false;
  for (std::size_t i = 0; i + 1 < seq.steps.size(); ++i) {
    const auto& uc = poset.upper_covers(seq.steps[i]);
    if (std::find(uc.begin(), uc.end(), seq.steps[i + 1]) == uc.end()) return false;
  }
  return true;
}

/// Kleene iterates bottom, f(bottom), f^2(bottom), ... up to and including
/// the first repeated value. For a monotone f on a finite poset the last
/// entry is the least fixed point.
template <class V, class F>
std::vector<V> kleene_iterates(F&& f, V bottom) {
  std::vector<V> iterates{bottom};
  for (;;) {
    V next = f(iterates.back());
    if (next == iterates.back()) return iterates;
    iterates.push_back(std::move(next));
  }
}

template <class V, class F>
V least_fixpoint(F&& f, V bottom) {
  return kleene_iterates<V>(std::forward<F>(f), std::move(bottom)).back();
}

template <PointedPoset P>
ElementId lfp_iterate(const MonotoneMap<P>& f) {
  return least_fixpoint<ElementId>([&](ElementId x) { return f(x); }, f.domain().bottom());
}

/// A chain (b_n) with b_0 = bottom, b_{n+1} <= f(b_n), and last link the
/// least fixpoint. On a finite poset the distinct Kleene iterates are such
/// a chain.
template <PointedPoset P>
CompactChain jung_chain(const MonotoneMap<P>& f) {
  return CompactChain{kleene_iterates<ElementId>([&](ElementId x) { return f(x); }, f.domain().bottom())};
}

/// Checks the three chain conditions against an independently supplied
/// least fixpoint. Returns the index of the first violated condition (1..3)
/// or 0.
template <class V, class F, class Leq>
int jung_violation(const std::vector<V>& chain, F&& f, Leq&& leq, const V& bottom, const V& lfp) {
  if (chain.empty() || !(chain.front() == bottom)) return 1;
  for (std::size_t i = 0; i + 1 < chain.size(); ++i)
    if (!leq(chain[i + 1], f(chain[i]))) return 2;
  for (std::size_t i = 0; i + 1 < chain.size(); ++i)
    if (!leq(chain[i], chain[i + 1])) return 3;
  if (!(chain.back() == lfp)) return 3;
  return 0;
}

/// Refines an ascending chain into a covering sequence through every link.
/// Between consecutive links the least admissible cover (by element id) is
/// taken, so the result is reproducible.
template <PointedPoset P>
CoveringSequence refine_chain(const CompactChain& chain, const P& poset) {
  if (!is_chain(poset, chain)) throw std::invalid_argument("refine_chain: links are not ascending");
  CoveringSequence seq{{poset.bottom()}};
  for (auto target : chain.links) {
    if (!poset.leq(seq.steps.back(), target))
      throw std::invalid_argument("refine_chain: chain does not lie above bottom");
    while (seq.steps.back() != target) {
      std::optional<ElementId> next;
      for (auto c : poset.upper_covers(seq.steps.back()))
        if (poset.leq(c, target) && (!next || c < *next)) next = c;
      if (!next) throw NotIncremental(poset.label(seq.steps.back()), poset.label(target));
      seq.steps.push_back(*next);
    }
  }
  return seq;
}

/// Every compact gap b <= c must be bridged by a finite covering path.
/// Always true of finite posets; the check is still carried out.
template <PointedPoset P>
Verdict check_incremental_domain(const P& poset) {
  const auto n = poset.size();
  for (ElementId b = 0; b < n; ++b) {
    std::vector<char> reached(n, 0);
    std::vector<ElementId> stack{b};
    reached[b] = 1;
    while (!stack.empty()) {
      auto x = stack.back();
      stack.pop_back();
      for (auto y : poset.upper_covers(x))
        if (!reached[y]) {
          reached[y] = 1;
          stack.push_back(y);
        }
    }
    for (ElementId c = 0; c < n; ++c)
      if (poset.leq(b, c) && !reached[c])
        return Verdict::fail("incremental-domain", "gap without covering path",
                             {{"lower", poset.label(b)}, {"upper", poset.label(c)}});
  }
  auto v = Verdict::pass("incremental-domain", "every gap is bridged by covers");
  v.data = {{"elements", n}};
  return v;
}

/// Incremental-morphism check: f weakly preserves and lifts relative covers.
template <PointedPoset Dom, PointedPoset Cod>
Verdict check_incremental_morphism(const MonotoneMap<Dom, Cod>& f) {
  if (!f.is_strict()) throw NotStrict();
  const auto& dom = f.domain();
  const auto& cod = f.codomain();
  if (auto v = check_incremental_domain(dom); !v.passed()) return v;
  if (auto v = check_incremental_domain(cod); !v.passed()) return v;

  const auto dom_covers = covers(dom);
  const auto cod_covers = covers(cod);

  // Weak preservation. Whether b < c is relative to d only matters through
  // c <= d, and the conclusion f(b), f(c) <= f(d) follows from monotonicity,
  // so d = c is the strongest instance.
  for (const auto& [b, c] : dom_covers) {
    const auto fb = f(b);
    const auto fc = f(c);
    if (fb == fc) continue;
    const auto& uc = cod.upper_covers(fb);
    if (std::find(uc.begin(), uc.end(), fc) == uc.end())
      return Verdict::fail("incremental-morphism", "relative cover not weakly preserved",
                           {{"clause", "weak-preservation"},
                            {"b", dom.label(b)},
                            {"c", dom.label(c)},
                            {"d", dom.label(c)},
                            {"f(b)", cod.label(fb)},
                            {"f(c)", cod.label(fc)}});
  }

  // Lifting: every relative cover below f(d) has a preimage cover below d.
  for (ElementId d = 0; d < dom.size(); ++d) {
    std::unordered_set<std::size_t> images;
    for (const auto& [b, c] : dom_covers)
      if (dom.leq(c, d)) images.insert(f(b) * cod.size() + f(c));
    const auto fd = f(d);
    for (const auto& [b2, c2] : cod_covers) {
      if (!cod.leq(c2, fd)) continue;
      if (!images.count(b2 * cod.size() + c2))
        return Verdict::fail("incremental-morphism", "relative cover not lifted",
                             {{"clause", "lifting"},
                              {"b'", cod.label(b2)},
                              {"c'", cod.label(c2)},
                              {"d", dom.label(d)},
                              {"f(d)", cod.label(fd)}});
    }
  }
  auto v = Verdict::pass("incremental-morphism", "weakly preserves and lifts relative covers");
  v.data = {{"domain", dom.size()}, {"codomain", cod.size()}, {"covers", dom_covers.size()}};
  return v;
}

/// All covering sequences from bottom that end at d.
template <PointedPoset P>
std::vector<CoveringSequence> covering_sequences_for(const P& poset, ElementId d,
                                                     std::size_t limit = 1'000'000) {
  std::vector<CoveringSequence> out;
  std::vector<ElementId> path{poset.bottom()};
  std::function<void()> walk = [&] {
    const auto x = path.back();
    if (x == d) {
      if (out.size() >= limit) throw std::length_error("too many covering sequences");
      out.push_back(CoveringSequence{path});
      return;
    }
    for (auto y : poset.upper_covers(x)) {
      if (!poset.leq(y, d)) continue;
      path.push_back(y);
      walk();
      path.pop_back();
    }
  };
  if (poset.leq(poset.bottom(), d)) walk();
  return out;
}

/// The causality a compact chain C with last link d induces on K(d):
/// norm(b) = min{k | b <= b_k}, and b <_C c iff norm(b) < norm(c).
struct ChainCausality {
  std::vector<ElementId> elements;    // K(d), ascending ids
  std::vector<std::size_t> norm;      // parallel to elements
  std::vector<std::pair<ElementId, ElementId>> relation;

  bool precedes(ElementId b, ElementId c) const {
    return std::binary_search(relation.begin(), relation.end(), std::make_pair(b, c));
  }
};

template <PointedPoset P>
ChainCausality chain_causality(const CompactChain& chain, const P& poset, ElementId d) {
  if (chain.links.empty() || chain.links.back() != d)
    throw std::invalid_argument("chain_causality: the last link must be d");
  ChainCausality out;
  for (ElementId b = 0; b < poset.size(); ++b) {
    if (!poset.leq(b, d)) continue;
    std::size_t k = 0;
    while (!poset.leq(b, chain.links[k])) ++k;
    out.elements.push_back(b);
    out.norm.push_back(k);
  }
  for (std::size_t i = 0; i < out.elements.size(); ++i)
    for (std::size_t j = 0; j < out.elements.size(); ++j)
      if (out.norm[i] < out.norm[j]) out.relation.emplace_back(out.elements[i], out.elements[j]);
  std::sort(out.relation.begin(), out.relation.end());
  return out;
}

}  // namespace gkahn
