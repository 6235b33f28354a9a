#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "gkahn/event_structure.hpp"
#include "gkahn/poset.hpp"
#include "gkahn/verdict.hpp"

namespace gkahn {

class AlphabetMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DepthExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TypeMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OracleRequired : public std::runtime_error {
 public:
  OracleRequired() : std::runtime_error("dmerge needs an oracle word") {}
};

class NonMonotoneTable : public std::runtime_error {
 public:
  NonMonotoneTable(std::string lhs, std::string rhs)
      : std::runtime_error("table is not monotone: " + lhs + " <= " + rhs + " but outputs are unordered"),
        witness_(std::move(lhs), std::move(rhs)) {}
  const std::pair<std::string, std::string>& witness() const { return witness_; }

 private:
  std::pair<std::string, std::string> witness_;
};

class IncompleteTable : public std::runtime_error {
 public:
  explicit IncompleteTable(const std::string& input) : std::runtime_error("table has no entry for input " + input) {}
};

/// Words of length <= depth over a finite alphabet of single-character
/// symbols, listed by length and then in alphabet order.
class StreamDomain {
 public:
  StreamDomain() = default;
  StreamDomain(std::string alphabet, std::size_t depth) : alphabet_(std::move(alphabet)), depth_(depth) {
    for (std::size_t i = 0; i < alphabet_.size(); ++i)
      if (alphabet_.find(alphabet_[i]) != i)
        throw std::invalid_argument(std::string("repeated alphabet symbol '") + alphabet_[i] + "'");
    words_.push_back("");
    std::size_t begin = 0;
    for (std::size_t len = 1; len <= depth_; ++len) {
      const auto end = words_.size();
      for (auto i = begin; i < end; ++i)
        for (char c : alphabet_) words_.push_back(words_[i] + c);
      begin = end;
      if (words_.size() > 1'000'000) throw std::length_error("stream domain too large");
    }
    for (std::size_t i = 0; i < words_.size(); ++i) index_.emplace(words_[i], i);
  }

  const std::string& alphabet() const { return alphabet_; }
  std::size_t depth() const { return depth_; }
  const std::vector<std::string>& words() const { return words_; }
  std::size_t size() const { return words_.size(); }

  bool has_symbol(char c) const { return alphabet_.find(c) != std::string::npos; }

  std::optional<std::size_t> index_of(const std::string& word) const {
    auto it = index_.find(word);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Checks the alphabet, then cuts the word at the depth. The flag reports
  /// whether anything was cut.
  std::pair<std::string, bool> truncate(const std::string& word) const {
    for (char c : word)
      if (!has_symbol(c))
        throw AlphabetMismatch(std::string("symbol '") + c + "' is not in the alphabet {" + alphabet_ + "}");
    if (word.size() <= depth_) return {word, false};
    return {word.substr(0, depth_), true};
  }

 private:
  std::string alphabet_;
  std::size_t depth_ = 0;
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline bool is_prefix(const std::string& a, const std::string& b) {
  return a.size() <= b.size() && b.compare(0, a.size(), a) == 0;
}

inline std::string word_label(const std::string& w) { return w.empty() ? "ε" : w; }

/// Truncated stream cpo with the prefix order.
inline FinitePointedPoset stream_poset(const std::string& alphabet, std::size_t depth) {
  const StreamDomain dom(alphabet, depth);
  std::vector<std::string> labels;
  for (const auto& w : dom.words()) labels.push_back(word_label(w));
  return FinitePointedPoset::from_order(
      std::move(labels), [&](ElementId a, ElementId b) { return is_prefix(dom.words()[a], dom.words()[b]); });
}

/// Event (s, sd) is named by the word sd. Events are ordered by prefix and
/// consistent iff pairwise comparable. Event k is word k + 1 of the domain.
inline EventStructure stream_es(const std::string& alphabet, std::size_t depth) {
  const StreamDomain dom(alphabet, depth);
  std::vector<std::string> names(dom.words().begin() + 1, dom.words().end());
  std::vector<std::pair<EventId, EventId>> causality;
  std::vector<Bitset> forbidden;
  const auto n = names.size();
  for (EventId e = 0; e < n; ++e) {
    const auto& w = names[e];
    if (w.size() > 1) causality.emplace_back(*dom.index_of(w.substr(0, w.size() - 1)) - 1, e);
    for (EventId f = e + 1; f < n; ++f)
      if (!is_prefix(w, names[f]) && !is_prefix(names[f], w)) forbidden.push_back(make_bitset(n, {e, f}));
  }
  return EventStructure::from_ids(std::move(names), causality, std::move(forbidden));
}

/// The longest word among the events of a stream configuration.
inline std::string word_of_config(const EventStructure& es, const Bitset& x) {
  std::string best;
  for (auto e = x.find_first(); e != Bitset::npos; e = x.find_next(e))
    if (es.name(e).size() > best.size()) best = es.name(e);
  return best;
}

/// x -> longest word is an order isomorphism from the configurations of
/// stream_es onto the truncated stream poset.
inline Verdict check_stream_iso(const std::string& alphabet, std::size_t depth) {
  const auto es = stream_es(alphabet, depth);
  const auto configs = config_poset(es);
  const StreamDomain dom(alphabet, depth);
  const auto words = stream_poset(alphabet, depth);
  std::vector<ElementId> image(configs.configs.size());
  std::vector<char> hit(dom.size(), 0);
  for (std::size_t i = 0; i < configs.configs.size(); ++i) {
    const auto w = word_of_config(es, configs.configs[i]);
    image[i] = *dom.index_of(w);
    if (hit[image[i]]++)
      return Verdict::fail("stream-iso", "two configurations map to the same word",
                           {{"configuration", es.config_label(configs.configs[i])}, {"word", w}});
  }
  if (configs.configs.size() != dom.size())
    return Verdict::fail("stream-iso", "map is not onto the words",
                         {{"configurations", configs.configs.size()}, {"words", dom.size()}});
  for (std::size_t i = 0; i < image.size(); ++i)
    for (std::size_t j = 0; j < image.size(); ++j)
      if (configs.poset->leq(i, j) != words.leq(image[i], image[j]))
        return Verdict::fail("stream-iso", "map does not preserve and reflect the order",
                             {{"x", es.config_label(configs.configs[i])}, {"y", es.config_label(configs.configs[j])}});
  auto v = Verdict::pass("stream-iso", std::to_string(dom.size()) + " configurations match " +
                                           std::to_string(dom.size()) + " words");
  v.data = {{"alphabet", alphabet}, {"depth", depth}, {"elements", dom.size()}};
  return v;
}

/// dmerge(a:x, y, 0:o) = a : dmerge(x, y, o) and symmetrically for 1.
/// Output stops when the oracle runs out or selects an exhausted input.
inline std::string dmerge(const std::string& x, const std::string& y, const std::string& oracle) {
  std::string out;
  std::size_t i = 0;
  std::size_t j = 0;
  for (char o : oracle) {
    if (o == '0') {
      if (i == x.size()) break;
      out += x[i++];
    } else if (o == '1') {
      if (j == y.size()) break;
      out += y[j++];
    } else {
      throw AlphabetMismatch(std::string("oracle symbol '") + o + "' is not 0 or 1");
    }
  }
  return out;
}

struct OracleSet {
  std::vector<std::string> oracles;

  /// Words using both symbols: the finite stand-in for fair oracles.
  OracleSet fair() const {
    OracleSet out;
    for (const auto& o : oracles)
      if (o.find('0') != std::string::npos && o.find('1') != std::string::npos) out.oracles.push_back(o);
    return out;
  }
};

inline OracleSet enumerate_oracles(std::size_t depth) { return OracleSet{StreamDomain("01", depth).words()}; }

/// One channel of a model: its event structure, configuration domain and,
/// for stream channels, the word view of its configurations.
struct Channel {
  std::string name;
  EventStructure es;
  ConfigurationDomain values;
  std::optional<StreamDomain> stream;

  static Channel of_stream(std::string name, const std::string& alphabet, std::size_t depth) {
    Channel c;
    c.name = std::move(name);
    c.es = stream_es(alphabet, depth);
    c.values = config_poset(c.es);
    c.stream = StreamDomain(alphabet, depth);
    return c;
  }

  static Channel of_structure(std::string name, EventStructure es) {
    Channel c;
    c.name = std::move(name);
    c.es = std::move(es);
    c.values = config_poset(c.es);
    return c;
  }

  /// Value id of a word (stream channels).
  ElementId word_value(const std::string& word) const {
    if (!stream) throw TypeMismatch("channel '" + name + "' does not carry a stream");
    for (char c : word)
      if (!stream->has_symbol(c))
        throw AlphabetMismatch(std::string("symbol '") + c + "' is not in the alphabet of channel '" + name + "'");
    if (word.size() > stream->depth())
      throw DepthExceeded("word '" + word + "' is longer than the depth of channel '" + name + "'");
    Bitset x = es.empty_set();
    for (std::size_t len = 1; len <= word.size(); ++len) x.set(*stream->index_of(word.substr(0, len)) - 1);
    return values.id_of(x);
  }

  std::string word(ElementId v) const { return word_of_config(es, values.configs[v]); }

  /// Value id of a configuration given by event names.
  ElementId events_value(const std::vector<std::string>& events) const {
    Bitset x = es.empty_set();
    for (const auto& n : events) {
      auto e = es.find(n);
      if (!e) throw TypeMismatch("channel '" + name + "' has no event '" + n + "'");
      x.set(*e);
    }
    auto it = values.index.find(x);
    if (it == values.index.end()) throw TypeMismatch(es.config_label(x) + " is not a configuration of '" + name + "'");
    return it->second;
  }

  std::vector<std::string> events(ElementId v) const {
    std::vector<std::string> out;
    for (auto e : members(values.configs[v])) out.push_back(es.name(e));
    return out;
  }

  std::string value_label(ElementId v) const { return stream ? word_label(word(v)) : es.config_label(values.configs[v]); }

  nlohmann::json value_json(ElementId v) const {
    if (stream) return word(v);
    return events(v);
  }

  bool is_maximal(ElementId v) const { return values.poset->upper_covers(v).empty(); }
};

/// A channel value as written in a function spec: a word for stream
/// channels, a list of event names otherwise.
using ValueSpec = std::variant<std::string, std::vector<std::string>>;
using Assignment = std::map<std::string, ValueSpec>;

struct ConstSpec {
  Assignment values;
};
struct PrependSpec {
  std::string word;
  std::string from;
  std::vector<std::string> to;
};
struct MapSpec {
  std::map<char, char> mapping;
  std::string from;
  std::vector<std::string> to;
};
struct CopySpec {
  std::string from;
  std::vector<std::string> to;
};
struct DmergeSpec {
  std::string left;
  std::string right;
  std::string to;
  std::optional<std::string> oracle;
};
struct TableSpec {
  std::vector<std::pair<Assignment, Assignment>> entries;
};

/// Output channels a spec leaves unmentioned receive the empty value.
using StreamFunctionSpec = std::variant<ConstSpec, PrependSpec, MapSpec, CopySpec, DmergeSpec, TableSpec>;

struct CompiledFunction {
  MonotoneMap<ProductPoset> map;
  bool saturates = false;  // some output was cut at a channel depth
};

inline std::shared_ptr<const ProductPoset> value_product(const std::vector<const Channel*>& channels) {
  std::vector<std::shared_ptr<const FinitePointedPoset>> parts;
  for (const auto* c : channels) parts.push_back(c->values.poset);
  return std::make_shared<const ProductPoset>(std::move(parts));
}

namespace detail {

inline std::size_t channel_slot(const std::vector<const Channel*>& channels, const std::string& name,
                                const char* role) {
  for (std::size_t k = 0; k < channels.size(); ++k)
    if (channels[k]->name == name) return k;
  throw TypeMismatch("'" + name + "' is not an " + role + " channel of this node");
}

inline ElementId parse_value(const Channel& c, const ValueSpec& v) {
  if (const auto* w = std::get_if<std::string>(&v)) return c.word_value(*w);
  return c.events_value(std::get<std::vector<std::string>>(v));
}

/// Writes a word into an output slot, cutting it at the channel depth.
inline void put_word(const Channel& c, std::vector<ElementId>& out, std::size_t slot, const std::string& word,
                     bool& saturated) {
  if (!c.stream) throw TypeMismatch("channel '" + c.name + "' does not carry a stream");
  auto [cut, was_cut] = c.stream->truncate(word);
  saturated = saturated || was_cut;
  out[slot] = c.word_value(cut);
}

inline const std::string& stream_word(const Channel& c, ElementId v, std::string& buffer) {
  if (!c.stream) throw TypeMismatch("channel '" + c.name + "' does not carry a stream");
  buffer = c.word(v);
  return buffer;
}

}  // namespace detail

/// Tabulates a spec over the product of its input value posets. The
/// monotonicity of the result is checked on construction.
inline CompiledFunction compile_function(const StreamFunctionSpec& spec, const std::vector<const Channel*>& inputs,
                                         const std::vector<const Channel*>& outputs) {
  auto dom = value_product(inputs);
  auto cod = value_product(outputs);
  std::vector<ElementId> table(dom->size());
  bool saturated = false;

  auto bottoms = [&] {
    std::vector<ElementId> out(outputs.size());
    for (std::size_t k = 0; k < outputs.size(); ++k) out[k] = outputs[k]->values.poset->bottom();
    return out;
  };
  auto targets = [&](const std::vector<std::string>& names) {
    std::vector<std::size_t> slots;
    for (const auto& n : names) slots.push_back(detail::channel_slot(outputs, n, "output"));
    return slots;
  };

  if (const auto* s = std::get_if<TableSpec>(&spec)) {
    std::vector<char> seen(dom->size(), 0);
    for (const auto& [in, out] : s->entries) {
      std::vector<ElementId> x(inputs.size());
      for (std::size_t k = 0; k < inputs.size(); ++k) x[k] = inputs[k]->values.poset->bottom();
      for (const auto& [name, value] : in) {
        const auto slot = detail::channel_slot(inputs, name, "input");
        x[slot] = detail::parse_value(*inputs[slot], value);
      }
      std::vector<ElementId> y = bottoms();
      for (const auto& [name, value] : out) {
        const auto slot = detail::channel_slot(outputs, name, "output");
        y[slot] = detail::parse_value(*outputs[slot], value);
      }
      const auto xi = dom->compose(x);
      if (seen[xi] && table[xi] != cod->compose(y))
        throw TypeMismatch("table has conflicting entries for input " + dom->label(xi));
      seen[xi] = 1;
      table[xi] = cod->compose(y);
    }
    for (ElementId x = 0; x < dom->size(); ++x)
      if (!seen[x]) throw IncompleteTable(dom->label(x));
    try {
      return CompiledFunction{MonotoneMap<ProductPoset>(dom, cod, std::move(table)), false};
    } catch (const NotMonotone& e) {
      throw NonMonotoneTable(e.witness().first, e.witness().second);
    }
  }

  std::string a;
  std::string b;
  for (ElementId xi = 0; xi < dom->size(); ++xi) {
    const auto x = dom->coordinates(xi);
    auto y = bottoms();
    std::visit(
        [&](const auto& s) {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, ConstSpec>) {
            for (const auto& [name, value] : s.values) {
              const auto slot = detail::channel_slot(outputs, name, "output");
              y[slot] = detail::parse_value(*outputs[slot], value);
            }
          } else if constexpr (std::is_same_v<S, PrependSpec>) {
            const auto in = detail::channel_slot(inputs, s.from, "input");
            const auto& w = detail::stream_word(*inputs[in], x[in], a);
            for (auto slot : targets(s.to)) detail::put_word(*outputs[slot], y, slot, s.word + w, saturated);
          } else if constexpr (std::is_same_v<S, MapSpec>) {
            const auto in = detail::channel_slot(inputs, s.from, "input");
            std::string mapped;
            for (char c : detail::stream_word(*inputs[in], x[in], a)) {
              auto it = s.mapping.find(c);
              if (it == s.mapping.end())
                throw AlphabetMismatch(std::string("map has no image for symbol '") + c + "'");
              mapped += it->second;
            }
            for (auto slot : targets(s.to)) detail::put_word(*outputs[slot], y, slot, mapped, saturated);
          } else if constexpr (std::is_same_v<S, CopySpec>) {
            const auto in = detail::channel_slot(inputs, s.from, "input");
            for (auto slot : targets(s.to)) {
              if (inputs[in]->stream) {
                detail::put_word(*outputs[slot], y, slot, inputs[in]->word(x[in]), saturated);
              } else {
                y[slot] = outputs[slot]->events_value(inputs[in]->events(x[in]));
              }
            }
          } else if constexpr (std::is_same_v<S, DmergeSpec>) {
            if (!s.oracle) throw OracleRequired();
            const auto l = detail::channel_slot(inputs, s.left, "input");
            const auto r = detail::channel_slot(inputs, s.right, "input");
            const auto slot = detail::channel_slot(outputs, s.to, "output");
            const auto& xl = detail::stream_word(*inputs[l], x[l], a);
            const auto& xr = detail::stream_word(*inputs[r], x[r], b);
            detail::put_word(*outputs[slot], y, slot, dmerge(xl, xr, *s.oracle), saturated);
          }
        },
        spec);
    table[xi] = cod->compose(y);
  }
  return CompiledFunction{MonotoneMap<ProductPoset>(dom, cod, std::move(table)), saturated};
}

}  // namespace gkahn
