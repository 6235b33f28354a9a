#pragma once

#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gkahn/event_structure.hpp"
#include "gkahn/model.hpp"
#include "gkahn/network.hpp"
#include "gkahn/streams.hpp"
#include "gkahn/trace.hpp"

namespace gkahn {

inline constexpr const char* document_format = "gkahn-network/1";

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : std::runtime_error("parse error at line " + std::to_string(line) + ", column " + std::to_string(column) +
                           ": " + what),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class SemanticError : public std::runtime_error {
 public:
  SemanticError(std::string reference, std::string reason)
      : std::runtime_error(reference + ": " + reason), reference_(std::move(reference)), reason_(std::move(reason)) {}
  const std::string& reference() const { return reference_; }
  const std::string& reason() const { return reason_; }

 private:
  std::string reference_;
  std::string reason_;
};

/// A deliberate defect applied to a node's process, for negative controls.
struct NodeMutation {
  std::string kind;  // "inject" or "drop-maximal"
  nlohmann::json trace;
};

struct DocumentOptions {
  std::optional<std::size_t> depth_override;
  std::optional<std::size_t> trace_bound;
};

/// A loaded and validated network description.
struct Document {
  std::string path;
  nlohmann::json source;
  ModelInstance model;
  Network network;
  std::vector<NodeSpec> specs;
  std::map<std::string, NodeMutation> mutations;
  bool corrupt_restriction = false;
};

namespace detail {

inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t offset) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

/// Typed field access that reports the JSON path of whatever is wrong.
class Reader {
 public:
  Reader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {}

  const nlohmann::json& json() const { return j_; }
  const std::string& path() const { return path_; }

  bool has(const char* key) const { return j_.is_object() && j_.contains(key); }

  Reader at(const char* key) const {
    if (!j_.is_object()) throw SemanticError(path_, "expected an object");
    if (!j_.contains(key)) throw SemanticError(path_, std::string("missing field '") + key + "'");
    return Reader(j_.at(key), path_ + "." + key);
  }

  Reader at(std::size_t i) const { return Reader(j_.at(i), path_ + "[" + std::to_string(i) + "]"); }

  std::size_t size() const {
    if (!j_.is_array()) throw SemanticError(path_, "expected an array");
    return j_.size();
  }

  std::string str() const {
    if (!j_.is_string()) throw SemanticError(path_, "expected a string");
    return j_.get<std::string>();
  }

  std::size_t count() const {
    if (!j_.is_number_unsigned() && !(j_.is_number_integer() && j_.get<long long>() >= 0))
      throw SemanticError(path_, "expected a non-negative integer");
    return j_.get<std::size_t>();
  }

  std::vector<std::string> strings() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).str());
    return out;
  }

  /// A single name or an array of names.
  std::vector<std::string> names() const {
    if (j_.is_string()) return {str()};
    return strings();
  }

 private:
  const nlohmann::json& j_;
  std::string path_;
};

inline ValueSpec read_value(const Reader& r) {
  if (r.json().is_string()) return r.str();
  return r.strings();
}

inline Assignment read_assignment(const Reader& r) {
  if (!r.json().is_object()) throw SemanticError(r.path(), "expected an object of channel values");
  Assignment out;
  for (const auto& [key, value] : r.json().items()) out.emplace(key, read_value(Reader(value, r.path() + "." + key)));
  return out;
}

/// One JSON function entry; dmerge with an oracle family expands into one
/// spec per oracle.
inline void read_function(const Reader& r, std::vector<StreamFunctionSpec>& specs, std::vector<std::string>& labels) {
  const auto kind = r.at("kind").str();
  auto label = r.has("label") ? r.at("label").str() : std::string{};
  auto push = [&](StreamFunctionSpec s, std::string fallback) {
    specs.push_back(std::move(s));
    labels.push_back(label.empty() ? std::move(fallback) : label);
  };
  if (kind == "const") {
    ConstSpec s{read_assignment(r.at("value"))};
    std::string name = "const";
    for (const auto& [ch, v] : s.values) {
      name += " " + ch + "=";
      if (const auto* w = std::get_if<std::string>(&v)) name += word_label(*w);
      else name += "{" + std::to_string(std::get<std::vector<std::string>>(v).size()) + " events}";
    }
    push(std::move(s), name);
  } else if (kind == "prepend") {
    PrependSpec s{r.at("word").str(), r.at("from").str(), r.at("to").names()};
    push(s, "prepend " + word_label(s.word));
  } else if (kind == "map") {
    MapSpec s;
    const auto m = r.at("mapping");
    if (!m.json().is_object()) throw SemanticError(m.path(), "expected an object of symbol images");
    for (const auto& [key, value] : m.json().items()) {
      if (key.size() != 1 || !value.is_string() || value.get<std::string>().size() != 1)
        throw SemanticError(m.path() + "." + key, "symbols are single characters");
      s.mapping.emplace(key[0], value.get<std::string>()[0]);
    }
    s.from = r.at("from").str();
    s.to = r.at("to").names();
    push(std::move(s), "map");
  } else if (kind == "copy") {
    push(CopySpec{r.at("from").str(), r.at("to").names()}, "copy");
  } else if (kind == "dmerge") {
    DmergeSpec base{r.at("left").str(), r.at("right").str(), r.at("to").str(), std::nullopt};
    std::vector<std::string> oracles;
    if (r.has("oracle")) {
      oracles.push_back(r.at("oracle").str());
    } else if (r.has("oracles")) {
      const auto o = r.at("oracles");
      if (o.json().is_array()) {
        oracles = o.strings();
      } else {
        auto set = enumerate_oracles(o.at("up_to").count());
        if (o.has("fair") && o.at("fair").json().get<bool>()) set = set.fair();
        oracles = set.oracles;
      }
    }
    if (oracles.empty()) throw SemanticError(r.path(), "dmerge needs an oracle word");
    for (const auto& word : oracles) {
      for (char c : word)
        if (c != '0' && c != '1') throw SemanticError(r.path(), "oracle '" + word + "' is not a binary word");
      auto s = base;
      s.oracle = word;
      push(s, "dmerge " + word_label(word));
    }
  } else if (kind == "table") {
    TableSpec s;
    const auto entries = r.at("entries");
    for (std::size_t i = 0; i < entries.size(); ++i)
      s.entries.emplace_back(read_assignment(entries.at(i).at("input")), read_assignment(entries.at(i).at("output")));
    push(std::move(s), "table");
  } else {
    throw SemanticError(r.path() + ".kind", "unknown function kind '" + kind + "'");
  }
}

inline Channel read_channel(const Reader& r, const DocumentOptions& options) {
  const auto name = r.at("name").str();
  const auto kind = r.at("kind").str();
  if (name.empty() || name.find(':') != std::string::npos)
    throw SemanticError(r.path() + ".name", "channel names are non-empty and contain no ':'");
  if (kind == "stream") {
    std::string alphabet;
    const auto a = r.at("alphabet");
    if (a.json().is_string()) {
      alphabet = a.str();
    } else {
      for (const auto& s : a.strings()) {
        if (s.size() != 1) throw SemanticError(a.path(), "symbols are single characters");
        alphabet += s;
      }
    }
    const auto depth = options.depth_override.value_or(r.at("depth").count());
    try {
      return Channel::of_stream(name, alphabet, depth);
    } catch (const std::exception& e) {
      throw SemanticError(r.path(), e.what());
    }
  }
  if (kind == "event-structure") {
    const auto events = r.at("events").strings();
    std::vector<std::pair<std::string, std::string>> causality;
    std::vector<std::vector<std::string>> forbidden;
    if (r.has("causality")) {
      const auto c = r.at("causality");
      for (std::size_t i = 0; i < c.size(); ++i) {
        const auto pair = c.at(i).strings();
        if (pair.size() != 2) throw SemanticError(c.at(i).path(), "causality pairs have two events");
        causality.emplace_back(pair[0], pair[1]);
      }
    }
    if (r.has("forbidden")) {
      const auto f = r.at("forbidden");
      for (std::size_t i = 0; i < f.size(); ++i) forbidden.push_back(f.at(i).strings());
    }
    try {
      return Channel::of_structure(name, EventStructure::validate(events, causality, forbidden));
    } catch (const AxiomViolation& e) {
      throw SemanticError(r.path(), std::string("axiom ") + e.axiom() + ": " + e.what());
    } catch (const std::exception& e) {
      throw SemanticError(r.path(), e.what());
    }
  }
  throw SemanticError(r.path() + ".kind", "unknown channel kind '" + kind + "'");
}

}  // namespace detail

/// Validates a document held in memory. `path` is only used in reports.
inline Document load_document(const std::string& text, const std::string& path, const DocumentOptions& options = {}) {
  nlohmann::json source;
  try {
    source = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, column] = detail::line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string reason = e.what();
    if (auto at = reason.find(": ", reason.find("column")); at != std::string::npos) reason = reason.substr(at + 2);
    throw ParseError(line, column, reason);
  }
  const detail::Reader root(source, "$");
  const auto format = root.at("format").str();
  if (format != document_format)
    throw SemanticError("$.format", "expected '" + std::string(document_format) + "', got '" + format + "'");

  TraceKind kind;
  try {
    kind = parse_trace_kind(root.at("model").str());
  } catch (const std::invalid_argument& e) {
    throw SemanticError("$.model", e.what());
  }
  Bounds bounds;
  if (root.has("bounds")) {
    const auto b = root.at("bounds");
    if (b.has("trace_events")) bounds.trace_events = b.at("trace_events").count();
    if (b.has("max_domain")) bounds.max_domain = b.at("max_domain").count();
    if (b.has("max_search")) bounds.max_search = b.at("max_search").count();
  }
  if (options.trace_bound) bounds.trace_events = *options.trace_bound;
  if (bounds.trace_events > max_trace_events)
    throw SemanticError("$.bounds.trace_events", "at most " + std::to_string(max_trace_events) + " events per trace");

  std::vector<Channel> channels;
  std::set<std::string> names;
  const auto ch = root.at("channels");
  for (std::size_t i = 0; i < ch.size(); ++i) {
    channels.push_back(detail::read_channel(ch.at(i), options));
    if (!names.insert(channels.back().name).second)
      throw SemanticError(ch.at(i).path() + ".name", "duplicate channel '" + channels.back().name + "'");
  }

  std::optional<ModelInstance> model;
  try {
    model.emplace(std::move(channels), kind, bounds);
  } catch (const std::exception& e) {
    throw SemanticError("$.channels", e.what());
  }

  std::vector<NodeSpec> specs;
  std::map<std::string, NodeMutation> mutations;
  const auto nodes = root.at("nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto n = nodes.at(i);
    NodeSpec spec;
    spec.name = n.at("name").str();
    for (const auto& c : n.at("inputs").strings()) spec.inputs.insert(c);
    for (const auto& c : n.at("outputs").strings()) spec.outputs.insert(c);
    for (const auto* side : {&spec.inputs, &spec.outputs})
      for (const auto& c : *side)
        if (!names.count(c)) throw SemanticError(n.path(), "unknown channel '" + c + "'");
    for (const auto& other : specs)
      if (other.name == spec.name) throw SemanticError(n.path() + ".name", "duplicate node '" + spec.name + "'");
    const auto fs = n.at("functions");
    for (std::size_t k = 0; k < fs.size(); ++k) detail::read_function(fs.at(k), spec.functions, spec.labels);
    if (n.has("mutation")) {
      const auto m = n.at("mutation");
      NodeMutation mutation{m.at("kind").str(), nullptr};
      if (mutation.kind == "inject") {
        mutation.trace = m.at("trace").json();
      } else if (mutation.kind != "drop-maximal") {
        throw SemanticError(m.path() + ".kind", "unknown mutation '" + mutation.kind + "'");
      }
      mutations.emplace(spec.name, std::move(mutation));
    }
    specs.push_back(std::move(spec));
  }

  bool corrupt = false;
  if (root.has("mutation")) {
    const auto m = root.at("mutation");
    if (m.at("kind").str() != "corrupt-restriction")
      throw SemanticError(m.path() + ".kind", "unknown model mutation '" + m.at("kind").str() + "'");
    corrupt = true;
  }

  std::optional<Network> network;
  try {
    network = Network::build(*model, specs);
  } catch (const ProducerConditionViolated& e) {
    throw SemanticError("channel '" + e.channel() + "'",
                        "producer condition: " + std::to_string(e.count()) + " producing nodes, expected exactly 1");
  } catch (const NonMonotoneTable& e) {
    throw SemanticError("table", "monotonicity: " + e.witness().first + " <= " + e.witness().second +
                                     " but the outputs are not ordered");
  } catch (const std::exception& e) {
    throw SemanticError("$.nodes", e.what());
  }

  // Injected traces are validated now so a bad fixture is an input error.
  for (const auto& [node, mutation] : mutations)
    if (mutation.kind == "inject") {
      try {
        (void)trace_from_json(mutation.trace, model->es());
      } catch (const std::exception& e) {
        throw SemanticError("node '" + node + "' mutation", e.what());
      }
    }

  Document doc{path, std::move(source), corrupt ? model->with_restriction(causality_only_restriction) : *model,
               std::move(*network), std::move(specs), std::move(mutations), corrupt};
  return doc;
}

inline Document parse_document(const std::string& path, const DocumentOptions& options = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SemanticError(path, "cannot open file");
  std::ostringstream text;
  text << in.rdbuf();
  return load_document(text.str(), path, options);
}

}  // namespace gkahn
