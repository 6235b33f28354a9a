#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gkahn/causality.hpp"
#include "gkahn/document.hpp"
#include "gkahn/model.hpp"
#include "gkahn/network.hpp"
#include "gkahn/pomset.hpp"
#include "gkahn/streams.hpp"
#include "gkahn/verdict.hpp"

namespace gkahn {

inline constexpr const char* tool_version = "0.1.0";
inline constexpr const char* report_format = "gkahn-report/1";

/// Every check the runner knows, in the order they run.
inline const std::vector<std::string>& all_checks() {
  static const std::vector<std::string> names{"axioms",   "incremental", "stream-iso", "pomset-iso", "covseq-iso",
                                              "computes", "gkp",         "safety",     "liveness",   "expressive",
                                              "jung",     "lemma1",      "global-char"};
  return names;
}

struct RunOptions {
  std::vector<std::string> checks;  // empty: all
  std::size_t sample = 200;
  std::uint64_t seed = 1;
  bool timing = true;
};

/// Orders a selection by the canonical check order; unknown names throw.
inline std::vector<std::string> resolve_checks(const std::vector<std::string>& requested) {
  if (requested.empty()) return all_checks();
  for (const auto& r : requested)
    if (std::find(all_checks().begin(), all_checks().end(), r) == all_checks().end())
      throw std::invalid_argument("unknown check '" + r + "'");
  std::vector<std::string> out;
  for (const auto& c : all_checks())
    if (std::find(requested.begin(), requested.end(), c) != requested.end()) out.push_back(c);
  return out;
}

struct CheckResult {
  Verdict verdict;
  double millis = 0;
};

struct Report {
  std::string path;
  std::string digest;
  std::string model;
  std::vector<CheckResult> results;

  int exit_code() const {
    for (const auto& r : results)
      if (r.verdict.status == Status::fail) return 1;
    return 0;
  }
};

namespace detail {

/// Removes the canonically last trace among those not strictly below any
/// other trace of the process.
inline Process drop_maximal(const Process& p) {
  Process out = p;
  for (std::size_t i = out.traces.size(); i-- > 0;) {
    const auto& t = out.traces[i];
    bool maximal = true;
    for (const auto& u : out.traces)
      if (u != t && trace_leq(t, u)) {
        maximal = false;
        break;
      }
    if (maximal) {
      out.traces.erase(out.traces.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  return out;
}

/// Lazily computed artefacts shared by the checks of one run.
class RunContext {
 public:
  explicit RunContext(const Document& doc) : doc_(doc) {}

  const ModelInstance& model() const { return doc_.model; }
  const Network& net() const { return doc_.network; }

  const Process& reference(std::size_t j) {
    if (reference_.empty()) reference_.resize(net().nodes().size());
    if (!reference_[j]) reference_[j] = process_computing(model(), net().nodes()[j]);
    return *reference_[j];
  }

  /// The node's process after any mutation the document requests.
  const Process& process(std::size_t j) {
    if (process_.empty()) process_.resize(net().nodes().size());
    if (!process_[j]) {
      const auto& node = net().nodes()[j];
      Process p = reference(j);
      auto it = doc_.mutations.find(node.name);
      if (it != doc_.mutations.end()) {
        if (it->second.kind == "inject") {
          p.traces.push_back(model().restrict_to_mask(trace_from_json(it->second.trace, model().es()), node.mask));
          p.normalize();
        } else {
          p = drop_maximal(p);
        }
      }
      process_[j] = std::move(p);
    }
    return *process_[j];
  }

  /// The network process: found by search, or by literal composition of
  /// the node processes when some node is mutated.
  const Process& network_process() {
    if (!network_) {
      if (doc_.mutations.empty()) {
        std::vector<const Node*> nodes;
        for (const auto& n : net().nodes()) nodes.push_back(&n);
        network_ = compose_by_search(model(), nodes, net().sort());
      } else {
        std::vector<Process> parts;
        for (std::size_t j = 0; j < net().nodes().size(); ++j) parts.push_back(process(j));
        network_ = compose(model(), parts, domain(net().sort()));
      }
    }
    return *network_;
  }

  const KahnSemantics& kahn() {
    if (!kahn_) kahn_ = build_kahn(model(), net());
    return *kahn_;
  }

  const GkpResult& gkp() {
    if (!gkp_) gkp_ = gkp_check(model(), net(), network_process(), kahn());
    return *gkp_;
  }

  const TraceDomain& domain(const Sort& sort) {
    auto it = domains_.find(sort);
    if (it == domains_.end()) it = domains_.emplace(sort, model().trace_domain(sort)).first;
    return it->second;
  }

  /// Subsorts of the network sort whose trace domains fit the bounds; the
  /// rest are named in `skipped`.
  const std::vector<Sort>& fitting_sorts(std::vector<std::string>& skipped) {
    if (!fitting_) {
      fitting_.emplace();
      for (const auto& s : subsorts(net().sort())) {
        try {
          (void)domain(s);
          fitting_->push_back(s);
        } catch (const BoundExceeded& e) {
          skipped_sorts_.push_back(sort_label(s) + ": " + e.what());
        }
      }
    }
    skipped = skipped_sorts_;
    return *fitting_;
  }

  static std::string sort_label(const Sort& s) {
    std::string out = "{";
    for (const auto& c : s) out += (out.size() > 1 ? "," : "") + c;
    return out + "}";
  }

 private:
  const Document& doc_;
  std::vector<std::optional<Process>> reference_;
  std::vector<std::optional<Process>> process_;
  std::optional<Process> network_;
  std::optional<KahnSemantics> kahn_;
  std::optional<GkpResult> gkp_;
  std::map<Sort, TraceDomain> domains_;
  std::optional<std::vector<Sort>> fitting_;
  std::vector<std::string> skipped_sorts_;
};

/// One verdict summarizing several: the first failure, or a pass whose
/// data lists the parts.
inline Verdict combine(const std::string& name, const std::vector<Verdict>& parts, const std::string& what) {
  Verdict out = Verdict::pass(name);
  nlohmann::json data = nlohmann::json::array();
  for (const auto& p : parts) {
    out.warnings.insert(out.warnings.end(), p.warnings.begin(), p.warnings.end());
    if (p.status == Status::fail) {
      auto f = p;
      f.name = name;
      f.warnings = out.warnings;
      return f;
    }
    data.push_back({{"status", to_string(p.status)}, {"message", p.message}, {"data", p.data}});
  }
  out.message = what + " checked: " + std::to_string(parts.size());
  out.data = {{"parts", data}};
  if (parts.empty()) {
    out.status = Status::vacuous;
    out.message = "no " + what + " to check";
  }
  return out;
}

inline Verdict skipped(const std::string& name, const std::string& why) {
  Verdict v = Verdict::pass(name, why);
  v.status = Status::skipped;
  return v;
}

inline Verdict run_one(const std::string& name, RunContext& ctx, const RunOptions& options) {
  const auto& model = ctx.model();
  const auto& net = ctx.net();
  if (name == "axioms" || name == "incremental") {
    std::vector<std::string> skipped_sorts;
    const auto& sorts = ctx.fitting_sorts(skipped_sorts);
    if (sorts.empty()) return skipped(name, "no subsort fits the bounds");
    auto v = name == "axioms" ? check_model_axioms(model, sorts) : check_restrictions_incremental(model, sorts);
    for (const auto& s : skipped_sorts) v.warnings.push_back("sort skipped: " + s);
    return v;
  }
  if (name == "stream-iso") {
    std::vector<Verdict> parts;
    for (const auto& c : model.channels())
      if (c.stream) {
        auto v = check_stream_iso(c.stream->alphabet(), c.stream->depth());
        v.data["channel"] = c.name;
        parts.push_back(std::move(v));
      }
    return combine(name, parts, "stream channels");
  }
  if (name == "pomset-iso") {
    std::vector<std::string> skipped_sorts;
    const auto& sorts = ctx.fitting_sorts(skipped_sorts);
    std::vector<Verdict> parts;
    for (const auto& s : sorts) {
      if (s.empty() || !model.is_stream_sort(s)) continue;
      auto v = check_pomset_iso(ctx.domain(s), model.universe(), model.signature(s), model.bounds().trace_events);
      v.data["sort"] = sort_json(s);
      parts.push_back(std::move(v));
    }
    auto v = combine(name, parts, "stream sorts");
    for (const auto& s : skipped_sorts) v.warnings.push_back("sort skipped: " + s);
    return v;
  }
  if (name == "covseq-iso") {
    std::vector<Verdict> parts;
    for (const auto& c : model.channels()) {
      try {
        auto v = check_covseq_iso(c.es, model.bounds().trace_events, model.bounds().max_domain);
        v.data["channel"] = c.name;
        parts.push_back(std::move(v));
      } catch (const BoundExceeded& e) {
        auto v = skipped(name, e.what());
        v.warnings.push_back("channel '" + c.name + "' skipped: " + e.what());
        parts.push_back(std::move(v));
      }
    }
    return combine(name, parts, "channels");
  }
  if (name == "computes" || name == "lemma1") {
    std::vector<Verdict> parts;
    for (std::size_t j = 0; j < net.nodes().size(); ++j) {
      const auto& node = net.nodes()[j];
      parts.push_back(name == "computes" ? computes_check(model, node, ctx.process(j), ctx.reference(j))
                                         : lemma1_check(model, node, ctx.process(j)));
    }
    return combine(name, parts, "nodes");
  }
  if (name == "gkp") return ctx.gkp().gkp;
  if (name == "safety") return ctx.gkp().safety;
  if (name == "liveness") return ctx.gkp().liveness;
  if (name == "expressive") return check_causally_expressive(model, net.sort(), options.sample, options.seed);
  if (name == "jung") return check_jung(model, net, ctx.kahn(), options.sample, options.seed);
  if (name == "global-char") return global_characterization_check(model, net, ctx.network_process());
  throw std::invalid_argument("unknown check '" + name + "'");
}

}  // namespace detail

/// Runs the selected checks in canonical order. A check that runs out of
/// bounds is reported as skipped rather than failed.
inline Report run_checks(const Document& doc, const RunOptions& options, const std::string& digest = {}) {
  Report report;
  report.path = doc.path;
  report.digest = digest;
  report.model = to_string(doc.model.kind());
  detail::RunContext ctx(doc);
  for (const auto& name : resolve_checks(options.checks)) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = detail::run_one(name, ctx, options);
    } catch (const BoundExceeded& e) {
      v = detail::skipped(name, e.what());
    }
    v.name = name;
    const auto stop = std::chrono::steady_clock::now();
    report.results.push_back({std::move(v), std::chrono::duration<double, std::milli>(stop - start).count()});
  }
  return report;
}

inline nlohmann::json report_json(const Report& report, bool timing) {
  nlohmann::json checks = nlohmann::json::array();
  std::map<std::string, std::size_t> summary{{"pass", 0}, {"fail", 0}, {"vacuous", 0}, {"skipped", 0}};
  for (const auto& r : report.results) {
    const auto& v = r.verdict;
    nlohmann::json c{{"name", v.name},
                     {"status", to_string(v.status)},
                     {"message", v.message},
                     {"warnings", v.warnings},
                     {"data", v.data}};
    if (v.status == Status::fail) c["counterexample"] = v.counterexample;
    if (timing) c["timing_ms"] = r.millis;
    checks.push_back(std::move(c));
    ++summary[to_string(v.status)];
  }
  return {{"tool", "gkahn"},
          {"version", tool_version},
          {"format", report_format},
          {"input", {{"path", report.path}, {"sha256", report.digest}}},
          {"model", report.model},
          {"checks", checks},
          {"summary", summary},
          {"exit_code", report.exit_code()}};
}

inline std::string report_text(const Report& report, bool timing) {
  std::ostringstream out;
  out << "gkahn " << tool_version << "  " << report.path << "  (" << report.model << " model)\n";
  for (const auto& r : report.results) {
    const auto& v = r.verdict;
    std::string status = to_string(v.status);
    std::transform(status.begin(), status.end(), status.begin(), [](unsigned char c) { return std::toupper(c); });
    out << status;
    for (auto i = status.size(); i < 8; ++i) out << ' ';
    out << v.name;
    for (auto i = v.name.size(); i < 13; ++i) out << ' ';
    out << v.message;
    if (timing) {
      std::ostringstream ms;
      ms.setf(std::ios::fixed);
      ms.precision(1);
      ms << r.millis;
      out << "  [" << ms.str() << " ms]";
    }
    out << "\n";
    for (const auto& w : v.warnings) out << "        warning: " << w << "\n";
    if (v.status == Status::fail) out << "        counterexample: " << v.counterexample.dump() << "\n";
  }
  std::size_t failed = 0;
  for (const auto& r : report.results) failed += r.verdict.status == Status::fail;
  out << report.results.size() << " checks, " << failed << " failed\n";
  return out.str();
}

}  // namespace gkahn
