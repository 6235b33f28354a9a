#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace gkahn {

enum class Status { pass, fail, vacuous, skipped };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::vacuous: return "vacuous";
    case Status::skipped: return "skipped";
  }
  return "?";
}

/// Outcome of one law or theorem check. A failing verdict always carries a
/// counterexample that can be replayed against the same inputs.
struct Verdict {
  std::string name;
  Status status = Status::pass;
  std::string message;
  std::vector<std::string> warnings;
  nlohmann::json counterexample;  // null unless status == fail
  nlohmann::json data;            // check-specific payload (value sets, counts)

  bool passed() const { return status != Status::fail; }

  static Verdict pass(std::string name, std::string message = {}) {
    Verdict v;
    v.name = std::move(name);
    v.message = std::move(message);
    return v;
  }

  static Verdict fail(std::string name, std::string message, nlohmann::json counterexample) {
    Verdict v;
    v.name = std::move(name);
    v.status = Status::fail;
    v.message = std::move(message);
    v.counterexample = std::move(counterexample);
    return v;
  }
};

}  // namespace gkahn
