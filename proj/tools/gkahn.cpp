// Command-line checker for network description files.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "gkahn/gkahn.hpp"

namespace {

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  std::string out;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    out += buf;
  }
  return out;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Checks a dataflow network against its trace and fixpoint semantics"};
  std::string path;
  std::string checks;
  std::string format = "text";
  std::size_t depth_override = 0;
  std::size_t trace_bound = 0;
  gkahn::RunOptions options;
  bool no_timing = false;
  app.add_option("file", path, "network description (JSON)")->required();
  app.add_option("--checks", checks, "comma-separated checks to run (default: all)");
  app.add_option("--format", format, "report format")->check(CLI::IsMember({"text", "json"}));
  auto* depth = app.add_option("--depth-override", depth_override, "use this depth for every stream channel");
  auto* bound = app.add_option("--trace-bound", trace_bound, "maximum events per trace");
  app.add_option("--sample", options.sample, "chains or selections sampled by expressive and jung");
  app.add_option("--seed", options.seed, "seed for sampling");
  app.add_flag("--no-timing", no_timing, "omit timings from the report");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  options.timing = !no_timing;
  options.checks = split_list(checks);

  gkahn::DocumentOptions doc_options;
  if (*depth) doc_options.depth_override = depth_override;
  if (*bound) doc_options.trace_bound = trace_bound;

  try {
    (void)gkahn::resolve_checks(options.checks);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw gkahn::SemanticError(path, "cannot open file");
    std::ostringstream text;
    text << in.rdbuf();
    const auto doc = gkahn::load_document(text.str(), path, doc_options);
    const auto report = gkahn::run_checks(doc, options, sha256_hex(text.str()));
    if (format == "json")
      std::cout << gkahn::report_json(report, options.timing).dump(2) << "\n";
    else
      std::cout << gkahn::report_text(report, options.timing);
    return report.exit_code();
  } catch (const gkahn::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const gkahn::SemanticError& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return 2;
}
