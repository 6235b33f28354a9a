#include <catch_amalgamated.hpp>

#include <set>

#include "support.hpp"

using namespace gkahn;

namespace {

bool is_subsequence(const std::string& small, const std::string& big) {
  std::size_t i = 0;
  for (char c : big)
    if (i < small.size() && small[i] == c) ++i;
  return i == small.size();
}

/// Output of a one-input, one-output function at the given input word.
std::string apply_word(const CompiledFunction& f, const Channel& in, const Channel& out, const std::string& word) {
  const ElementId x = f.map.domain().compose(std::vector<ElementId>{in.word_value(word)});
  return out.word(f.map.codomain().coordinate(f.map(x), 0));
}

}  // namespace

TEST_CASE("stream domains list words by length") {
  StreamDomain d("01", 2);
  CHECK(d.words() == std::vector<std::string>{"", "0", "1", "00", "01", "10", "11"});
  CHECK(d.truncate("0110") == std::pair<std::string, bool>{"01", true});
  CHECK(d.truncate("1") == std::pair<std::string, bool>{"1", false});
  CHECK_THROWS_AS(d.truncate("2"), AlphabetMismatch);
  CHECK_THROWS_AS(StreamDomain("00", 1), std::invalid_argument);
  CHECK(StreamDomain("", 3).size() == 1);
}

TEST_CASE("stream event structures") {
  auto es = stream_es("01", 2);
  CHECK(es.size() == 6);
  CHECK(es.leq(*es.find("0"), *es.find("01")));
  CHECK(es.conflicts(*es.find("0")).test(*es.find("1")));
  CHECK(es.conflicts(*es.find("0")).test(*es.find("10")));
  CHECK(configurations(es).size() == 7);
  CHECK(word_of_config(es, make_bitset(6, {*es.find("1"), *es.find("10")})) == "10");
}

TEST_CASE("stream configurations are isomorphic to words") {
  for (const std::string alphabet : {"0", "01", "abc"})
    for (std::size_t depth = 0; depth <= 3; ++depth) {
      auto v = check_stream_iso(alphabet, depth);
      INFO(alphabet << " depth " << depth << ": " << v.message);
      CHECK(v.status == Status::pass);
    }
  CHECK(check_stream_iso("01", 0).data["elements"] == 1);
}

TEST_CASE("dmerge follows the oracle") {
  CHECK(dmerge("ab", "cd", "0101") == "acbd");
  CHECK(dmerge("ab", "cd", "0011") == "abcd");
  CHECK(dmerge("ab", "cd", "") == "");
  CHECK(dmerge("ab", "cd", "1") == "c");
  // Halts when the selected input is exhausted, even if the other has data.
  CHECK(dmerge("a", "cd", "001") == "a");
  CHECK(dmerge("", "cd", "01") == "");
  CHECK_THROWS_AS(dmerge("a", "b", "02"), AlphabetMismatch);
}

TEST_CASE("full-length oracles give every interleaving once") {
  const std::string x = "ab";
  const std::string y = "cde";
  std::set<std::string> outputs;
  std::size_t full = 0;
  for (const auto& o : enumerate_oracles(x.size() + y.size()).oracles) {
    if (o.size() != x.size() + y.size()) continue;
    if (std::count(o.begin(), o.end(), '0') != static_cast<long>(x.size())) continue;
    ++full;
    const auto w = dmerge(x, y, o);
    CHECK(w.size() == 5);
    CHECK(is_subsequence(x, w));
    CHECK(is_subsequence(y, w));
    outputs.insert(w);
  }
  CHECK(full == 10);
  CHECK(outputs.size() == 10);
}

TEST_CASE("oracle sets") {
  auto all = enumerate_oracles(2);
  CHECK(all.oracles.size() == 7);
  CHECK(all.fair().oracles == std::vector<std::string>{"01", "10"});
}

TEST_CASE("compiled stream functions") {
  auto x = Channel::of_stream("x", "01", 2);
  auto y = Channel::of_stream("y", "01", 2);

  SECTION("prepend cuts at the depth") {
    auto f = compile_function(PrependSpec{"0", "x", {"y"}}, {&x}, {&y});
    CHECK(f.saturates);
    CHECK(apply_word(f, x, y, "") == "0");
    CHECK(apply_word(f, x, y, "1") == "01");
    CHECK(apply_word(f, x, y, "11") == "01");
  }
  SECTION("map and copy") {
    auto neg = compile_function(MapSpec{{{'0', '1'}, {'1', '0'}}, "x", {"y"}}, {&x}, {&y});
    CHECK_FALSE(neg.saturates);
    CHECK(apply_word(neg, x, y, "01") == "10");
    auto copy = compile_function(CopySpec{"x", {"y"}}, {&x}, {&y});
    for (const auto& w : x.stream->words()) CHECK(apply_word(copy, x, y, w) == w);
  }
  SECTION("constants ignore the input") {
    auto f = compile_function(ConstSpec{{{"y", std::string("10")}}}, {&x}, {&y});
    for (const auto& w : x.stream->words()) CHECK(apply_word(f, x, y, w) == "10");
    CHECK_THROWS_AS(compile_function(ConstSpec{{{"y", std::string("100")}}}, {&x}, {&y}), DepthExceeded);
    CHECK_THROWS_AS(compile_function(ConstSpec{{{"y", std::string("2")}}}, {&x}, {&y}), AlphabetMismatch);
    CHECK_THROWS_AS(compile_function(ConstSpec{{{"q", std::string("1")}}}, {&x}, {&y}), TypeMismatch);
  }
  SECTION("dmerge needs an oracle") {
    auto z = Channel::of_stream("z", "01", 4);
    CHECK_THROWS_AS(compile_function(DmergeSpec{"x", "y", "z", std::nullopt}, {&x, &y}, {&z}), OracleRequired);
    auto f = compile_function(DmergeSpec{"x", "y", "z", "0101"}, {&x, &y}, {&z});
    const auto in = f.map.domain().compose(std::vector<ElementId>{x.word_value("01"), y.word_value("10")});
    CHECK(z.word(f.map(in)) == "0110");
  }
  SECTION("tables must be total and monotone") {
    auto a = Channel::of_stream("a", "1", 1);
    auto b = Channel::of_stream("b", "1", 1);
    std::vector<std::pair<Assignment, Assignment>> rows{
        {{}, {}}, {{{"a", std::string("1")}}, {{"b", std::string("1")}}}};
    auto id = compile_function(TableSpec{rows}, {&a}, {&b});
    CHECK(apply_word(id, a, b, "1") == "1");
    CHECK_THROWS_AS(compile_function(TableSpec{{rows[1]}}, {&a}, {&b}), IncompleteTable);
    std::vector<std::pair<Assignment, Assignment>> flipped{
        {{}, {{"b", std::string("1")}}}, {{{"a", std::string("1")}}, {}}};
    CHECK_THROWS_AS(compile_function(TableSpec{flipped}, {&a}, {&b}), NonMonotoneTable);
  }
}
