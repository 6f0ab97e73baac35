#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "kgwalk/transforms.hpp"
#include "kgwalk/util.hpp"

using namespace kgwalk;

namespace {

WalkCorpus corpus_of(std::vector<std::vector<std::string>> walks) {
  WalkCorpus c;
  c.strategy = "random";
  c.depth = 4;
  c.walks = std::move(walks);
  return c;
}

}  // namespace

TEST_CASE("anonymize replaces hops by first-occurrence indices") {
  auto out = anonymize(corpus_of({{"A", "p", "B", "p", "A"}}));
  REQUIRE(out.walks.size() == 1);
  CHECK(out.walks[0] == std::vector<std::string>{"A", "1", "2", "1", "0"});

  CHECK(anonymize(corpus_of({{"A"}})).walks[0] == std::vector<std::string>{"A"});
  CHECK(anonymize(corpus_of({{"A", "p", "B"}})).walks[0] ==
        std::vector<std::string>{"A", "1", "2"});
  CHECK(anonymize(corpus_of({})).walks.empty());
}

TEST_CASE("anonymize is oblivious to non-root token renamings") {
  auto base = corpus_of({{"A", "p", "B", "q", "B"}, {"A", "r", "A", "p", "C"}});
  auto renamed = base;
  for (auto& walk : renamed.walks) {
    for (auto& token : walk) {
      if (token != "A") token = "tok_" + token;  // any bijective renaming
    }
  }
  auto a = anonymize(base);
  auto b = anonymize(renamed);
  CHECK(a.walks == b.walks);
}

TEST_CASE("walklets pair the root with each later hop") {
  auto out = walklets(corpus_of({{"A", "p", "B", "q", "C"}}));
  std::set<std::vector<std::string>> got(out.walks.begin(), out.walks.end());
  std::set<std::vector<std::string>> want{{"A", "p"}, {"A", "B"}, {"A", "q"}, {"A", "C"}};
  CHECK(got == want);
  CHECK(out.walks.size() == 4);

  CHECK(walklets(corpus_of({{"A"}})).walks.empty());

  auto dedup = walklets(corpus_of({{"A", "p", "B"}, {"A", "p", "C"}}));
  std::size_t ap = 0;
  for (const auto& w : dedup.walks) ap += w == std::vector<std::string>{"A", "p"};
  CHECK(ap == 1);
}

TEST_CASE("walklets always emit pairs, at most L-1 per walk") {
  auto out = walklets(corpus_of({{"A", "p", "B", "q", "C"}, {"Z", "p", "B"}}));
  for (const auto& w : out.walks) CHECK(w.size() == 2);
  CHECK(out.walks.size() <= 4 + 2);
}

TEST_CASE("halk keeps frequent hops and always keeps the root") {
  std::vector<double> t06{0.6};
  auto out = halk(corpus_of({{"A", "p", "B"}, {"A", "p", "C"}}), t06);
  REQUIRE(out.walks.size() == 2);
  CHECK(out.walks[0] == std::vector<std::string>{"A", "p"});
  CHECK(out.walks[1] == std::vector<std::string>{"A", "p"});
}

TEST_CASE("halk with threshold zero is the identity") {
  auto base = corpus_of({{"A", "p", "B"}, {"A", "q", "C"}});
  std::vector<double> zero{0.0};
  auto out = halk(base, zero);
  CHECK(out.walks == base.walks);
}

TEST_CASE("halk concatenates one copy per threshold") {
  auto base = corpus_of({{"A", "p", "B"}, {"A", "p", "C"}});
  std::vector<double> two{0.0, 0.6};
  auto out = halk(base, two);
  REQUIRE(out.walks.size() == 4);
  CHECK(out.walks[0] == base.walks[0]);
  CHECK(out.walks[1] == base.walks[1]);
  CHECK(out.walks[2] == std::vector<std::string>{"A", "p"});
  CHECK(out.walks[3] == std::vector<std::string>{"A", "p"});

  auto per = halk_per_threshold(base, two);
  REQUIRE(per.size() == 2);
  CHECK(per[0].walks == base.walks);
  CHECK(per[1].walks[0] == std::vector<std::string>{"A", "p"});
}

TEST_CASE("halk output tokens are a sub-multiset of the input walk") {
  auto base = corpus_of({{"A", "p", "B", "p", "A"}, {"A", "q", "C"}, {"D", "p", "B"}});
  for (double threshold : {0.0, 0.3, 0.5, 0.9, 1.0}) {
    std::vector<double> one{threshold};
    auto out = halk(base, one);
    REQUIRE(out.walks.size() == base.walks.size());
    for (std::size_t i = 0; i < out.walks.size(); ++i) {
      CHECK(out.walks[i].front() == base.walks[i].front());
      std::map<std::string, int> have;
      for (const auto& tok : base.walks[i]) ++have[tok];
      for (const auto& tok : out.walks[i]) --have[tok];
      for (const auto& [tok, count] : have) CHECK(count >= 0);
    }
  }
  std::vector<double> none{};
  CHECK_THROWS_AS(halk(base, none), Error);
}

TEST_CASE("default halk threshold sweep matches the protocol list") {
  auto sweep = default_halk_thresholds();
  std::vector<double> want{0.0, 0.1, 0.05, 0.01, 0.005, 0.001, 0.0005, 0.0001};
  REQUIRE(sweep.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(sweep[i] == want[i]);
}

TEST_CASE("wildcard injection enumerates position combinations") {
  auto out = inject_wildcards(corpus_of({{"A", "p", "B"}}), 1);
  std::set<std::vector<std::string>> got(out.walks.begin(), out.walks.end());
  std::set<std::vector<std::string>> want{
      {"A", "p", "B"}, {"A", "*", "B"}, {"A", "p", "*"}};
  CHECK(got == want);
  CHECK(out.walks.front() == std::vector<std::string>{"A", "p", "B"});  // originals first

  SUBCASE("zero wildcards is the identity") {
    auto same = inject_wildcards(corpus_of({{"A", "p", "B"}}), 0);
    REQUIRE(same.walks.size() == 1);
    CHECK(same.walks[0] == std::vector<std::string>{"A", "p", "B"});
  }
  SUBCASE("more wildcards than positions leaves only the original") {
    auto only = inject_wildcards(corpus_of({{"A", "p"}}), 2);
    REQUIRE(only.walks.size() == 1);
    CHECK(only.walks[0] == std::vector<std::string>{"A", "p"});
  }
  SUBCASE("two wildcards hit every pair of positions") {
    auto two = inject_wildcards(corpus_of({{"A", "p", "B", "q"}}), 2);
    CHECK(two.walks.size() == 1 + 3);  // original + C(3,2)
  }
}

TEST_CASE("ngram relabelling emits the hand-traced windows") {
  NGramMap map;
  auto out = ngram_relabel(corpus_of({{"A", "p", "B", "q", "C"}}), 2, 0, map);
  REQUIRE(out.walks.size() == 1);
  CHECK(out.walks[0] ==
        std::vector<std::string>{"A", "p", "ng0", "ng1", "ng2", "ng3"});
  REQUIRE(map.size() == 4);
  CHECK(map.ngram_of(0) == std::vector<std::string>{"A", "p"});
  CHECK(map.ngram_of(3) == std::vector<std::string>{"q", "C"});
}

TEST_CASE("unigram relabelling is a corpus-wide bijection") {
  auto base = corpus_of({{"A", "p", "B"}, {"A", "p", "B"}, {"C", "p", "A"}});
  auto out = ngram_relabel(base, 1, 0);
  REQUIRE(out.walks.size() == 3);
  CHECK(out.walks[0].size() == 4);  // root verbatim + one label per token
  CHECK(out.walks[0] == out.walks[1]);
  CHECK(out.walks[0] != out.walks[2]);
  // the windows covering "A" receive the same label in both walks
  CHECK(out.walks[0][1] == out.walks[2][3]);
}

TEST_CASE("walks shorter than n pass through verbatim") {
  auto out = ngram_relabel(corpus_of({{"A", "p"}}), 3, 0);
  REQUIRE(out.walks.size() == 1);
  CHECK(out.walks[0] == std::vector<std::string>{"A", "p"});
}

TEST_CASE("the ngram map is injective and invertible") {
  NGramMap map;
  auto base = corpus_of({{"A", "p", "B", "q", "C"}, {"A", "p", "C", "q", "B"},
                         {"B", "p", "A", "p", "B"}});
  ngram_relabel(base, 2, 1, map);
  std::set<std::vector<std::string>> tuples;
  for (std::size_t id = 0; id < map.size(); ++id) {
    CHECK(tuples.insert(map.ngram_of(id)).second);  // distinct label, distinct tuple
  }
  // re-interning any recovered tuple returns its original id
  for (std::size_t id = 0; id < map.size(); ++id) {
    CHECK(map.intern(map.ngram_of(id)) == id);
  }
  CHECK_THROWS_AS(map.ngram_of(map.size()), Error);
  CHECK_THROWS_AS(ngram_relabel(base, 0, 0), Error);
}

TEST_CASE("transform provenance chains the strategy tag") {
  auto base = corpus_of({{"A", "p", "B"}});
  CHECK(anonymize(base).strategy == "random+anonymous");
  CHECK(walklets(base).strategy == "random+walklet");
  std::vector<double> zero{0.0};
  CHECK(halk(base, zero).strategy == "random+halk");
  auto ng = ngram_relabel(base, 2, 1);
  CHECK(ng.strategy == "random+ngram");
  REQUIRE(ng.parameter("n"));
  CHECK(*ng.parameter("n") == "2");
  REQUIRE(ng.parameter("wildcards"));
  CHECK(*ng.parameter("wildcards") == "1");
  CHECK(ng.depth == base.depth);
}
