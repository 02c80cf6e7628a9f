#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "knowhunt/querygen.hpp"
#include "knowhunt/schema.hpp"

using namespace knowhunt;

namespace {

const Lexicon& demo_lexicon() {
  static Lexicon lex = Lexicon::load(testutil::data_path("lexicon"));
  return lex;
}

std::set<std::string> as_set(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

SchemaInstance schema_for(const std::string& id) {
  auto instances = load_wsc(testutil::data_path("wsc.jsonl"));
  auto it = std::find_if(instances.begin(), instances.end(),
                         [&](const ProblemInstance& p) { return p.id == id; });
  REQUIRE(it != instances.end());
  Annotator annotator(demo_lexicon().postags, demo_lexicon().lemmatizer);
  return decompose(*it, annotator.annotate(it->text));
}

}  // namespace

TEST_CASE("build_auto assembles predicate phrase, adjectives and root verbs") {
  auto plan = build_auto(schema_for("wsc-trophy-large"));
  CHECK(plan.mode == QueryMode::AGQ);
  CHECK(as_set(plan.c_terms) ==
        std::set<std::string>{"doesn't fit into", "brown", "fit"});
  CHECK(as_set(plan.q_terms) == std::set<std::string>{"is too large", "large"});
  CHECK(plan.q2_terms.empty());
  CHECK(as_set(plan.exclusions) == std::set<std::string>{"Winograd", "trophy"});
  // Phrase-first ordering: the full predicate phrase leads its set.
  CHECK(plan.c_terms.front() == "doesn't fit into");
  CHECK(plan.q_terms.front() == "is too large");
}

TEST_CASE("build_auto drops terms containing an exclusion and dedupes") {
  SchemaInstance s;
  s.first_entity = "The trophy";
  s.first_entity_head = "trophy";
  s.context_pred = "held the trophy";  // contains the head word
  s.context_adjectives = {"shiny", "Shiny"};
  s.context_root_verbs = {"held"};
  s.query_pred = "was nice";
  s.query_adjectives = {"nice"};
  auto plan = build_auto(s);
  CHECK(as_set(plan.c_terms) == std::set<std::string>{"shiny", "held"});
  CHECK(as_set(plan.q_terms) == std::set<std::string>{"was nice", "nice"});
}

TEST_CASE("build_auto caps each set at five terms") {
  SchemaInstance s;
  s.context_pred = "did things";
  s.context_adjectives = {"a1", "a2", "a3", "a4", "a5", "a6"};
  s.query_pred = "was nice";
  auto plan = build_auto(s);
  CHECK(plan.c_terms.size() == 5);
  CHECK(plan.c_terms.front() == "did things");
}

TEST_CASE("build_auto requires both predicates") {
  SchemaInstance s;
  s.query_pred = "was nice";
  CHECK_THROWS_AS(build_auto(s), PlanError);
  SchemaInstance s2;
  s2.context_pred = "did things";
  CHECK_THROWS_AS(build_auto(s2), PlanError);
}

TEST_CASE("augment_synonyms appends top-sense co-members for single words") {
  auto plan = build_auto(schema_for("wsc-trophy-large"));
  auto aug = augment_synonyms(plan, demo_lexicon());
  CHECK(aug.mode == QueryMode::AGQS);
  CHECK(as_set(aug.c_terms) ==
        std::set<std::string>{"doesn't fit into", "brown", "fit", "accommodate", "suit"});
  CHECK(as_set(aug.q_terms) == std::set<std::string>{"is too large", "large", "big"});
  // Augmenting an already augmented plan is rejected.
  CHECK_THROWS_AS(augment_synonyms(aug, demo_lexicon()), PlanError);
}

TEST_CASE("semantic filter keeps only near-best single-word pairs") {
  QueryPlan plan;
  plan.mode = QueryMode::AGQS;
  plan.c_terms = {"bullying", "younger", "older"};
  plan.q_terms = {"punished"};
  auto filtered = semantic_filter(plan, demo_lexicon(), 0.7);
  CHECK(filtered.mode == QueryMode::AGQSF);
  CHECK(filtered.c_terms == std::vector<std::string>{"bullying"});
  CHECK(filtered.q_terms == std::vector<std::string>{"punished"});

  // Idempotent: a second pass changes nothing.
  auto again = semantic_filter(filtered, demo_lexicon(), 0.7);
  CHECK(again.c_terms == filtered.c_terms);
  CHECK(again.q_terms == filtered.q_terms);
}

TEST_CASE("semantic filter passes multi-word terms through") {
  QueryPlan plan;
  plan.c_terms = {"were bullying", "older", "bullying"};
  plan.q_terms = {"got punished", "punished"};
  auto filtered = semantic_filter(plan, demo_lexicon(), 0.7);
  // "older" loses to the bullying/punished pair and is dropped; the phrases
  // survive untouched.
  CHECK(filtered.c_terms == std::vector<std::string>{"were bullying", "bullying"});
  CHECK(filtered.q_terms == std::vector<std::string>{"got punished", "punished"});
}

TEST_CASE("semantic filter is a no-op without any single-word pair") {
  QueryPlan plan;
  plan.c_terms = {"fit into"};
  plan.q_terms = {"too large"};
  auto filtered = semantic_filter(plan, demo_lexicon(), 0.7);
  CHECK(filtered.c_terms == plan.c_terms);
  CHECK(filtered.q_terms == plan.q_terms);
  CHECK(filtered.mode == QueryMode::AGQSF);
}

TEST_CASE("semantic filter keeps everything when all pairs score zero") {
  QueryPlan plan;
  plan.c_terms = {"young"};
  plan.q_terms = {"punished"};
  auto filtered = semantic_filter(plan, demo_lexicon(), 0.7);
  CHECK(filtered.c_terms == plan.c_terms);
  CHECK(filtered.q_terms == plan.q_terms);
}

TEST_CASE("load_manual returns the curated sets for an instance") {
  auto plan = load_manual(testutil::data_path("manual_queries.jsonl"), "wsc-trophy-large", "trophy");
  CHECK(plan.mode == QueryMode::MGQ);
  CHECK(as_set(plan.c_terms) ==
        std::set<std::string>{"doesn't fit into", "fit into", "doesn't fit"});
  CHECK(as_set(plan.q_terms) == std::set<std::string>{"is too large", "too large", "large"});
  CHECK_THROWS(load_manual(testutil::data_path("manual_queries.jsonl"), "no-such-id", "trophy"));
  CHECK_THROWS(load_manual("no-such-file.jsonl", "wsc-trophy-large", "trophy"));
}

TEST_CASE("build_copa produces clause, verb phrase and root levels") {
  Annotator annotator(demo_lexicon().postags, demo_lexicon().lemmatizer);
  auto plan = build_copa("The climbers reached the peak of the mountain.",
                         "They encountered an avalanche.", "They congratulated each other.",
                         annotator);
  CHECK(as_set(plan.c_terms) ==
        std::set<std::string>{"The climbers reached the peak", "reached the peak", "reached"});
  CHECK(as_set(plan.q_terms) ==
        std::set<std::string>{"They encountered an avalanche", "encountered an avalanche",
                              "encountered"});
  CHECK(as_set(plan.q2_terms) ==
        std::set<std::string>{"They congratulated each other", "congratulated each other",
                              "congratulated"});
}

TEST_CASE("copa levels deduplicate and fall back to adjectives") {
  Annotator annotator(demo_lexicon().postags, demo_lexicon().lemmatizer);
  // Verb clause equals its own root once deduplicated.
  auto plan = build_copa("It rained.", "The grass was wet.", "The sun was shining.", annotator);
  CHECK(plan.c_terms == std::vector<std::string>{"It rained", "rained"});
  // Copular clause has no verb inside the phrase: adjectives step in.
  CHECK(as_set(plan.q_terms) ==
        std::set<std::string>{"The grass was wet", "was wet", "wet"});
  CHECK_THROWS_AS(build_copa("The nice day.", "It rained.", "It rained.", annotator), PlanError);
  CHECK_THROWS_AS(build_copa("", "It rained.", "It rained.", annotator), PlanError);
}

TEST_CASE("expand emits the cross product, skipping degenerate pairs") {
  QueryPlan plan;
  plan.c_terms = {"alpha", "beta"};
  plan.q_terms = {"beta", "gamma"};
  plan.exclusions = {"x"};
  auto queries = expand(plan, Ordering::CBeforeQ);
  REQUIRE(queries.size() == 3);  // (alpha,beta) (alpha,gamma) (beta,gamma)
  CHECK(queries[0].term_c == "alpha");
  CHECK(queries[0].term_q == "beta");
  CHECK(queries[1].term_q == "gamma");
  CHECK(queries[2].term_c == "beta");
  for (const auto& q : queries) {
    CHECK(q.ordering == Ordering::CBeforeQ);
    CHECK(q.alternative == 0);
    CHECK(q.exclusions == plan.exclusions);
  }
}

TEST_CASE("expand tags COPA alternatives") {
  QueryPlan plan;
  plan.c_terms = {"c"};
  plan.q_terms = {"q1"};
  plan.q2_terms = {"q2a", "q2b"};
  auto queries = expand(plan);
  REQUIRE(queries.size() == 3);
  CHECK(queries[0].alternative == 1);
  CHECK(queries[1].alternative == 2);
  CHECK(queries[2].alternative == 2);
  CHECK(queries[2].term_q == "q2b");
}
