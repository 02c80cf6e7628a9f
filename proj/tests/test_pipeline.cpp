#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "knowhunt/pipeline.hpp"

using namespace knowhunt;

namespace {

const Lexicon& demo_lexicon() {
  static Lexicon lex = Lexicon::load(testutil::data_path("lexicon"));
  return lex;
}

CorpusProvider demo_provider() {
  return CorpusProvider(CorpusIndex::build_dir(testutil::data_path("corpus")),
                        demo_lexicon().lemmatizer);
}

RunConfig wsc_config(QueryMode mode = QueryMode::AGQ) {
  RunConfig config;
  config.task = RunConfig::Task::WSC;
  config.query_mode = mode;
  return config;
}

std::vector<Resolution> resolutions_of(const std::vector<InstanceResult>& results) {
  std::vector<Resolution> out;
  for (const auto& r : results) out.push_back(r.resolution);
  return out;
}

}  // namespace

TEST_CASE("wsc pipeline over the bundled corpus reproduces the recorded run") {
  auto instances = load_wsc(testutil::data_path("wsc.jsonl"));
  auto provider = demo_provider();
  auto results = run_wsc(instances, demo_lexicon(), provider, wsc_config());
  auto report = evaluate_wsc(resolutions_of(results), instances);

  CHECK(format_summary(report) == "P=0.93 R=0.93 F1=0.93");
  const std::string expected_tsv =
      "id\tdecision\tgold\tcorrect\tagent_strength\tpatient_strength\n"
      "wsc-council-advocated\tpatient\tpatient\t1\t0\t3\n"
      "wsc-council-feared\tagent\tagent\t1\t3\t0\n"
      "wsc-jim-comforted\tpatient\tpatient\t1\t0\t4\n"
      "wsc-jim-yelled\tagent\tagent\t1\t6\t0\n"
      "wsc-man-heavy\tpatient\tpatient\t1\t0\t4\n"
      "wsc-man-weak\tagent\tagent\t1\t3\t0\n"
      "wsc-sam-dogs\tagent\tpatient\t0\t4\t3\n"
      "wsc-sam-golfers\tagent\tagent\t1\t4\t3\n"
      "wsc-students-punished\tagent\tagent\t1\t4\t0\n"
      "wsc-students-rescued\tpatient\tpatient\t1\t0\t4\n"
      "wsc-table-narrow\tpatient\tpatient\t1\t0\t3\n"
      "wsc-table-wide\tagent\tagent\t1\t3\t0\n"
      "wsc-trophy-large\tagent\tagent\t1\t3\t0\n"
      "wsc-trophy-small\tpatient\tpatient\t1\t0\t3\n";
  CHECK(render_report(report, ReportFormat::Tsv) == expected_tsv);
}

TEST_CASE("fixture provider run resolves the weak/lift instance from replayed evidence") {
  auto instances = load_wsc(testutil::data_path("wsc.jsonl"));
  ProblemInstance target;
  for (const auto& p : instances)
    if (p.id == "wsc-man-weak") target = p;
  REQUIRE(target.id == "wsc-man-weak");

  FixtureProvider provider(testutil::data_path("fixtures/man_son_weak.jsonl"),
                           &demo_lexicon().lemmatizer);
  auto result = solve_wsc_instance(target, demo_lexicon(), provider, wsc_config());

  REQUIRE(result.evidence.size() == 4);
  CHECK(result.evidence[0].label == EvidenceLabel::EA);
  CHECK(result.evidence[1].label == EvidenceLabel::EA);
  CHECK(result.evidence[2].label == EvidenceLabel::EA);
  CHECK(result.evidence[3].label == EvidenceLabel::EP);
  CHECK(result.resolution.decision == Decision::Agent);
  CHECK(result.resolution.agent_strength == 9);
  CHECK(result.resolution.patient_strength == 3);
  CHECK(result.resolution.evidence_count == 4);
}

TEST_CASE("synonym and filter modes run end to end") {
  auto instances = load_wsc(testutil::data_path("wsc.jsonl"));
  auto provider = demo_provider();

  auto synonyms = run_wsc(instances, demo_lexicon(), provider, wsc_config(QueryMode::AGQS));
  CHECK(format_summary(evaluate_wsc(resolutions_of(synonyms), instances)) ==
        "P=0.93 R=0.93 F1=0.93");

  auto filtered = run_wsc(instances, demo_lexicon(), provider, wsc_config(QueryMode::AGQSF));
  auto report = evaluate_wsc(resolutions_of(filtered), instances);
  CHECK(format_summary(report) == "P=0.92 R=0.79 F1=0.85");
  CHECK(report.answered == 12);
}

TEST_CASE("manual query mode answers precisely and abstains elsewhere") {
  auto instances = load_wsc(testutil::data_path("wsc.jsonl"));
  auto provider = demo_provider();
  auto config = wsc_config(QueryMode::MGQ);
  config.manual_path = testutil::data_path("manual_queries.jsonl");
  auto results = run_wsc(instances, demo_lexicon(), provider, config);
  auto report = evaluate_wsc(resolutions_of(results), instances);
  CHECK(format_summary(report) == "P=1.00 R=0.79 F1=0.88");

  std::map<std::string, Decision> decisions;
  for (const auto& r : results) decisions[r.resolution.instance_id] = r.resolution.decision;
  CHECK(decisions["wsc-sam-dogs"] == Decision::Abstain);
  CHECK(decisions["wsc-sam-golfers"] == Decision::Abstain);
  CHECK(decisions["wsc-trophy-small"] == Decision::Abstain);
}

TEST_CASE("copa pipeline answers all bundled instances") {
  auto instances = load_copa(testutil::data_path("copa.jsonl"));
  auto provider = demo_provider();
  auto results = run_copa(instances, demo_lexicon(), provider, wsc_config());
  auto report = evaluate_copa(resolutions_of(results), instances);
  CHECK(format_copa_summary(report) == "accuracy=100.0% (4/4, answered 4)");
  for (const auto& p : report.per_instance) CHECK(p.correct);
}

TEST_CASE("fan_out deduplicates snippets across queries, first query first") {
  testutil::TempFile fixtures(
      R"({"term_c":"alpha","term_q":"omega","snippets":[{"text":"alpha beta x omega","doc_id":"d"}]})"
      "\n"
      R"({"term_c":"beta","term_q":"omega","snippets":[{"text":"alpha beta x omega","doc_id":"d"},{"text":"beta then omega","doc_id":"e"}]})"
      "\n");
  FixtureProvider provider(fixtures.path());
  SearchQuery q1, q2;
  q1.term_c = "alpha";
  q1.term_q = "omega";
  q2.term_c = "beta";
  q2.term_q = "omega";
  auto snippets = detail::fan_out({q1, q2}, provider);
  REQUIRE(snippets.size() == 2);  // shared (doc, text) kept once
  CHECK(snippets[0].matched_term_c == "alpha");
  CHECK(snippets[1].doc_id == "e");
}

TEST_CASE("instances that fail to decompose are reported, not fatal") {
  ProblemInstance broken;
  broken.id = "aaa-broken";
  broken.text = "The trophy the suitcase it";
  broken.first_candidate = {0, 10};
  broken.second_candidate = {11, 23};
  broken.pronoun = {24, 26};

  auto provider = demo_provider();
  auto result = solve_wsc_instance(broken, demo_lexicon(), provider, wsc_config());
  CHECK_FALSE(result.error.empty());
  CHECK(result.resolution.decision == Decision::Abstain);
  CHECK(result.evidence.empty());

  auto instances = load_wsc(testutil::data_path("wsc.jsonl"));
  instances.push_back(broken);
  auto results = run_wsc(instances, demo_lexicon(), provider, wsc_config());
  REQUIRE(results.size() == 15);
  CHECK(results[0].resolution.instance_id == "aaa-broken");  // still sorted by id
  CHECK_FALSE(results[0].error.empty());
  auto rendered = render_resolutions(results);
  CHECK(rendered.find("\"skipped\"") != std::string::npos);
}

TEST_CASE("thread count never changes the rendered bytes") {
  auto instances = load_wsc(testutil::data_path("wsc.jsonl"));
  auto provider = demo_provider();
  auto serial = wsc_config();
  serial.jobs = 1;
  auto parallel = wsc_config();
  parallel.jobs = 4;

  auto r1 = run_wsc(instances, demo_lexicon(), provider, serial);
  auto r2 = run_wsc(instances, demo_lexicon(), provider, parallel);
  CHECK(render_resolutions(r1) == render_resolutions(r2));
  CHECK(render_report(evaluate_wsc(resolutions_of(r1), instances), ReportFormat::JsonLines) ==
        render_report(evaluate_wsc(resolutions_of(r2), instances), ReportFormat::JsonLines));
}

TEST_CASE("random backoff fills abstentions deterministically per instance") {
  auto instances = load_wsc(testutil::data_path("wsc.jsonl"));
  CorpusProvider empty(CorpusIndex::build({}), demo_lexicon().lemmatizer);

  auto config = wsc_config();
  config.random_backoff = true;
  config.seed = 5;
  auto results = run_wsc(instances, demo_lexicon(), empty, config);
  for (const auto& r : results) {
    CHECK(r.resolution.decision != Decision::Abstain);
    CHECK(r.resolution.answered);
    Resolution abstain;
    abstain.instance_id = r.resolution.instance_id;
    auto expected =
        backoff_random(abstain, config.seed ^ detail::fnv1a(r.resolution.instance_id), false);
    CHECK(r.resolution.decision == expected.decision);
  }

  auto again = run_wsc(instances, demo_lexicon(), empty, config);
  CHECK(render_resolutions(results) == render_resolutions(again));

  // Without backoff the same provider yields only abstentions.
  auto plain = run_wsc(instances, demo_lexicon(), empty, wsc_config());
  for (const auto& r : plain) CHECK(r.resolution.decision == Decision::Abstain);
}
