// End-to-end orchestration: schema -> queries -> retrieval -> evidence ->
// resolution for whole datasets, with optional parallelism across
// instances. Output order is always by instance id, so thread count never
// changes the bytes produced.
#pragma once

#include <algorithm>
#include <atomic>
#include <memory>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "knowhunt/evalharness.hpp"
#include "knowhunt/evidence.hpp"
#include "knowhunt/querygen.hpp"
#include "knowhunt/resolver.hpp"
#include "knowhunt/retrieval.hpp"
#include "knowhunt/schema.hpp"

namespace knowhunt {

struct RunConfig {
  enum class Task : std::uint8_t { WSC, COPA };
  enum class Provider : std::uint8_t { Corpus, Fixture };

  Task task = Task::WSC;
  QueryMode query_mode = QueryMode::AGQ;
  double alpha = 0.7;
  Provider provider = Provider::Corpus;
  std::string corpus_dir;
  std::string index_path;
  std::string fixtures_path;
  std::string lexicon_dir;
  std::string manual_path;
  std::size_t limit = kDefaultSnippetLimit;
  ScoreWeights weights;
  bool force_label = false;
  bool random_backoff = false;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

struct InstanceResult {
  Resolution resolution;
  std::vector<EvidenceSentence> evidence;
  std::string error;  // set when the instance was skipped (schema/plan failure)
};

namespace detail {

// Stable string hash for per-instance seeding (std::hash varies by
// implementation; this must not).
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::vector<Snippet> fan_out(const std::vector<SearchQuery>& queries,
                                    const SnippetProvider& provider) {
  std::vector<Snippet> out;
  std::set<std::string> seen;  // (doc, text) pairs; first query hit wins
  for (const auto& q : queries) {
    for (auto& s : provider.retrieve(q)) {
      std::string key = s.doc_id + '\x1f' + s.text;
      if (seen.insert(std::move(key)).second) out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace detail

inline QueryPlan plan_for(const SchemaInstance& schema, const ProblemInstance& instance,
                          const Lexicon& lexicon, const RunConfig& config) {
  if (config.query_mode == QueryMode::MGQ)
    return load_manual(config.manual_path, instance.id, schema.first_entity_head);
  QueryPlan plan = build_auto(schema);
  if (config.query_mode == QueryMode::AGQS || config.query_mode == QueryMode::AGQSF)
    plan = augment_synonyms(plan, lexicon);
  if (config.query_mode == QueryMode::AGQSF) plan = semantic_filter(plan, lexicon, config.alpha);
  return plan;
}

inline InstanceResult solve_wsc_instance(const ProblemInstance& instance, const Lexicon& lexicon,
                                         const SnippetProvider& provider,
                                         const RunConfig& config) {
  InstanceResult result;
  result.resolution.instance_id = instance.id;
  Annotator annotator(lexicon.postags, lexicon.lemmatizer);
  try {
    auto annotations = annotator.annotate(instance.text);
    SchemaInstance schema = decompose(instance, annotations);
    QueryPlan plan = plan_for(schema, instance, lexicon, config);
    auto snippets = detail::fan_out(expand(plan), provider);
    for (const auto& snip : snippets) {
      auto toks = annotator.annotate(snip.text);
      result.evidence.push_back(analyze_snippet(snip, toks, lexicon.wordlists, config.force_label,
                                                true, config.weights));
    }
    result.resolution = decide_wsc(result.evidence);
    result.resolution.instance_id = instance.id;
  } catch (const SchemaError& e) {
    result.error = e.what();
  } catch (const PlanError& e) {
    result.error = e.what();
  }
  if (config.random_backoff)
    result.resolution =
        backoff_random(result.resolution, config.seed ^ detail::fnv1a(instance.id), false);
  return result;
}

inline InstanceResult solve_copa_instance(const CopaInstance& instance, const Lexicon& lexicon,
                                          const SnippetProvider& provider,
                                          const RunConfig& config) {
  InstanceResult result;
  result.resolution.instance_id = instance.id;
  Annotator annotator(lexicon.postags, lexicon.lemmatizer);
  try {
    QueryPlan plan = build_copa(instance.premise, instance.alt1, instance.alt2, annotator);
    if (config.query_mode == QueryMode::AGQS || config.query_mode == QueryMode::AGQSF)
      plan = augment_synonyms(plan, lexicon);
    Ordering ordering =
        instance.relation == CopaRelation::Cause ? Ordering::CBeforeQ : Ordering::QBeforeC;
    auto queries = expand(plan, ordering);
    std::vector<SearchQuery> q1, q2;
    for (const auto& q : queries) (q.alternative == 1 ? q1 : q2).push_back(q);
    bool expect_c_first = instance.relation == CopaRelation::Cause;
    auto score_all = [&](const std::vector<SearchQuery>& qs) {
      std::vector<EvidenceSentence> evidence;
      for (const auto& snip : detail::fan_out(qs, provider)) {
        EvidenceSentence e;
        e.snippet = snip;
        e.label = EvidenceLabel::EA;  // COPA weighs strength only
        Scores s = score(snip, expect_c_first, config.weights);
        e.len_score = s.len_score;
        e.order_score = s.order_score;
        e.strength = s.strength;
        evidence.push_back(std::move(e));
      }
      return evidence;
    };
    auto ev1 = score_all(q1);
    auto ev2 = score_all(q2);
    result.resolution = decide_copa(ev1, ev2);
    result.resolution.instance_id = instance.id;
    result.evidence = std::move(ev1);
    for (auto& e : ev2) result.evidence.push_back(std::move(e));
  } catch (const PlanError& e) {
    result.error = e.what();
  }
  if (config.random_backoff)
    result.resolution =
        backoff_random(result.resolution, config.seed ^ detail::fnv1a(instance.id), true);
  return result;
}

namespace detail {

template <typename Item, typename Fn>
std::vector<InstanceResult> parallel_map(const std::vector<Item>& items, std::size_t jobs, Fn fn) {
  std::vector<InstanceResult> results(items.size());
  if (jobs <= 1 || items.size() <= 1) {
    for (std::size_t i = 0; i < items.size(); ++i) results[i] = fn(items[i]);
    return results;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= items.size()) return;
      results[i] = fn(items[i]);
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(jobs, items.size()); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace detail

// Solves every instance and returns results sorted by instance id.
inline std::vector<InstanceResult> run_wsc(std::vector<ProblemInstance> instances,
                                           const Lexicon& lexicon,
                                           const SnippetProvider& provider,
                                           const RunConfig& config) {
  std::stable_sort(instances.begin(), instances.end(),
                   [](const ProblemInstance& a, const ProblemInstance& b) { return a.id < b.id; });
  return detail::parallel_map(instances, config.jobs, [&](const ProblemInstance& p) {
    return solve_wsc_instance(p, lexicon, provider, config);
  });
}

inline std::vector<InstanceResult> run_copa(std::vector<CopaInstance> instances,
                                            const Lexicon& lexicon,
                                            const SnippetProvider& provider,
                                            const RunConfig& config) {
  std::stable_sort(instances.begin(), instances.end(),
                   [](const CopaInstance& a, const CopaInstance& b) { return a.id < b.id; });
  return detail::parallel_map(instances, config.jobs, [&](const CopaInstance& c) {
    return solve_copa_instance(c, lexicon, provider, config);
  });
}

inline std::unique_ptr<SnippetProvider> make_provider(const RunConfig& config,
                                                      const Lexicon& lexicon) {
  if (config.provider == RunConfig::Provider::Fixture)
    return std::make_unique<FixtureProvider>(config.fixtures_path, &lexicon.lemmatizer);
  CorpusIndex index = config.index_path.empty() ? CorpusIndex::build_dir(config.corpus_dir)
                                                : CorpusIndex::load(config.index_path);
  return std::make_unique<CorpusProvider>(std::move(index), lexicon.lemmatizer, config.limit);
}

inline std::string render_resolutions(const std::vector<InstanceResult>& results) {
  std::string out;
  for (const auto& r : results) {
    nlohmann::ordered_json row;
    row["instance_id"] = r.resolution.instance_id;
    row["decision"] = decision_name(r.resolution.decision);
    row["agent_strength"] = r.resolution.agent_strength;
    row["patient_strength"] = r.resolution.patient_strength;
    row["evidence_count"] = r.resolution.evidence_count;
    if (!r.error.empty()) row["skipped"] = r.error;
    out += row.dump();
    out += '\n';
  }
  return out;
}

inline std::string render_evidence_dump(const std::string& instance_id,
                                        const std::vector<EvidenceSentence>& evidence) {
  std::string out;
  for (const auto& e : evidence) {
    nlohmann::ordered_json row;
    row["instance_id"] = instance_id;
    row["snippet_text"] = e.snippet.text;
    row["pattern"] = e.parse.pattern;
    row["coref_target"] = coref_target_name(e.parse.coref_target);
    row["voice"] =
        (e.parse.voice_c == Voice::Passive || e.parse.voice_q == Voice::Passive) ? "passive"
                                                                                 : "active";
    row["causative"] = e.parse.causative;
    row["label"] = evidence_label_name(e.label);
    row["strength"] = e.strength;
    out += row.dump();
    out += '\n';
  }
  return out;
}

}  // namespace knowhunt
