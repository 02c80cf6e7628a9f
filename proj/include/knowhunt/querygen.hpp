// Query-set construction: C/Q term sets from a schema, synonym augmentation,
// the pairwise-similarity filter, manual query files, COPA back-off
// extraction, and expansion into concrete search queries.
#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "knowhunt/lexicon.hpp"
#include "knowhunt/schema.hpp"
#include "knowhunt/text.hpp"

namespace knowhunt {

enum class QueryMode : std::uint8_t { AGQ, AGQS, AGQSF, MGQ };

inline const char* query_mode_name(QueryMode m) {
  switch (m) {
    case QueryMode::AGQ: return "auto";
    case QueryMode::AGQS: return "auto-syn";
    case QueryMode::AGQSF: return "auto-syn-filter";
    case QueryMode::MGQ: return "manual";
  }
  return "?";
}

enum class Ordering : std::uint8_t { Any, CBeforeQ, QBeforeC };

class PlanError : public std::runtime_error {
 public:
  explicit PlanError(const std::string& what) : std::runtime_error(what) {}
};

constexpr std::size_t kMaxTermsPerSet = 5;

struct QueryPlan {
  std::vector<std::string> c_terms;
  std::vector<std::string> q_terms;
  std::vector<std::string> q2_terms;  // second alternative; empty outside COPA
  std::vector<std::string> exclusions;
  QueryMode mode = QueryMode::AGQ;
};

struct SearchQuery {
  std::string term_c;
  std::string term_q;
  std::vector<std::string> exclusions;
  Ordering ordering = Ordering::Any;
  int alternative = 0;  // 0 = the single Q set; 1/2 = COPA alternatives
};

namespace detail {

inline bool is_single_word(const std::string& term) {
  return term.find(' ') == std::string::npos;
}

inline bool contains_ci(const std::string& haystack, const std::string& needle) {
  if (needle.empty()) return false;
  return to_lower(haystack).find(to_lower(needle)) != std::string::npos;
}

inline void push_term(std::vector<std::string>& set, const std::string& term,
                      const std::vector<std::string>& exclusions) {
  std::string t = strip(term);
  if (t.empty() || set.size() >= kMaxTermsPerSet) return;
  for (const auto& x : exclusions)
    if (contains_ci(t, x)) return;
  for (const auto& existing : set)
    if (to_lower(existing) == to_lower(t)) return;
  set.push_back(t);
}

}  // namespace detail

// C holds the context predicate phrase plus its clause's adjectives and root
// verbs; Q the same for the query side. Phrases go first so the most
// specific queries run first.
inline QueryPlan build_auto(const SchemaInstance& schema) {
  if (schema.context_pred.empty()) throw PlanError("empty context predicate");
  if (schema.query_pred.empty()) throw PlanError("empty query predicate");
  QueryPlan plan;
  plan.mode = QueryMode::AGQ;
  plan.exclusions.push_back("Winograd");
  if (!schema.first_entity_head.empty()) plan.exclusions.push_back(schema.first_entity_head);

  detail::push_term(plan.c_terms, schema.context_pred, plan.exclusions);
  for (const auto& a : schema.context_adjectives) detail::push_term(plan.c_terms, a, plan.exclusions);
  for (const auto& v : schema.context_root_verbs) detail::push_term(plan.c_terms, v, plan.exclusions);

  detail::push_term(plan.q_terms, schema.query_pred, plan.exclusions);
  for (const auto& a : schema.query_adjectives) detail::push_term(plan.q_terms, a, plan.exclusions);
  for (const auto& v : schema.query_root_verbs) detail::push_term(plan.q_terms, v, plan.exclusions);

  if (plan.c_terms.empty() || plan.q_terms.empty())
    throw PlanError("query set empty after exclusions");
  return plan;
}

// Appends co-members of the top same-POS synset for every single-word verb
// or adjective already in the sets.
inline QueryPlan augment_synonyms(const QueryPlan& plan, const Lexicon& lex) {
  if (plan.mode != QueryMode::AGQ) throw PlanError("synonym augmentation expects an unaugmented automatic plan");
  QueryPlan out = plan;
  auto grow = [&](std::vector<std::string>& set) {
    std::vector<std::string> base = set;  // iterate the pre-augmentation terms
    for (const auto& term : base) {
      if (!detail::is_single_word(term)) continue;
      Pos pos = lex.postags.tag(to_lower(term));
      if (pos != Pos::Verb && pos != Pos::Adj) continue;
      auto syns = lex.taxonomy.synonyms(to_lower(term), pos);
      if (syns.empty()) syns = lex.taxonomy.synonyms(lex.lemmatizer.lemma(to_lower(term)), pos);
      for (const auto& s : syns) detail::push_term(set, s, out.exclusions);
    }
  };
  grow(out.c_terms);
  grow(out.q_terms);
  grow(out.q2_terms);
  out.mode = QueryMode::AGQS;
  return out;
}

// Scores every single-word (c, q) pair; s is the best pair score, and any
// single-word term whose best pair falls under alpha*s is dropped.
// Multi-word terms always pass. A set is never left empty: its best-scoring
// term survives regardless.
inline QueryPlan semantic_filter(const QueryPlan& plan, const Lexicon& lex, double alpha) {
  QueryPlan out = plan;
  out.mode = QueryMode::AGQSF;
  std::vector<double> best_c(plan.c_terms.size(), -1.0);
  std::vector<double> best_q(plan.q_terms.size(), -1.0);
  double s = -1.0;
  for (std::size_t i = 0; i < plan.c_terms.size(); ++i) {
    if (!detail::is_single_word(plan.c_terms[i])) continue;
    for (std::size_t j = 0; j < plan.q_terms.size(); ++j) {
      if (!detail::is_single_word(plan.q_terms[j])) continue;
      double score = lex.taxonomy.word_similarity(to_lower(plan.c_terms[i]),
                                                  to_lower(plan.q_terms[j]), lex.lemmatizer);
      best_c[i] = std::max(best_c[i], score);
      best_q[j] = std::max(best_q[j], score);
      s = std::max(s, score);
    }
  }
  if (s < 0.0) return out;  // no single-word pair to judge by

  auto apply = [&](const std::vector<std::string>& in, const std::vector<double>& best) {
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < in.size(); ++i) {
      if (!detail::is_single_word(in[i]) || best[i] >= alpha * s) kept.push_back(in[i]);
    }
    if (kept.empty()) {  // defensive: keep the strongest term rather than none
      std::size_t arg = 0;
      for (std::size_t i = 1; i < in.size(); ++i)
        if (best[i] > best[arg]) arg = i;
      kept.push_back(in[arg]);
    }
    return kept;
  };
  out.c_terms = apply(plan.c_terms, best_c);
  out.q_terms = apply(plan.q_terms, best_q);
  return out;
}

// Manual query file: line-delimited {id, c_terms:[...], q_terms:[...]}.
inline QueryPlan load_manual(const std::string& path, const std::string& instance_id,
                             const std::string& e1_head = "") {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("manual queries: cannot open " + path);
  std::string line;
  std::size_t record = 0;
  while (std::getline(in, line)) {
    if (detail::strip(line).empty()) continue;
    ++record;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
      throw std::runtime_error("manual queries: record " + std::to_string(record) +
                               ": bad json: " + e.what());
    }
    if (!j.contains("id") || j["id"].get<std::string>() != instance_id) continue;
    QueryPlan plan;
    plan.mode = QueryMode::MGQ;
    plan.exclusions.push_back("Winograd");
    if (!e1_head.empty()) plan.exclusions.push_back(e1_head);
    for (const auto& field : {"c_terms", "q_terms"}) {
      if (!j.contains(field) || !j[field].is_array())
        throw std::runtime_error("manual queries: record " + std::to_string(record) +
                                 ": missing array '" + std::string(field) + "'");
    }
    for (const auto& t : j["c_terms"]) detail::push_term(plan.c_terms, t.get<std::string>(), plan.exclusions);
    for (const auto& t : j["q_terms"]) detail::push_term(plan.q_terms, t.get<std::string>(), plan.exclusions);
    if (plan.c_terms.empty() || plan.q_terms.empty())
      throw PlanError("manual query sets empty for " + instance_id);
    return plan;
  }
  throw std::runtime_error("manual queries: no entry for id '" + instance_id + "'");
}

namespace detail {

// Three back-off levels for one COPA sentence: leading clause through the
// verb phrase, the verb phrase alone, and its root verbs (or adjectives when
// the predicate is copular).
inline std::vector<std::string> copa_levels(const std::string& sentence,
                                            const Annotator& annotator) {
  auto toks = annotator.annotate(sentence);
  std::size_t vp_start = toks.size();
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (toks[i].pos == Pos::Verb || toks[i].pos == Pos::Aux) {
      vp_start = i;
      break;
    }
  }
  if (vp_start == toks.size()) throw PlanError("no verb found in: " + sentence);
  std::size_t vp_end = vp_start + 1;
  while (vp_end < toks.size() && !toks[vp_end].gap_before) {
    Pos p = toks[vp_end].pos;
    bool extend = p == Pos::Verb || p == Pos::Aux || p == Pos::Noun || p == Pos::Adj ||
                  PosLexicon::is_determiner(toks[vp_end].lower) ||
                  PosLexicon::is_negation(toks[vp_end].lower) ||
                  PosLexicon::is_degree(toks[vp_end].lower);
    if (!extend) break;
    ++vp_end;
  }
  auto join = [&](std::size_t lo, std::size_t hi) {
    std::string out;
    for (std::size_t i = lo; i < hi; ++i) {
      if (!out.empty()) out += ' ';
      out += toks[i].token;
    }
    return out;
  };
  std::vector<std::string> levels;
  levels.push_back(join(0, vp_end));
  levels.push_back(join(vp_start, vp_end));
  std::vector<std::string> roots;
  for (std::size_t i = vp_start; i < vp_end; ++i)
    if (toks[i].pos == Pos::Verb) roots.push_back(toks[i].token);
  if (roots.empty())
    for (std::size_t i = vp_start; i < vp_end; ++i)
      if (toks[i].pos == Pos::Adj) roots.push_back(toks[i].token);
  levels.insert(levels.end(), roots.begin(), roots.end());
  return levels;
}

}  // namespace detail

inline QueryPlan build_copa(const std::string& premise, const std::string& alt1,
                            const std::string& alt2, const Annotator& annotator) {
  if (premise.empty() || alt1.empty() || alt2.empty())
    throw PlanError("empty premise or alternative");
  QueryPlan plan;
  plan.mode = QueryMode::AGQ;
  for (const auto& t : detail::copa_levels(premise, annotator))
    detail::push_term(plan.c_terms, t, plan.exclusions);
  for (const auto& t : detail::copa_levels(alt1, annotator))
    detail::push_term(plan.q_terms, t, plan.exclusions);
  for (const auto& t : detail::copa_levels(alt2, annotator))
    detail::push_term(plan.q2_terms, t, plan.exclusions);
  if (plan.c_terms.empty() || plan.q_terms.empty() || plan.q2_terms.empty())
    throw PlanError("empty COPA query set");
  return plan;
}

inline std::vector<SearchQuery> expand(const QueryPlan& plan, Ordering ordering = Ordering::Any) {
  std::vector<SearchQuery> queries;
  auto emit = [&](const std::vector<std::string>& qs, int alternative) {
    for (const auto& c : plan.c_terms)
      for (const auto& q : qs) {
        if (to_lower(c) == to_lower(q)) continue;
        queries.push_back({c, q, plan.exclusions, ordering, alternative});
      }
  };
  if (plan.q2_terms.empty()) {
    emit(plan.q_terms, 0);
  } else {
    emit(plan.q_terms, 1);
    emit(plan.q2_terms, 2);
  }
  return queries;
}

}  // namespace knowhunt
