// Problem instances and their decomposition into the shallow semantic
// schema: candidate entities, context predicate, discourse connective,
// pronoun and query predicate. The decomposition is a deterministic chunking
// pass over the built-in tagger's annotations; no external parser involved.
#pragma once

#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "knowhunt/lexicon.hpp"
#include "knowhunt/text.hpp"

namespace knowhunt {

struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  bool operator==(const Span&) const = default;
};

enum class GoldAnswer : std::uint8_t { Agent, Patient };

// One pronoun-resolution problem: two candidate antecedents and a target
// pronoun, all given as character spans into the sentence.
struct ProblemInstance {
  std::string id;
  std::string text;
  Span first_candidate;   // earlier antecedent (the "agent" side)
  Span second_candidate;  // later antecedent (the "patient" side)
  Span pronoun;
  std::optional<GoldAnswer> answer;
  std::string pair_id;

  std::string first_text() const { return text.substr(first_candidate.start, first_candidate.end - first_candidate.start); }
  std::string second_text() const { return text.substr(second_candidate.start, second_candidate.end - second_candidate.start); }
  std::string pronoun_text() const { return text.substr(pronoun.start, pronoun.end - pronoun.start); }
};

struct TokenAnnotation {
  std::string token;
  std::string lower;
  std::string lemma;
  Pos pos = Pos::Other;
  std::size_t char_start = 0;
  std::size_t char_end = 0;
  bool gap_before = false;  // punctuation between this token and the previous
};

class SchemaError : public std::runtime_error {
 public:
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

// Dataset loader. Line-delimited JSON records:
//   {"id":..,"text":..,"e1":{"start","end"},"e2":{..},"pronoun":{..},
//    "answer":"agent"|"patient","pair_id":..}
inline std::vector<ProblemInstance> load_wsc(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("wsc: cannot open " + path);
  std::vector<ProblemInstance> out;
  std::string line;
  std::size_t record = 0;
  auto fail = [&](const std::string& field, const std::string& what) {
    throw std::runtime_error("wsc: record " + std::to_string(record) + ": field '" + field +
                             "': " + what);
  };
  while (std::getline(in, line)) {
    if (detail::strip(line).empty()) continue;
    ++record;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
      throw std::runtime_error("wsc: record " + std::to_string(record) + ": bad json: " + e.what());
    }
    ProblemInstance p;
    if (!j.contains("id") || !j["id"].is_string()) fail("id", "missing or not a string");
    p.id = j["id"].get<std::string>();
    if (!j.contains("text") || !j["text"].is_string()) fail("text", "missing or not a string");
    p.text = j["text"].get<std::string>();
    auto span = [&](const char* field) {
      if (!j.contains(field) || !j[field].is_object() || !j[field].contains("start") ||
          !j[field].contains("end"))
        fail(field, "missing span object");
      Span s{j[field]["start"].get<std::size_t>(), j[field]["end"].get<std::size_t>()};
      if (s.start >= s.end || s.end > p.text.size()) fail(field, "span out of bounds");
      return s;
    };
    p.first_candidate = span("e1");
    p.second_candidate = span("e2");
    p.pronoun = span("pronoun");
    if (p.first_candidate.end > p.second_candidate.start)
      fail("e2", "candidate spans overlap or are out of order");
    auto overlaps = [&](const Span& a) {
      return p.pronoun.start < a.end && a.start < p.pronoun.end;
    };
    if (overlaps(p.first_candidate) || overlaps(p.second_candidate))
      fail("pronoun", "span overlaps a candidate span");
    if (j.contains("answer") && !j["answer"].is_null()) {
      std::string a = j["answer"].get<std::string>();
      if (a == "agent") p.answer = GoldAnswer::Agent;
      else if (a == "patient") p.answer = GoldAnswer::Patient;
      else fail("answer", "expected \"agent\" or \"patient\"");
    }
    if (j.contains("pair_id") && j["pair_id"].is_string()) p.pair_id = j["pair_id"].get<std::string>();
    out.push_back(std::move(p));
  }
  return out;
}

// Lexicon-driven tagger. One annotation per tokenizer token; an external
// annotation file (token<TAB>tag[<TAB>lemma] per line) overrides it.
class Annotator {
 public:
  Annotator(const PosLexicon& postags, const Lemmatizer& lemmatizer)
      : postags_(&postags), lemmatizer_(&lemmatizer) {}

  std::vector<TokenAnnotation> annotate(std::string_view text) const {
    auto tokens = tokenize(text);
    std::vector<TokenAnnotation> out;
    out.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      TokenAnnotation a;
      a.token = tokens[i].text;
      a.lower = tokens[i].lower;
      a.lemma = lemmatizer_->lemma(tokens[i].lower);
      a.pos = postags_->tag(tokens[i].lower);
      // "kind of"/"sort of" act as degree modifiers, not nouns.
      if ((tokens[i].lower == "kind" || tokens[i].lower == "sort") && i + 1 < tokens.size() &&
          tokens[i + 1].lower == "of")
        a.pos = Pos::Other;
      a.char_start = tokens[i].start;
      a.char_end = tokens[i].end;
      a.gap_before = tokens[i].gap_before;
      out.push_back(std::move(a));
    }
    return out;
  }

  std::vector<TokenAnnotation> annotate(std::string_view text,
                                        const std::string& external_path) const {
    auto base = annotate(text);
    std::ifstream in(external_path);
    if (!in) throw std::runtime_error("annotate: cannot open " + external_path);
    std::vector<std::pair<Pos, std::string>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (detail::strip(line).empty() || line[0] == '#') continue;
      auto f = detail::split(line, '\t');
      if (f.size() < 2)
        throw std::runtime_error("annotate: " + external_path + " line " +
                                 std::to_string(lineno) + ": expected token<TAB>tag");
      auto tag = pos_from_name(detail::strip(f[1]));
      if (!tag)
        throw std::runtime_error("annotate: " + external_path + " line " +
                                 std::to_string(lineno) + ": unknown tag '" +
                                 detail::strip(f[1]) + "'");
      rows.emplace_back(*tag, f.size() >= 3 ? detail::strip(f[2]) : "");
    }
    if (rows.size() != base.size())
      throw std::runtime_error("annotate: " + external_path + ": " + std::to_string(rows.size()) +
                               " annotations for " + std::to_string(base.size()) + " tokens");
    for (std::size_t i = 0; i < base.size(); ++i) {
      base[i].pos = rows[i].first;
      if (!rows[i].second.empty()) base[i].lemma = rows[i].second;
    }
    return base;
  }

 private:
  const PosLexicon* postags_;
  const Lemmatizer* lemmatizer_;
};

// The schema an instance decomposes into. Predicates are stored both as the
// joined phrase and as their token surfaces; the adjective lists carry the
// clause-level modifiers query generation draws from.
struct SchemaInstance {
  std::string first_entity;
  std::string second_entity;
  std::string first_entity_head;  // determiner-stripped head noun
  std::string context_pred;
  std::vector<std::string> context_pred_tokens;
  std::vector<std::string> context_root_verbs;
  std::vector<std::string> context_adjectives;
  std::string query_pred;
  std::vector<std::string> query_pred_tokens;
  std::vector<std::string> query_root_verbs;
  std::vector<std::string> query_adjectives;
  std::string pronoun;
  std::optional<std::string> connective;
  bool pronoun_before_query_pred = true;
  // Character extents, for the clause-position invariants.
  std::size_t split_point = 0;
  Span context_pred_span;
  Span query_pred_span;
};

namespace detail {

inline const std::vector<std::string>& connective_words() {
  static const std::vector<std::string> words = {"because", "so",    "but",   "although",
                                                 "since",   "after", "before"};
  return words;
}

struct TokenRun {
  std::size_t begin = 0;  // token indices, half-open
  std::size_t end = 0;
};

// Maximal runs of tokens accepted by `keep`, never crossing punctuation.
template <typename Pred>
std::vector<TokenRun> collect_runs(const std::vector<TokenAnnotation>& toks, std::size_t lo,
                                   std::size_t hi, Pred keep) {
  std::vector<TokenRun> runs;
  std::size_t i = lo;
  while (i < hi) {
    if (!keep(toks[i])) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < hi && keep(toks[j]) && !toks[j].gap_before) ++j;
    runs.push_back({i, j});
    i = j;
  }
  return runs;
}

inline std::string join_tokens(const std::vector<TokenAnnotation>& toks, const TokenRun& run) {
  std::string out;
  for (std::size_t i = run.begin; i < run.end; ++i) {
    if (!out.empty()) out += ' ';
    out += toks[i].token;
  }
  return out;
}

}  // namespace detail

// Splits the sentence at the discourse connective (first listed connective
// after the second candidate; the two-token "and then" counts), falling back
// to the last comma before the pronoun. The context predicate is the run of
// aux/verb/negation/particle tokens between or adjacent to the candidates;
// the query predicate is the aux/verb/adjective/degree run beside the
// pronoun.
inline SchemaInstance decompose(const ProblemInstance& instance,
                                const std::vector<TokenAnnotation>& annotations) {
  const auto& toks = annotations;
  SchemaInstance schema;
  schema.first_entity = instance.first_text();
  schema.second_entity = instance.second_text();
  schema.pronoun = instance.pronoun_text();

  auto token_at = [&](std::size_t pos) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < toks.size(); ++i)
      if (toks[i].char_start <= pos && pos < toks[i].char_end) return i;
    return std::nullopt;
  };

  // Head of the first candidate: last noun inside the span.
  {
    std::string head;
    for (const auto& t : toks)
      if (t.char_start >= instance.first_candidate.start &&
          t.char_end <= instance.first_candidate.end && t.pos == Pos::Noun)
        head = t.token;
    if (head.empty()) {
      for (const auto& t : toks)
        if (t.char_start >= instance.first_candidate.start &&
            t.char_end <= instance.first_candidate.end)
          head = t.token;
    }
    schema.first_entity_head = head;
  }

  // Clause split.
  std::size_t split_begin = 0, split_end = 0;
  bool found = false;
  for (std::size_t i = 0; i < toks.size() && !found; ++i) {
    if (toks[i].char_start < instance.second_candidate.end) continue;
    if (toks[i].lower == "and" && i + 1 < toks.size() && toks[i + 1].lower == "then") {
      schema.connective = toks[i].token + " " + toks[i + 1].token;
      split_begin = toks[i].char_start;
      split_end = toks[i + 1].char_end;
      found = true;
      break;
    }
    for (const auto& w : detail::connective_words()) {
      if (toks[i].lower == w) {
        schema.connective = toks[i].token;
        split_begin = toks[i].char_start;
        split_end = toks[i].char_end;
        found = true;
        break;
      }
    }
  }
  if (!found) {
    auto comma = instance.text.rfind(',', instance.pronoun.start);
    if (comma == std::string::npos)
      throw SchemaError("no discourse connective or comma before the pronoun");
    split_begin = comma;
    split_end = comma + 1;
  }
  schema.split_point = split_begin;

  // Token index ranges for the two clauses.
  std::size_t context_hi = 0;
  while (context_hi < toks.size() && toks[context_hi].char_end <= split_begin) ++context_hi;
  std::size_t query_lo = context_hi;
  while (query_lo < toks.size() && toks[query_lo].char_start < split_end) ++query_lo;

  // Context predicate.
  auto context_keep = [](const TokenAnnotation& t) {
    return t.pos == Pos::Verb || t.pos == Pos::Aux || PosLexicon::is_negation(t.lower) ||
           PosLexicon::is_particle(t.lower);
  };
  auto has_verb = [&](const detail::TokenRun& r) {
    for (std::size_t i = r.begin; i < r.end; ++i)
      if (toks[i].pos == Pos::Verb || toks[i].pos == Pos::Aux) return true;
    return false;
  };
  auto runs = detail::collect_runs(toks, 0, context_hi, context_keep);
  std::erase_if(runs, [&](const detail::TokenRun& r) { return !has_verb(r); });

  const detail::TokenRun* pred_c = nullptr;
  for (const auto& r : runs) {  // between the candidates
    if (toks[r.begin].char_start >= instance.first_candidate.end &&
        toks[r.end - 1].char_end <= instance.second_candidate.start) {
      pred_c = &r;
      break;
    }
  }
  if (pred_c == nullptr) {  // after the second candidate
    for (const auto& r : runs)
      if (toks[r.begin].char_start >= instance.second_candidate.end) {
        pred_c = &r;
        break;
      }
  }
  if (pred_c == nullptr) {  // before the first candidate
    for (auto it = runs.rbegin(); it != runs.rend(); ++it)
      if (it->end > 0 && toks[it->end - 1].char_end <= instance.first_candidate.start) {
        pred_c = &*it;
        break;
      }
  }
  if (pred_c == nullptr) throw SchemaError("no verb found in context clause");

  schema.context_pred = detail::join_tokens(toks, *pred_c);
  schema.context_pred_span = {toks[pred_c->begin].char_start, toks[pred_c->end - 1].char_end};
  for (std::size_t i = pred_c->begin; i < pred_c->end; ++i) {
    schema.context_pred_tokens.push_back(toks[i].token);
    if (toks[i].pos == Pos::Verb) schema.context_root_verbs.push_back(toks[i].token);
  }
  for (std::size_t i = 0; i < context_hi; ++i)
    if (toks[i].pos == Pos::Adj) {
      bool dup = false;
      for (const auto& a : schema.context_adjectives) dup = dup || a == toks[i].token;
      if (!dup) schema.context_adjectives.push_back(toks[i].token);
    }

  // Query predicate.
  auto pron_tok = token_at(instance.pronoun.start);
  auto query_keep = [](const TokenAnnotation& t) {
    return t.pos == Pos::Verb || t.pos == Pos::Aux || t.pos == Pos::Adj ||
           PosLexicon::is_degree(t.lower) || PosLexicon::is_negation(t.lower) ||
           PosLexicon::is_particle(t.lower);
  };
  auto qruns = detail::collect_runs(toks, query_lo, toks.size(), query_keep);
  std::erase_if(qruns, [&](const detail::TokenRun& r) {
    for (std::size_t i = r.begin; i < r.end; ++i)
      if (toks[i].pos == Pos::Verb || toks[i].pos == Pos::Aux || toks[i].pos == Pos::Adj)
        return false;
    return true;
  });
  if (qruns.empty()) throw SchemaError("no predicate found in query clause");

  const detail::TokenRun* pred_q = nullptr;
  if (pron_tok) {
    for (const auto& r : qruns)
      if (r.begin == *pron_tok + 1) pred_q = &r;  // directly after the pronoun
    if (pred_q == nullptr)
      for (const auto& r : qruns)
        if (r.end == *pron_tok) pred_q = &r;  // directly before it
  }
  if (pred_q == nullptr) {
    // Nearest run to the pronoun in token distance.
    std::size_t best = SIZE_MAX;
    for (const auto& r : qruns) {
      std::size_t anchor = pron_tok.value_or(query_lo);
      std::size_t d = r.begin >= anchor ? r.begin - anchor : anchor - (r.end - 1);
      if (d < best) {
        best = d;
        pred_q = &r;
      }
    }
  }

  schema.query_pred = detail::join_tokens(toks, *pred_q);
  schema.query_pred_span = {toks[pred_q->begin].char_start, toks[pred_q->end - 1].char_end};
  for (std::size_t i = pred_q->begin; i < pred_q->end; ++i) {
    schema.query_pred_tokens.push_back(toks[i].token);
    if (toks[i].pos == Pos::Verb) schema.query_root_verbs.push_back(toks[i].token);
  }
  for (std::size_t i = query_lo; i < toks.size(); ++i)
    if (toks[i].pos == Pos::Adj) {
      bool dup = false;
      for (const auto& a : schema.query_adjectives) dup = dup || a == toks[i].token;
      if (!dup) schema.query_adjectives.push_back(toks[i].token);
    }
  schema.pronoun_before_query_pred = pron_tok && *pron_tok < pred_q->begin;

  return schema;
}

}  // namespace knowhunt
