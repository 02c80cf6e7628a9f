// Snippet-side analysis: locate entity mentions around the matched terms,
// fit one of the four evidence structures (E1' Pred_C' [E2'] ... E3'
// around Pred_Q'), resolve E3' to E1' or E2' with an agreement cascade,
// assign the evidence-agent / evidence-patient label, and score strength.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "knowhunt/lexicon.hpp"
#include "knowhunt/retrieval.hpp"
#include "knowhunt/schema.hpp"

namespace knowhunt {

enum class EvidenceLabel : std::uint8_t { EA, EP, Insufficient };
enum class Voice : std::uint8_t { Active, Passive };
enum class CorefTarget : std::uint8_t { E1p, E2p, Unresolved };

inline const char* evidence_label_name(EvidenceLabel l) {
  switch (l) {
    case EvidenceLabel::EA: return "EA";
    case EvidenceLabel::EP: return "EP";
    case EvidenceLabel::Insufficient: return "insufficient";
  }
  return "?";
}

inline const char* coref_target_name(CorefTarget t) {
  switch (t) {
    case CorefTarget::E1p: return "E1'";
    case CorefTarget::E2p: return "E2'";
    case CorefTarget::Unresolved: return "unresolved";
  }
  return "?";
}

// A noun phrase or pronoun occurrence; head is the last noun in the run
// (the pronoun itself for bare pronouns).
struct Mention {
  std::string text;
  std::string head;
  std::string head_lower;
  std::string head_lemma;
  Pos head_pos = Pos::Noun;
  std::size_t tok_begin = 0;
  std::size_t tok_end = 0;
  std::size_t char_start = 0;
  std::size_t char_end = 0;
};

struct EvidenceParse {
  std::optional<Mention> e1p, e2p, e3p;
  Span pred_cp, pred_qp;  // char spans of the matched terms
  int pattern = 0;        // 1..4; 0 when no structure fits
  CorefTarget coref_target = CorefTarget::Unresolved;
  Voice voice_c = Voice::Active;
  Voice voice_q = Voice::Active;
  bool causative = false;
};

struct ScoreWeights {
  int len_multi = 2;
  int len_single = 1;
  int order_match = 2;
  int order_mismatch = 1;
};

struct Scores {
  int len_score = 1;
  int order_score = 1;
  int strength = 2;
};

struct EvidenceSentence {
  Snippet snippet;
  EvidenceParse parse;
  EvidenceLabel label = EvidenceLabel::Insufficient;
  int len_score = 1;
  int order_score = 1;
  int strength = 2;
};

namespace detail {

inline bool overlaps_span(std::size_t lo, std::size_t hi, const Span& s) {
  return lo < s.end && s.start < hi;
}

}  // namespace detail

// Maximal determiner/adjective/noun/pronoun runs containing at least one
// noun or pronoun, outside the matched term spans.
inline std::vector<Mention> detect_mentions(const std::vector<TokenAnnotation>& toks,
                                            const Span& c_span, const Span& q_span) {
  std::vector<Mention> out;
  auto in_np = [&](const TokenAnnotation& t) {
    if (detail::overlaps_span(t.char_start, t.char_end, c_span) ||
        detail::overlaps_span(t.char_start, t.char_end, q_span))
      return false;
    return t.pos == Pos::Noun || t.pos == Pos::Pron || t.pos == Pos::Adj ||
           PosLexicon::is_determiner(t.lower);
  };
  std::size_t i = 0;
  while (i < toks.size()) {
    if (!in_np(toks[i])) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < toks.size() && in_np(toks[j]) && !toks[j].gap_before) ++j;
    // Head: last noun in the run, else last pronoun.
    std::size_t head = j;
    for (std::size_t k = i; k < j; ++k)
      if (toks[k].pos == Pos::Noun) head = k;
    if (head == j)
      for (std::size_t k = i; k < j; ++k)
        if (toks[k].pos == Pos::Pron) head = k;
    if (head != j) {
      Mention m;
      for (std::size_t k = i; k < j; ++k) {
        if (!m.text.empty()) m.text += ' ';
        m.text += toks[k].token;
      }
      m.head = toks[head].token;
      m.head_lower = to_lower(m.head);
      m.head_lemma = toks[head].lemma;
      m.head_pos = toks[head].pos;
      m.tok_begin = i;
      m.tok_end = j;
      m.char_start = toks[i].char_start;
      m.char_end = toks[j - 1].char_end;
      out.push_back(std::move(m));
    }
    i = j;
  }
  return out;
}

namespace detail {

inline Voice detect_voice(const std::vector<TokenAnnotation>& toks, const Span& term,
                          const WordLists& lists) {
  // Find the first verb of the matched term; a preceding auxiliary phrase
  // from the passive list flips the voice. Non-verbal terms stay active.
  std::size_t v = toks.size();
  for (std::size_t i = 0; i < toks.size(); ++i)
    if (toks[i].pos == Pos::Verb && toks[i].char_start >= term.start &&
        toks[i].char_end <= term.end) {
      v = i;
      break;
    }
  if (v == toks.size()) return Voice::Active;
  // A be-auxiliary before an -ing verb is progressive, not passive
  // ("were bullying" vs "were bullied").
  const std::string& vw = toks[v].lower;
  if (vw.size() > 4 && vw.compare(vw.size() - 3, 3, "ing") == 0) return Voice::Active;
  std::size_t max_len = std::max<std::size_t>(1, lists.max_auxiliary_tokens());
  for (std::size_t k = std::min(max_len, v); k >= 1; --k) {
    bool contiguous = true;
    std::string phrase;
    for (std::size_t i = v - k; i < v; ++i) {
      if (i > v - k && toks[i].gap_before) contiguous = false;
      if (!phrase.empty()) phrase += ' ';
      phrase += toks[i].lower;
    }
    if (toks[v].gap_before) contiguous = false;
    if (contiguous && lists.is_auxiliary(phrase)) return Voice::Passive;
  }
  return Voice::Active;
}

inline bool detect_causative(const std::vector<TokenAnnotation>& toks, const Span& term,
                             const WordLists& lists) {
  // Causative-alternating verb used intransitively: no noun phrase starts
  // right after the matched term.
  std::size_t v = toks.size();
  for (std::size_t i = 0; i < toks.size(); ++i)
    if (toks[i].pos == Pos::Verb && toks[i].char_start >= term.start &&
        toks[i].char_end <= term.end)
      v = i;  // last verb in the span
  if (v == toks.size()) return false;
  if (!lists.is_causative(toks[v].lemma)) return false;
  std::size_t next = toks.size();
  for (std::size_t i = v + 1; i < toks.size(); ++i)
    if (toks[i].char_start >= term.end) {
      next = i;
      break;
    }
  if (next == toks.size()) return true;  // sentence ends: intransitive
  const auto& t = toks[next];
  bool object_start = t.pos == Pos::Noun || t.pos == Pos::Pron || t.pos == Pos::Adj ||
                      PosLexicon::is_determiner(t.lower);
  return !object_start;
}

}  // namespace detail

// Slot filling by position: E1' is the nearest mention before Term_C, E2'
// the nearest after it, E3' the nearest before (patterns 1/3) or after
// (patterns 2/4) Term_Q, distinct from the other slots. The first of the
// four structures whose slots all fill wins.
inline EvidenceParse parse_evidence(const Snippet& snippet,
                                    const std::vector<TokenAnnotation>& toks,
                                    const WordLists& lists) {
  EvidenceParse parse;
  parse.pred_cp = snippet.term_c_span;
  parse.pred_qp = snippet.term_q_span;
  auto mentions = detect_mentions(toks, snippet.term_c_span, snippet.term_q_span);

  const Span& c = snippet.term_c_span;
  const Span& q = snippet.term_q_span;

  const Mention* e1 = nullptr;
  for (const auto& m : mentions)
    if (m.char_end <= c.start && (e1 == nullptr || m.char_start > e1->char_start)) e1 = &m;

  const Mention* e2 = nullptr;
  bool c_before_q = c.start < q.start;
  for (const auto& m : mentions) {
    if (m.char_start < c.end) continue;
    if (c_before_q && m.char_end > q.start) continue;  // E2' sits between the terms
    if (e2 == nullptr || m.char_start < e2->char_start) e2 = &m;
  }

  auto e3_before = [&](const Mention* skip1, const Mention* skip2) -> const Mention* {
    const Mention* best = nullptr;
    for (const auto& m : mentions) {
      if (m.char_end > q.start) continue;
      if ((skip1 != nullptr && m.tok_begin == skip1->tok_begin) ||
          (skip2 != nullptr && m.tok_begin == skip2->tok_begin))
        continue;
      if (best == nullptr || m.char_start > best->char_start) best = &m;
    }
    return best;
  };
  auto e3_after = [&](const Mention* skip1, const Mention* skip2) -> const Mention* {
    const Mention* best = nullptr;
    for (const auto& m : mentions) {
      if (m.char_start < q.end) continue;
      if ((skip1 != nullptr && m.tok_begin == skip1->tok_begin) ||
          (skip2 != nullptr && m.tok_begin == skip2->tok_begin))
        continue;
      if (best == nullptr || m.char_start < best->char_start) best = &m;
    }
    return best;
  };

  const Mention* e3 = nullptr;
  if (e1 != nullptr && e2 != nullptr && (e3 = e3_before(e1, e2)) != nullptr) {
    parse.pattern = 1;
    parse.e2p = *e2;
  } else if (e1 != nullptr && e2 != nullptr && (e3 = e3_after(e1, e2)) != nullptr) {
    parse.pattern = 2;
    parse.e2p = *e2;
  } else if (e1 != nullptr && (e3 = e3_before(e1, nullptr)) != nullptr) {
    parse.pattern = 3;
  } else if (e1 != nullptr && (e3 = e3_after(e1, nullptr)) != nullptr) {
    parse.pattern = 4;
  }
  if (parse.pattern != 0) {
    parse.e1p = *e1;
    parse.e3p = *e3;
  }

  parse.voice_c = detail::detect_voice(toks, c, lists);
  parse.voice_q = detail::detect_voice(toks, q, lists);
  parse.causative =
      detail::detect_causative(toks, c, lists) || detail::detect_causative(toks, q, lists);
  return parse;
}

// Cascade: (a) head lemma identity, unless E3' is a third-person pronoun
// (he...he says nothing); (b) pronoun gender/number/person agreement unique
// to one candidate, nouns counting as compatible; (c) first-person chain;
// (d) neuter pronoun against a lone common-noun candidate.
inline EvidenceParse resolve_coref(EvidenceParse parse, const WordLists& lists) {
  parse.coref_target = CorefTarget::Unresolved;
  if (parse.pattern == 0 || !parse.e3p) return parse;
  const Mention& e3 = *parse.e3p;
  bool pron3 = e3.head_pos == Pos::Pron || lists.is_pronoun(e3.head_lower);
  auto feats3 = lists.pronoun_features(e3.head_lower);

  auto norm = [&](const Mention& m) {
    if (m.head_pos == Pos::Pron || lists.is_pronoun(m.head_lower))
      return lists.pronoun_canonical(m.head_lower);
    return to_lower(m.head_lemma);
  };

  bool third = pron3 && feats3 && feats3->person == PersonFeat::Third;
  if (!third) {
    std::string n3 = norm(e3);
    bool m1 = parse.e1p && norm(*parse.e1p) == n3;
    bool m2 = parse.e2p && norm(*parse.e2p) == n3;
    if (m1 != m2) {
      parse.coref_target = m1 ? CorefTarget::E1p : CorefTarget::E2p;
      return parse;
    }
  }

  if (pron3 && feats3) {
    auto compatible = [&](const Mention& m) {
      auto f = lists.pronoun_features(m.head_lower);
      if (!f) return true;  // nouns carry no features; give benefit of doubt
      auto clash = [](auto a, auto b, auto unknown) { return a != unknown && b != unknown && a != b; };
      if (clash(f->gender, feats3->gender, Gender::Unknown)) return false;
      if (clash(f->number, feats3->number, NumberFeat::Unknown)) return false;
      if (clash(f->person, feats3->person, PersonFeat::Unknown)) return false;
      return true;
    };
    bool c1 = parse.e1p && compatible(*parse.e1p);
    bool c2 = parse.e2p && compatible(*parse.e2p);
    if (c1 != c2) {
      parse.coref_target = c1 ? CorefTarget::E1p : CorefTarget::E2p;
      return parse;
    }

    if (feats3->person == PersonFeat::First) {
      auto first_person = [&](const Mention& m) {
        auto f = lists.pronoun_features(m.head_lower);
        return f && f->person == PersonFeat::First;
      };
      bool f1 = parse.e1p && first_person(*parse.e1p);
      bool f2 = parse.e2p && first_person(*parse.e2p);
      if (f1 != f2) {
        parse.coref_target = f1 ? CorefTarget::E1p : CorefTarget::E2p;
        return parse;
      }
    }

    if (feats3->gender == Gender::Neuter) {
      auto common_noun = [&](const Mention& m) {
        return m.head_pos == Pos::Noun && !lists.is_pronoun(m.head_lower);
      };
      bool n1 = parse.e1p && common_noun(*parse.e1p);
      bool n2 = parse.e2p && common_noun(*parse.e2p);
      if (n1 != n2) {
        parse.coref_target = n1 ? CorefTarget::E1p : CorefTarget::E2p;
        return parse;
      }
    }
  }
  return parse;
}

// Rules: (1) E3'->E1' active => EA; (2) E3'->E2' passive => EA;
// (3) E3'->E2' active => EP; (4) E3'->E1' passive => EP;
// (5) E3'->E1' causative => EP (overrides voice). With force set, an
// unresolved parse that still matched a structure is read as E3'->E1'.
inline EvidenceLabel label(const EvidenceParse& parse, bool force = false) {
  CorefTarget target = parse.coref_target;
  if (target == CorefTarget::Unresolved) {
    if (!force || parse.pattern == 0) return EvidenceLabel::Insufficient;
    target = CorefTarget::E1p;
  }
  bool passive = parse.voice_c == Voice::Passive || parse.voice_q == Voice::Passive;
  if (target == CorefTarget::E1p && parse.causative) return EvidenceLabel::EP;
  if (passive) return target == CorefTarget::E1p ? EvidenceLabel::EP : EvidenceLabel::EA;
  return target == CorefTarget::E1p ? EvidenceLabel::EA : EvidenceLabel::EP;
}

// LenScore: either matched term spanning more than one token. OrderScore:
// the terms appear in the same order as in the problem sentence
// (schema_order = true when Pred_C came first there, as in every WSC
// instance).
inline Scores score(const Snippet& snippet, bool schema_order = true,
                    const ScoreWeights& weights = {}) {
  Scores s;
  std::size_t len_c = tokenize(snippet.matched_term_c).size();
  std::size_t len_q = tokenize(snippet.matched_term_q).size();
  s.len_score = (len_c > 1 || len_q > 1) ? weights.len_multi : weights.len_single;
  bool c_before_q = snippet.term_c_span.start < snippet.term_q_span.start;
  s.order_score = (c_before_q == schema_order) ? weights.order_match : weights.order_mismatch;
  s.strength = s.len_score + s.order_score;
  return s;
}

inline EvidenceSentence analyze_snippet(const Snippet& snippet,
                                        const std::vector<TokenAnnotation>& toks,
                                        const WordLists& lists, bool force_label = false,
                                        bool schema_order = true, const ScoreWeights& weights = {}) {
  EvidenceSentence e;
  e.snippet = snippet;
  e.parse = resolve_coref(parse_evidence(snippet, toks, lists), lists);
  e.label = label(e.parse, force_label);
  Scores s = score(snippet, schema_order, weights);
  e.len_score = s.len_score;
  e.order_score = s.order_score;
  e.strength = s.strength;
  return e;
}

}  // namespace knowhunt
