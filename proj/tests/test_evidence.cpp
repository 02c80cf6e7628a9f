#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "knowhunt/evidence.hpp"

using namespace knowhunt;

namespace {

const Lexicon& demo_lexicon() {
  static Lexicon lex = Lexicon::load(testutil::data_path("lexicon"));
  return lex;
}

std::vector<TokenAnnotation> annotate(const std::string& text) {
  Annotator annotator(demo_lexicon().postags, demo_lexicon().lemmatizer);
  return annotator.annotate(text);
}

// Builds a snippet whose term spans are located by plain substring search.
Snippet snip(const std::string& text, const std::string& term_c, const std::string& term_q) {
  Snippet s;
  s.text = text;
  auto c = text.find(term_c);
  auto q = text.find(term_q);
  REQUIRE(c != std::string::npos);
  REQUIRE(q != std::string::npos);
  if (q == c) q = text.find(term_q, c + 1);
  REQUIRE(q != std::string::npos);
  s.term_c_span = {c, c + term_c.size()};
  s.term_q_span = {q, q + term_q.size()};
  s.matched_term_c = term_c;
  s.matched_term_q = term_q;
  return s;
}

EvidenceParse parsed(const std::string& text, const std::string& c, const std::string& q) {
  auto s = snip(text, c, q);
  return resolve_coref(parse_evidence(s, annotate(text), demo_lexicon().wordlists),
                       demo_lexicon().wordlists);
}

Span find_span(const std::string& text, const std::string& term) {
  auto pos = text.find(term);
  REQUIRE(pos != std::string::npos);
  return {pos, pos + term.size()};
}

}  // namespace

TEST_CASE("detect_mentions finds NP runs with noun heads outside term spans") {
  std::string text = "The older students were bullying the younger kids";
  auto toks = annotate(text);
  auto mentions = detect_mentions(toks, find_span(text, "were bullying"), Span{0, 0});
  REQUIRE(mentions.size() == 2);
  CHECK(mentions[0].text == "The older students");
  CHECK(mentions[0].head == "students");
  CHECK(mentions[0].head_lemma == "student");
  CHECK(mentions[0].head_pos == Pos::Noun);
  CHECK(mentions[1].text == "the younger kids");
  CHECK(mentions[1].head == "kids");
}

TEST_CASE("detect_mentions uses the pronoun as head when no noun is present") {
  std::string text = "He was bullied";
  auto toks = annotate(text);
  auto mentions = detect_mentions(toks, find_span(text, "bullied"), Span{0, 0});
  REQUIRE(mentions.size() == 1);
  CHECK(mentions[0].head == "He");
  CHECK(mentions[0].head_lower == "he");
  CHECK(mentions[0].head_pos == Pos::Pron);
}

TEST_CASE("detect_voice flags be-auxiliary before a non-gerund verb") {
  const auto& wl = demo_lexicon().wordlists;
  std::string passive = "I was bullied";
  CHECK(detail::detect_voice(annotate(passive), find_span(passive, "bullied"), wl) ==
        Voice::Passive);

  std::string progressive = "They were bullying the kids";
  CHECK(detail::detect_voice(annotate(progressive), find_span(progressive, "were bullying"), wl) ==
        Voice::Active);

  std::string two_token = "they are being bullied";
  CHECK(detail::detect_voice(annotate(two_token), find_span(two_token, "bullied"), wl) ==
        Voice::Passive);

  std::string active = "He rescued me";
  CHECK(detail::detect_voice(annotate(active), find_span(active, "rescued"), wl) == Voice::Active);

  std::string no_verb = "was so weak";
  CHECK(detail::detect_voice(annotate(no_verb), find_span(no_verb, "so weak"), wl) ==
        Voice::Active);
}

TEST_CASE("detect_causative requires a causative lemma with no following NP") {
  const auto& wl = demo_lexicon().wordlists;
  std::string intrans = "The window shattered";
  CHECK(detail::detect_causative(annotate(intrans), find_span(intrans, "shattered"), wl));

  std::string trans = "She moved the table";
  CHECK_FALSE(detail::detect_causative(annotate(trans), find_span(trans, "moved"), wl));

  std::string intrans2 = "The curtain moved";
  CHECK(detail::detect_causative(annotate(intrans2), find_span(intrans2, "moved"), wl));

  std::string non_causative = "He rescued me";
  CHECK_FALSE(
      detail::detect_causative(annotate(non_causative), find_span(non_causative, "rescued"), wl));
}

TEST_CASE("parse_evidence fills the four structures first-fit") {
  SUBCASE("pattern 1: entities around Term_C, mention before Term_Q") {
    auto p = parsed("He comforted her because she was so upset.", "comforted", "was so upset");
    CHECK(p.pattern == 1);
    REQUIRE(p.e1p);
    REQUIRE(p.e2p);
    REQUIRE(p.e3p);
    CHECK(p.e1p->head_lower == "he");
    CHECK(p.e2p->head_lower == "her");
    CHECK(p.e3p->head_lower == "she");
  }
  SUBCASE("pattern 2: mention after Term_Q") {
    auto p = parsed("I carried them, tired us.", "carried", "tired");
    CHECK(p.pattern == 2);
    REQUIRE(p.e2p);
    CHECK(p.e2p->head_lower == "them");
    REQUIRE(p.e3p);
    CHECK(p.e3p->head_lower == "us");
  }
  SUBCASE("pattern 3: no E2 slot, mention before Term_Q") {
    auto p = parsed("She was so weak she couldn't lift", "couldn't lift", "was so weak");
    CHECK(p.pattern == 3);
    CHECK_FALSE(p.e2p);
    REQUIRE(p.e3p);
    CHECK(p.e3p->head_lower == "she");
  }
  SUBCASE("pattern 4: no E2 slot, mention after Term_Q") {
    auto p = parsed("He carried on, too tired, the man rested.", "carried", "tired");
    CHECK(p.pattern == 4);
    CHECK_FALSE(p.e2p);
    REQUIRE(p.e3p);
    CHECK(p.e3p->head_lower == "man");
  }
  SUBCASE("pattern 0: no mentions at all") {
    auto p = parsed("carried and rested.", "carried", "rested");
    CHECK(p.pattern == 0);
    CHECK(p.coref_target == CorefTarget::Unresolved);
  }
}

TEST_CASE("coref cascade step a: head identity unless third-person pronoun") {
  auto p = parsed("The dog chased the ball and the dog yelled.", "chased", "yelled");
  CHECK(p.pattern == 1);
  CHECK(p.coref_target == CorefTarget::E1p);

  // First-person pronouns resolve by canonical identity.
  auto fx = parsed("However I was so weak that I couldn't lift", "couldn't lift", "was so weak");
  CHECK(fx.coref_target == CorefTarget::E1p);

  // he...he stays unresolved: identity says nothing for third person.
  auto he = parsed("He followed him and he yelled.", "followed", "yelled");
  CHECK(he.pattern == 1);
  CHECK(he.coref_target == CorefTarget::Unresolved);
}

TEST_CASE("coref cascade step b: agreement features unique to one side") {
  auto p = parsed("He comforted her because she was so upset.", "comforted", "was so upset");
  CHECK(p.coref_target == CorefTarget::E2p);  // she: her agrees, he does not

  auto q = parsed("He followed her and he yelled.", "followed", "yelled");
  CHECK(q.coref_target == CorefTarget::E1p);  // he: only E1' agrees

  auto r = parsed("He tried to call her but she wasn't available", "tried to call",
                  "wasn't available");
  CHECK(r.pattern == 1);
  CHECK(r.coref_target == CorefTarget::E2p);
}

TEST_CASE("coref cascade step c: first-person chain") {
  auto p = parsed("I carried them, tired us.", "carried", "tired");
  CHECK(p.pattern == 2);
  CHECK(p.coref_target == CorefTarget::E1p);  // us is first person, like I but not them
}

TEST_CASE("coref cascade step d: neuter pronoun against a lone common noun") {
  auto p = parsed("It hit the window and it shattered.", "hit", "shattered");
  CHECK(p.pattern == 1);
  CHECK(p.coref_target == CorefTarget::E2p);  // both agree; only the window is a common noun
}

TEST_CASE("labeling rule matrix") {
  auto make = [](CorefTarget t, Voice vc, Voice vq, bool causative, int pattern) {
    EvidenceParse p;
    p.coref_target = t;
    p.voice_c = vc;
    p.voice_q = vq;
    p.causative = causative;
    p.pattern = pattern;
    return p;
  };
  const auto A = Voice::Active;
  const auto P = Voice::Passive;

  // 1: agent coref, active -> EA
  CHECK(label(make(CorefTarget::E1p, A, A, false, 1)) == EvidenceLabel::EA);
  // 2: patient coref, passive -> EA
  CHECK(label(make(CorefTarget::E2p, P, A, false, 1)) == EvidenceLabel::EA);
  // 3: patient coref, active -> EP
  CHECK(label(make(CorefTarget::E2p, A, A, false, 1)) == EvidenceLabel::EP);
  // 4: agent coref, passive -> EP
  CHECK(label(make(CorefTarget::E1p, P, A, false, 1)) == EvidenceLabel::EP);
  // 5: agent coref, causative -> EP regardless of voice
  CHECK(label(make(CorefTarget::E1p, A, A, true, 1)) == EvidenceLabel::EP);
  CHECK(label(make(CorefTarget::E1p, P, A, true, 1)) == EvidenceLabel::EP);
  // causative does not override for patient coref
  CHECK(label(make(CorefTarget::E2p, P, A, true, 1)) == EvidenceLabel::EA);
  // passive on the query predicate alone counts
  CHECK(label(make(CorefTarget::E1p, A, P, false, 1)) == EvidenceLabel::EP);
  // unresolved -> insufficient; force treats a matched structure as agent coref
  CHECK(label(make(CorefTarget::Unresolved, A, A, false, 2)) == EvidenceLabel::Insufficient);
  CHECK(label(make(CorefTarget::Unresolved, A, A, false, 2), true) == EvidenceLabel::EA);
  // force never applies without a matched structure
  CHECK(label(make(CorefTarget::Unresolved, A, A, false, 0), true) == EvidenceLabel::Insufficient);
}

TEST_CASE("voice flip symmetry on randomized parses") {
  std::mt19937 rng(1234);
  for (int i = 0; i < 1000; ++i) {
    EvidenceParse p;
    p.coref_target = (rng() & 1) != 0 ? CorefTarget::E1p : CorefTarget::E2p;
    p.pattern = 1 + static_cast<int>(rng() % 4);
    p.causative = false;
    p.voice_q = Voice::Active;
    p.voice_c = (rng() & 1) != 0 ? Voice::Passive : Voice::Active;

    EvidenceParse flipped = p;
    flipped.voice_c = p.voice_c == Voice::Active ? Voice::Passive : Voice::Active;

    auto l1 = label(p);
    auto l2 = label(flipped);
    REQUIRE(l1 != l2);
    REQUIRE(((l1 == EvidenceLabel::EA && l2 == EvidenceLabel::EP) ||
             (l1 == EvidenceLabel::EP && l2 == EvidenceLabel::EA)));
  }
}

TEST_CASE("score adds length and order components") {
  std::string text =
      "She tried to call for him and then search for him herself, but wasn't successful";
  auto four = score(snip(text, "tried to call", "wasn't successful"));
  CHECK(four.len_score == 2);
  CHECK(four.order_score == 2);
  CHECK(four.strength == 4);

  std::string sudafed = "Has your husband tried Sudafed and was it successful?";
  auto three = score(snip(sudafed, "tried", "successful"));
  CHECK(three.len_score == 1);
  CHECK(three.order_score == 2);
  CHECK(three.strength == 3);

  // Reversed order relative to the schema costs a point.
  auto reversed = score(snip(sudafed, "successful", "tried"));
  CHECK(reversed.strength == 2);
  // A reversed-order schema (COPA result relation) inverts the bonus.
  auto reversed_schema = score(snip(sudafed, "successful", "tried"), false);
  CHECK(reversed_schema.strength == 3);
}

TEST_CASE("score honors custom weights") {
  std::string text = "Has your husband tried Sudafed and was it successful?";
  ScoreWeights w{5, 2, 7, 3};
  auto s = score(snip(text, "tried", "successful"), true, w);
  CHECK(s.len_score == 2);
  CHECK(s.order_score == 7);
  CHECK(s.strength == 9);
  auto multi = score(snip(text, "husband tried", "successful"), true, w);
  CHECK(multi.strength == 12);
}

TEST_CASE("analyze_snippet runs the full per-snippet chain") {
  std::string text = "She was so weak she couldn't lift";
  auto s = snip(text, "couldn't lift", "was so weak");
  auto e = analyze_snippet(s, annotate(text), demo_lexicon().wordlists);
  CHECK(e.parse.pattern == 3);
  CHECK(e.parse.coref_target == CorefTarget::E1p);
  CHECK(e.label == EvidenceLabel::EA);
  CHECK(e.strength == 3);  // multi-word terms, but Term_Q precedes Term_C

  // Force labeling promotes an unresolved but structured parse.
  std::string amb = "He followed him and he yelled.";
  auto amb_snip = snip(amb, "followed", "yelled");
  auto plain = analyze_snippet(amb_snip, annotate(amb), demo_lexicon().wordlists);
  CHECK(plain.label == EvidenceLabel::Insufficient);
  auto forced = analyze_snippet(amb_snip, annotate(amb), demo_lexicon().wordlists, true);
  CHECK(forced.label == EvidenceLabel::EA);
}
