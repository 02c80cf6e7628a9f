// Tokenization, sentence splitting and suffix-stripping lemmatization.
// Everything downstream (indexing, schema decomposition, evidence parsing)
// shares these primitives so that offsets agree across modules.
#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace knowhunt {

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '\'';
}

struct Token {
  std::string text;   // surface form
  std::string lower;  // lower-cased surface
  std::size_t start = 0;
  std::size_t end = 0;  // half-open [start, end)
  // True when something other than whitespace (punctuation) separates this
  // token from the previous one. Phrase and NP runs must not cross it.
  bool gap_before = false;
};

// Token = maximal run of letters/digits/apostrophe. A leading or trailing
// bare apostrophe is not part of a token ("'hello'" yields "hello").
inline std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  std::size_t last_end = 0;
  while (i < text.size()) {
    if (!is_word_char(text[i]) || text[i] == '\'') {  // runs never start with '
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && is_word_char(text[j])) ++j;
    while (j > i && text[j - 1] == '\'') --j;  // drop trailing apostrophes
    Token t;
    t.text = std::string(text.substr(i, j - i));
    t.lower = to_lower(t.text);
    t.start = i;
    t.end = j;
    bool gap = false;
    for (std::size_t k = last_end; k < i; ++k) {
      if (std::isspace(static_cast<unsigned char>(text[k])) == 0) gap = true;
    }
    t.gap_before = out.empty() ? false : gap;
    last_end = j;
    out.push_back(std::move(t));
    i = j;
  }
  return out;
}

// Sentence boundary: '.', '!' or '?' followed by whitespace and a capital
// letter. Spans partition the text with no gaps; trailing whitespace
// belongs to the sentence it follows.
inline std::vector<std::pair<std::size_t, std::size_t>> split_sentences(std::string_view text) {
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  if (text.empty()) return spans;
  std::size_t start = 0;
  for (std::size_t i = 0; i + 1 < text.size(); ++i) {
    char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    std::size_t j = i + 1;
    bool saw_space = false;
    while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j])) != 0) {
      saw_space = true;
      ++j;
    }
    if (saw_space && j < text.size() && std::isupper(static_cast<unsigned char>(text[j])) != 0) {
      spans.emplace_back(start, j);
      start = j;
      i = j - 1;
    }
  }
  spans.emplace_back(start, text.size());
  return spans;
}

// Suffix stripper validated against a vocabulary of known base forms.
// Candidates produced by stripping -s/-ed/-ing/-er/-est/'s are accepted only
// when the vocabulary contains them; otherwise a conservative fallback is
// used. Irregular forms come from a small built-in table.
class Lemmatizer {
 public:
  Lemmatizer() { seed_irregulars(); }

  void add_known(std::string_view word) { known_.insert(to_lower(word)); }

  template <typename It>
  void add_known(It begin, It end) {
    for (; begin != end; ++begin) add_known(*begin);
  }

  std::string lemma(std::string_view word) const {
    std::string w = to_lower(word);
    if (auto it = irregular_.find(w); it != irregular_.end()) return it->second;
    if (known_.count(w) != 0) return w;
    if (auto p = strip_possessive(w); !p.empty()) w = p;
    if (known_.count(w) != 0) return w;

    auto try_candidates = [&](const std::vector<std::string>& cands,
                              std::string* result) {
      for (const auto& c : cands) {
        if (!c.empty() && known_.count(c) != 0) {
          *result = c;
          return true;
        }
      }
      return false;
    };

    std::string r;
    if (ends_with(w, "ies") && w.size() > 4) {
      if (try_candidates({w.substr(0, w.size() - 3) + "y"}, &r)) return r;
    }
    if (ends_with(w, "ing") && w.size() > 5) {
      std::string stem = w.substr(0, w.size() - 3);
      if (try_candidates({stem, stem + "e", undouble(stem)}, &r)) return r;
      return stem;
    }
    if (ends_with(w, "ed") && w.size() > 4) {
      std::string stem_d = w.substr(0, w.size() - 1);   // "rescued" -> "rescue"
      std::string stem_ed = w.substr(0, w.size() - 2);  // "punished" -> "punish"
      if (try_candidates({stem_d, stem_ed, undouble(stem_ed)}, &r)) return r;
      return stem_ed;
    }
    if (ends_with(w, "est") && w.size() > 5) {
      std::string stem = w.substr(0, w.size() - 3);
      if (try_candidates({stem, stem + "e", undouble(stem)}, &r)) return r;
    }
    if (ends_with(w, "er") && w.size() > 4) {
      std::string stem = w.substr(0, w.size() - 2);
      if (try_candidates({stem, stem + "e", undouble(stem)}, &r)) return r;
    }
    if (ends_with(w, "s") && !ends_with(w, "ss") && w.size() > 3) {
      std::string stem = w.substr(0, w.size() - 1);
      if (ends_with(w, "es")) {
        if (try_candidates({stem, w.substr(0, w.size() - 2)}, &r)) return r;
      }
      if (try_candidates({stem}, &r)) return r;
      return stem;
    }
    return w;
  }

 private:
  static bool ends_with(std::string_view s, std::string_view suf) {
    return s.size() >= suf.size() && s.substr(s.size() - suf.size()) == suf;
  }

  static std::string undouble(const std::string& s) {
    if (s.size() >= 2 && s[s.size() - 1] == s[s.size() - 2]) return s.substr(0, s.size() - 1);
    return {};
  }

  static std::string strip_possessive(const std::string& w) {
    if (ends_with(w, "'s")) return w.substr(0, w.size() - 2);
    if (ends_with(w, "s'")) return w.substr(0, w.size() - 1);
    return {};
  }

  void seed_irregulars() {
    static const std::pair<const char*, const char*> table[] = {
        {"was", "be"},      {"were", "be"},     {"is", "be"},      {"are", "be"},
        {"am", "be"},       {"been", "be"},     {"being", "be"},   {"has", "have"},
        {"had", "have"},    {"did", "do"},      {"does", "do"},    {"done", "do"},
        {"went", "go"},     {"gone", "go"},     {"got", "get"},    {"gotten", "get"},
        {"ran", "run"},     {"ate", "eat"},     {"eaten", "eat"},  {"saw", "see"},
        {"seen", "see"},    {"took", "take"},   {"taken", "take"}, {"gave", "give"},
        {"given", "give"},  {"made", "make"},   {"said", "say"},   {"told", "tell"},
        {"felt", "feel"},   {"kept", "keep"},   {"left", "leave"}, {"lost", "lose"},
        {"met", "meet"},    {"paid", "pay"},    {"sat", "sit"},    {"stood", "stand"},
        {"threw", "throw"}, {"thrown", "throw"},{"broke", "break"},{"broken", "break"},
        {"came", "come"},   {"found", "find"},  {"held", "hold"},  {"heard", "hear"},
        {"fell", "fall"},   {"fallen", "fall"}, {"men", "man"},    {"women", "woman"},
        {"children", "child"}, {"people", "person"}, {"feet", "foot"}, {"wrote", "write"},
        {"written", "write"}, {"spoke", "speak"}, {"spoken", "speak"}, {"sang", "sing"},
        {"drank", "drink"}, {"drove", "drive"}, {"knew", "know"},  {"known", "know"},
        {"better", "good"}, {"best", "good"},   {"worse", "bad"},  {"worst", "bad"},
    };
    for (const auto& [form, base] : table) irregular_.emplace(form, base);
  }

  std::unordered_set<std::string> known_;
  std::unordered_map<std::string, std::string> irregular_;
};

}  // namespace knowhunt
