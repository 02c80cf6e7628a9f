// Lexical resources: a hypernym taxonomy with Wu-Palmer similarity and
// synonym lookup, closed word lists (auxiliaries, causative-alternating
// verbs, pronoun features) and the POS lexicon behind the built-in tagger.
// All structures are immutable after load and safe for concurrent readers.
#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "knowhunt/text.hpp"

namespace knowhunt {

enum class Pos : std::uint8_t { Verb, Aux, Adj, Noun, Pron, Conn, Other };

inline const char* pos_name(Pos p) {
  switch (p) {
    case Pos::Verb: return "verb";
    case Pos::Aux: return "aux";
    case Pos::Adj: return "adj";
    case Pos::Noun: return "noun";
    case Pos::Pron: return "pron";
    case Pos::Conn: return "conn";
    case Pos::Other: return "other";
  }
  return "other";
}

inline std::optional<Pos> pos_from_name(std::string_view s) {
  if (s == "verb") return Pos::Verb;
  if (s == "aux") return Pos::Aux;
  if (s == "adj") return Pos::Adj;
  if (s == "noun") return Pos::Noun;
  if (s == "pron") return Pos::Pron;
  if (s == "conn") return Pos::Conn;
  if (s == "other") return Pos::Other;
  return std::nullopt;
}

namespace detail {

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

inline std::string strip(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b])) != 0) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])) != 0) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace detail

// Hypernym DAG loaded from a TSV file, one synset per line:
//   synset_id <TAB> pos(n|v|a) <TAB> lemma,lemma,... <TAB> parent_id,...
// Parents empty marks a root. Depth convention: a root has depth 1; with
// multiple parents a node's depth is one more than its deepest parent.
class Taxonomy {
 public:
  struct Synset {
    std::string id;
    Pos pos = Pos::Noun;
    std::vector<std::string> lemmas;
    std::vector<std::uint32_t> parents;
    std::uint32_t depth = 0;
  };

  static Taxonomy load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("taxonomy: cannot open " + path);
    Taxonomy t;
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::vector<std::string>> parent_names;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      auto fields = detail::split(line, '\t');
      // Roots may omit the parents field entirely.
      if (fields.size() != 3 && fields.size() != 4)
        throw std::runtime_error("taxonomy: line " + std::to_string(lineno) +
                                 ": expected 3 or 4 tab-separated fields");
      Synset s;
      s.id = detail::strip(fields[0]);
      std::string pos = detail::strip(fields[1]);
      if (pos == "n") s.pos = Pos::Noun;
      else if (pos == "v") s.pos = Pos::Verb;
      else if (pos == "a") s.pos = Pos::Adj;
      else
        throw std::runtime_error("taxonomy: line " + std::to_string(lineno) +
                                 ": bad pos '" + pos + "'");
      for (auto& l : detail::split(fields[2], ','))
        if (auto w = detail::strip(l); !w.empty()) s.lemmas.push_back(to_lower(w));
      if (s.lemmas.empty())
        throw std::runtime_error("taxonomy: line " + std::to_string(lineno) + ": no lemmas");
      std::vector<std::string> parents;
      if (fields.size() == 4)
        for (auto& p : detail::split(fields[3], ','))
          if (auto w = detail::strip(p); !w.empty()) parents.push_back(w);
      if (t.index_.count(s.id) != 0)
        throw std::runtime_error("taxonomy: duplicate synset id " + s.id);
      t.index_[s.id] = static_cast<std::uint32_t>(t.synsets_.size());
      t.synsets_.push_back(std::move(s));
      parent_names.push_back(std::move(parents));
    }
    for (std::size_t i = 0; i < t.synsets_.size(); ++i) {
      for (const auto& pname : parent_names[i]) {
        auto it = t.index_.find(pname);
        if (it == t.index_.end())
          throw std::runtime_error("taxonomy: synset " + t.synsets_[i].id +
                                   " names unknown parent " + pname);
        t.synsets_[i].parents.push_back(it->second);
      }
    }
    t.finalize();
    return t;
  }

  // Build directly from synset records (used by tests and generators).
  static Taxonomy build(std::vector<Synset> synsets) {
    Taxonomy t;
    for (auto& s : synsets) {
      if (t.index_.count(s.id) != 0)
        throw std::runtime_error("taxonomy: duplicate synset id " + s.id);
      t.index_[s.id] = static_cast<std::uint32_t>(t.synsets_.size());
      t.synsets_.push_back(std::move(s));
    }
    t.finalize();
    return t;
  }

  std::size_t size() const { return synsets_.size(); }
  const Synset& synset(std::uint32_t idx) const { return synsets_.at(idx); }

  std::optional<std::uint32_t> find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    return it == index_.end() ? std::nullopt : std::optional<std::uint32_t>(it->second);
  }

  // Synsets containing (lemma, pos), in file (sense) order.
  std::vector<std::uint32_t> senses(std::string_view lemma, Pos pos) const {
    auto it = lemma_index_.find(key(to_lower(lemma), pos));
    if (it == lemma_index_.end()) return {};
    return it->second;
  }

  // Lemmas of the first-listed synset for (lemma, pos), minus the query
  // lemma itself. Unknown lemma yields an empty list.
  std::vector<std::string> synonyms(std::string_view lemma, Pos pos) const {
    auto ids = senses(lemma, pos);
    if (ids.empty()) return {};
    std::vector<std::string> out;
    std::string q = to_lower(lemma);
    for (const auto& l : synsets_[ids.front()].lemmas)
      if (l != q) out.push_back(l);
    return out;
  }

  // Wu-Palmer similarity: 2*depth(lcs) / (depth(a)+depth(b)), with the least
  // common subsumer taken at maximal depth. Returns 0 when the two synsets
  // share no ancestor (disjoint roots).
  double wu_palmer(std::string_view a, std::string_view b) const {
    auto ia = find(a), ib = find(b);
    if (!ia) throw std::runtime_error("wu_palmer: unknown synset " + std::string(a));
    if (!ib) throw std::runtime_error("wu_palmer: unknown synset " + std::string(b));
    return wu_palmer_idx(*ia, *ib);
  }

  double wu_palmer_idx(std::uint32_t a, std::uint32_t b) const {
    if (a >= synsets_.size() || b >= synsets_.size())
      throw std::runtime_error("wu_palmer: synset index out of range");
    std::unordered_map<std::uint32_t, bool> seen;
    ancestors(a, seen);
    std::uint32_t best = 0;
    std::vector<std::uint32_t> stack{b};
    std::unordered_set<std::uint32_t> visited;
    while (!stack.empty()) {
      std::uint32_t n = stack.back();
      stack.pop_back();
      if (!visited.insert(n).second) continue;
      if (seen.count(n) != 0) best = std::max(best, synsets_[n].depth);
      for (auto p : synsets_[n].parents) stack.push_back(p);
    }
    if (best == 0) return 0.0;
    return 2.0 * best / (synsets_[a].depth + synsets_[b].depth);
  }

  // Highest Wu-Palmer score over the cross product of the top-k senses of
  // each word, restricted to matching POS. Unknown surface forms fall back
  // to their lemma; 0 when either side has no synset of a shared POS.
  double word_similarity(std::string_view w1, std::string_view w2,
                         const Lemmatizer& lemmatizer, std::size_t top_k = 3) const {
    double best = 0.0;
    for (Pos pos : {Pos::Verb, Pos::Adj, Pos::Noun}) {
      auto s1 = senses_or_lemma(w1, pos, lemmatizer);
      auto s2 = senses_or_lemma(w2, pos, lemmatizer);
      if (s1.size() > top_k) s1.resize(top_k);
      if (s2.size() > top_k) s2.resize(top_k);
      for (auto a : s1)
        for (auto b : s2) best = std::max(best, wu_palmer_idx(a, b));
    }
    return best;
  }

  std::vector<std::string> all_lemmas() const {
    std::vector<std::string> out;
    for (const auto& s : synsets_)
      for (const auto& l : s.lemmas) out.push_back(l);
    return out;
  }

 private:
  static std::string key(std::string lemma, Pos pos) {
    lemma.push_back('\x1f');
    lemma.push_back(static_cast<char>('0' + static_cast<int>(pos)));
    return lemma;
  }

  std::vector<std::uint32_t> senses_or_lemma(std::string_view w, Pos pos,
                                             const Lemmatizer& lemmatizer) const {
    auto direct = senses(w, pos);
    if (!direct.empty()) return direct;
    return senses(lemmatizer.lemma(w), pos);
  }

  void ancestors(std::uint32_t n, std::unordered_map<std::uint32_t, bool>& out) const {
    if (out.count(n) != 0) return;
    out[n] = true;
    for (auto p : synsets_[n].parents) ancestors(p, out);
  }

  void finalize() {
    // Cycle check + depth in one pass. state: 0 unvisited, 1 on stack, 2 done.
    std::vector<int> state(synsets_.size(), 0);
    for (std::uint32_t i = 0; i < synsets_.size(); ++i) compute_depth(i, state);
    for (std::uint32_t i = 0; i < synsets_.size(); ++i) {
      const auto& s = synsets_[i];
      for (const auto& l : s.lemmas) lemma_index_[key(l, s.pos)].push_back(i);
    }
  }

  std::uint32_t compute_depth(std::uint32_t n, std::vector<int>& state) {
    if (state[n] == 1) throw std::runtime_error("taxonomy: cycle through synset " + synsets_[n].id);
    if (state[n] == 2) return synsets_[n].depth;
    state[n] = 1;
    std::uint32_t d = 1;
    for (auto p : synsets_[n].parents) d = std::max(d, compute_depth(p, state) + 1);
    synsets_[n].depth = d;
    state[n] = 2;
    return d;
  }

  std::vector<Synset> synsets_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::unordered_map<std::string, std::vector<std::uint32_t>> lemma_index_;
};

enum class Gender : std::uint8_t { Masculine, Feminine, Neuter, Unknown };
enum class NumberFeat : std::uint8_t { Singular, Plural, Unknown };
enum class PersonFeat : std::uint8_t { First, Second, Third, Unknown };

struct PronounFeatures {
  Gender gender = Gender::Unknown;
  NumberFeat number = NumberFeat::Unknown;
  PersonFeat person = PersonFeat::Unknown;
};

// Closed word lists driving voice detection, causative alternation and the
// pronoun agreement cascade.
class WordLists {
 public:
  static WordLists load(const std::string& dir) {
    WordLists w;
    w.load_set(dir + "/auxiliaries.txt", &w.auxiliaries_);
    w.load_set(dir + "/causatives.txt", &w.causatives_);
    w.load_pronouns(dir + "/pronouns.tsv");
    if (w.auxiliaries_.empty()) throw std::runtime_error("wordlists: auxiliaries.txt is empty");
    if (w.causatives_.empty()) throw std::runtime_error("wordlists: causatives.txt is empty");
    if (w.pronoun_features_.empty()) throw std::runtime_error("wordlists: pronouns.tsv is empty");
    return w;
  }

  bool is_auxiliary(std::string_view phrase) const {
    return auxiliaries_.count(to_lower(phrase)) != 0;
  }
  std::size_t max_auxiliary_tokens() const { return max_aux_tokens_; }

  bool is_causative(std::string_view lemma) const {
    return causatives_.count(to_lower(lemma)) != 0;
  }

  bool is_pronoun(std::string_view word) const {
    return pronoun_features_.count(to_lower(word)) != 0;
  }

  std::optional<PronounFeatures> pronoun_features(std::string_view word) const {
    auto it = pronoun_features_.find(to_lower(word));
    if (it == pronoun_features_.end()) return std::nullopt;
    return it->second;
  }

  // Canonical form shared by the case variants of a pronoun (him/his -> he,
  // me/my -> i). Non-pronouns come back unchanged.
  std::string pronoun_canonical(std::string_view word) const {
    auto it = canonical_.find(to_lower(word));
    return it == canonical_.end() ? to_lower(word) : it->second;
  }

 private:
  void load_set(const std::string& path, std::unordered_set<std::string>* out) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("wordlists: cannot open " + path);
    std::string line;
    while (std::getline(in, line)) {
      auto w = detail::strip(line);
      if (w.empty() || w[0] == '#') continue;
      if (out == &auxiliaries_) {
        std::size_t n = detail::split(w, ' ').size();
        max_aux_tokens_ = std::max(max_aux_tokens_, n);
      }
      out->insert(to_lower(w));
    }
  }

  void load_pronouns(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("wordlists: cannot open " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto w = detail::strip(line);
      if (w.empty() || w[0] == '#') continue;
      auto f = detail::split(line, '\t');
      if (f.size() < 4)
        throw std::runtime_error("wordlists: pronouns.tsv line " + std::to_string(lineno) +
                                 ": expected pronoun, gender, number, person");
      PronounFeatures pf;
      std::string g = detail::strip(f[1]), n = detail::strip(f[2]), p = detail::strip(f[3]);
      if (g == "masc") pf.gender = Gender::Masculine;
      else if (g == "fem") pf.gender = Gender::Feminine;
      else if (g == "neut") pf.gender = Gender::Neuter;
      else pf.gender = Gender::Unknown;
      if (n == "sg") pf.number = NumberFeat::Singular;
      else if (n == "pl") pf.number = NumberFeat::Plural;
      else pf.number = NumberFeat::Unknown;
      if (p == "1") pf.person = PersonFeat::First;
      else if (p == "2") pf.person = PersonFeat::Second;
      else if (p == "3") pf.person = PersonFeat::Third;
      else pf.person = PersonFeat::Unknown;
      pronoun_features_[to_lower(detail::strip(f[0]))] = pf;
    }
    static const std::pair<const char*, const char*> canon[] = {
        {"him", "he"},    {"his", "he"},     {"himself", "he"},
        {"her", "she"},   {"hers", "she"},   {"herself", "she"},
        {"its", "it"},    {"itself", "it"},
        {"them", "they"}, {"their", "they"}, {"theirs", "they"}, {"themselves", "they"},
        {"me", "i"},      {"my", "i"},       {"mine", "i"},      {"myself", "i"},
        {"us", "we"},     {"our", "we"},     {"ours", "we"},     {"ourselves", "we"},
        {"your", "you"},  {"yours", "you"},  {"yourself", "you"},
    };
    for (const auto& [form, base] : canon) canonical_.emplace(form, base);
  }

  std::unordered_set<std::string> auxiliaries_;
  std::unordered_set<std::string> causatives_;
  std::unordered_map<std::string, PronounFeatures> pronoun_features_;
  std::unordered_map<std::string, std::string> canonical_;
  std::size_t max_aux_tokens_ = 1;
};

// Word -> coarse tag table for the built-in tagger, plus the small closed
// classes the chunkers key on. Unknown words default to Noun.
class PosLexicon {
 public:
  static PosLexicon load(const std::string& path) {
    PosLexicon p;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("pos lexicon: cannot open " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto w = detail::strip(line);
      if (w.empty() || w[0] == '#') continue;
      auto f = detail::split(line, '\t');
      if (f.size() < 2)
        throw std::runtime_error("pos lexicon: line " + std::to_string(lineno) +
                                 ": expected word<TAB>tag");
      auto tag = pos_from_name(detail::strip(f[1]));
      if (!tag)
        throw std::runtime_error("pos lexicon: line " + std::to_string(lineno) +
                                 ": unknown tag '" + detail::strip(f[1]) + "'");
      p.tags_[to_lower(detail::strip(f[0]))] = *tag;
    }
    if (p.tags_.empty()) throw std::runtime_error("pos lexicon: no entries in " + path);
    return p;
  }

  Pos tag(std::string_view word) const {
    auto it = tags_.find(to_lower(word));
    if (it != tags_.end()) return it->second;
    return Pos::Noun;
  }

  bool has(std::string_view word) const { return tags_.count(to_lower(word)) != 0; }

  static bool is_determiner(std::string_view w) {
    static const std::unordered_set<std::string> set = {"the",  "a",    "an",  "this",
                                                        "that", "these", "those", "each",
                                                        "every", "some", "any"};
    return set.count(to_lower(w)) != 0;
  }
  static bool is_degree(std::string_view w) {
    static const std::unordered_set<std::string> set = {
        "so",   "too",    "very", "really", "quite", "rather", "extremely",
        "more", "most",   "less", "least",  "kind",  "sort",   "somewhat"};
    return set.count(to_lower(w)) != 0;
  }
  static bool is_particle(std::string_view w) {
    static const std::unordered_set<std::string> set = {
        "in",  "into", "on",  "onto", "at",    "to",   "of",      "with",
        "by",  "for",  "from", "up",  "down",  "out",  "off",     "over",
        "under", "about", "like", "as", "through", "across", "along"};
    return set.count(to_lower(w)) != 0;
  }
  static bool is_negation(std::string_view w) {
    static const std::unordered_set<std::string> set = {"not", "never", "n't"};
    return set.count(to_lower(w)) != 0;
  }

 private:
  std::unordered_map<std::string, Pos> tags_;
};

// The full lexical bundle a pipeline run needs, loaded from one directory:
// taxonomy.tsv, auxiliaries.txt, causatives.txt, pronouns.tsv, postags.tsv.
struct Lexicon {
  Taxonomy taxonomy;
  WordLists wordlists;
  PosLexicon postags;
  Lemmatizer lemmatizer;

  static Lexicon load(const std::string& dir) {
    Lexicon lex;
    lex.taxonomy = Taxonomy::load(dir + "/taxonomy.tsv");
    lex.wordlists = WordLists::load(dir);
    lex.postags = PosLexicon::load(dir + "/postags.tsv");
    for (const auto& l : lex.taxonomy.all_lemmas()) lex.lemmatizer.add_known(l);
    return lex;
  }
};

}  // namespace knowhunt
