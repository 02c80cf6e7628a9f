// Snippet retrieval: an offline corpus index with phrase/proximity search,
// plus a recorded-fixture provider, both behind one provider interface.
// Matching rules: multi-word terms match surface tokens contiguously,
// single-word terms may also match by lemma; both terms must fall in the
// same or adjacent sentences with at most 70 characters between them, and
// documents containing an exclusion term yield nothing.
#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "knowhunt/querygen.hpp"
#include "knowhunt/text.hpp"

namespace knowhunt {

constexpr std::size_t kProximityWindow = 70;  // max chars between the matched spans
constexpr std::size_t kDefaultSnippetLimit = 100;

struct Snippet {
  std::string text;
  std::string doc_id;
  Span term_c_span;  // char spans local to text
  Span term_q_span;
  std::string matched_term_c;
  std::string matched_term_q;
};

struct Posting {
  std::size_t doc = 0;
  std::size_t sentence = 0;
  std::size_t offset = 0;
};

namespace detail {

inline std::string escape_line(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string unescape_line(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\' || i + 1 == s.size()) {
      out += s[i];
      continue;
    }
    ++i;
    switch (s[i]) {
      case 'n': out += '\n'; break;
      case 't': out += '\t'; break;
      case 'r': out += '\r'; break;
      default: out += s[i];
    }
  }
  return out;
}

struct TermMatch {
  std::size_t tok_begin = 0;
  std::size_t tok_end = 0;  // token indices, half-open
  std::size_t char_start = 0;
  std::size_t char_end = 0;
};

// Occurrences of a term in a token stream. Multi-word terms require exact
// lower-cased surfaces with no intervening punctuation; single-word terms
// may additionally match via the lemmatizer when one is supplied.
inline std::vector<TermMatch> find_term(const std::vector<Token>& toks, const std::string& term,
                                        const Lemmatizer* lemmatizer) {
  std::vector<TermMatch> out;
  auto want = tokenize(term);
  if (want.empty()) return out;
  std::string lemma_want;
  if (want.size() == 1 && lemmatizer != nullptr) lemma_want = lemmatizer->lemma(want[0].lower);
  for (std::size_t i = 0; i + want.size() <= toks.size(); ++i) {
    bool ok = true;
    for (std::size_t k = 0; k < want.size() && ok; ++k) {
      const Token& t = toks[i + k];
      if (k > 0 && t.gap_before) ok = false;
      else if (t.lower != want[k].lower) {
        if (want.size() == 1 && lemmatizer != nullptr && lemmatizer->lemma(t.lower) == lemma_want)
          continue;
        ok = false;
      }
    }
    if (ok)
      out.push_back({i, i + want.size(), toks[i].start, toks[i + want.size() - 1].end});
  }
  return out;
}

inline bool contains_term(const std::vector<Token>& toks, const std::string& term) {
  return !find_term(toks, term, nullptr).empty();
}

}  // namespace detail

// Immutable after build; safe for concurrent readers.
class CorpusIndex {
 public:
  struct Document {
    std::string doc_id;
    std::string text;
  };

  static CorpusIndex build(std::vector<Document> docs) {
    CorpusIndex index;
    index.docs_ = std::move(docs);
    index.finalize();
    return index;
  }

  static CorpusIndex build_dir(const std::string& corpus_dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(corpus_dir))
      throw std::runtime_error("index: not a directory: " + corpus_dir);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(corpus_dir))
      if (entry.is_regular_file() && entry.path().extension() == ".txt")
        files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<Document> docs;
    for (const auto& f : files) {
      std::ifstream in(f, std::ios::binary);
      if (!in) throw std::runtime_error("index: cannot read " + f.string());
      std::ostringstream body;
      body << in.rdbuf();
      docs.push_back({f.filename().string(), body.str()});
    }
    return build(std::move(docs));
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("index: cannot write " + path);
    out << "knowhunt-index 1\n";
    out << "docs " << docs_.size() << "\n";
    for (const auto& d : docs_)
      out << detail::escape_line(d.doc_id) << "\t" << detail::escape_line(d.text) << "\n";
    out << "postings " << postings_.size() << "\n";
    for (const auto& [token, posts] : postings_) {
      out << token;
      char sep = '\t';
      for (const auto& p : posts) {
        out << sep << p.doc << ":" << p.sentence << ":" << p.offset;
        sep = ' ';
      }
      out << "\n";
    }
  }

  static CorpusIndex load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("index: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != "knowhunt-index 1")
      throw std::runtime_error("index: unsupported format or version in " + path);
    auto expect_count = [&](const char* keyword) {
      if (!std::getline(in, line)) throw std::runtime_error("index: truncated file " + path);
      std::istringstream hdr(line);
      std::string kw;
      std::size_t n = 0;
      if (!(hdr >> kw >> n) || kw != keyword)
        throw std::runtime_error("index: expected '" + std::string(keyword) + " <n>' in " + path);
      return n;
    };
    std::size_t ndocs = expect_count("docs");
    std::vector<Document> docs;
    docs.reserve(ndocs);
    for (std::size_t i = 0; i < ndocs; ++i) {
      if (!std::getline(in, line)) throw std::runtime_error("index: truncated docs in " + path);
      auto tab = line.find('\t');
      if (tab == std::string::npos) throw std::runtime_error("index: malformed doc line in " + path);
      docs.push_back({detail::unescape_line(line.substr(0, tab)),
                      detail::unescape_line(line.substr(tab + 1))});
    }
    CorpusIndex index = build(std::move(docs));
    // The postings section is regenerated from the documents; consume and
    // check the section header so truncation is still detected.
    std::size_t nposts = expect_count("postings");
    if (nposts != index.postings_.size())
      throw std::runtime_error("index: postings count mismatch in " + path);
    return index;
  }

  std::size_t size() const { return docs_.size(); }
  const std::vector<Document>& documents() const { return docs_; }
  const std::vector<Token>& tokens(std::size_t doc) const { return tokens_[doc]; }
  const std::vector<Span>& sentences(std::size_t doc) const { return sentences_[doc]; }
  const std::map<std::string, std::vector<Posting>>& postings() const { return postings_; }

  std::size_t sentence_of(std::size_t doc, std::size_t pos) const {
    const auto& spans = sentences_[doc];
    for (std::size_t i = 0; i < spans.size(); ++i)
      if (pos >= spans[i].start && pos < spans[i].end) return i;
    return spans.empty() ? 0 : spans.size() - 1;
  }

 private:
  void finalize() {
    tokens_.clear();
    sentences_.clear();
    postings_.clear();
    for (std::size_t d = 0; d < docs_.size(); ++d) {
      tokens_.push_back(tokenize(docs_[d].text));
      auto sent = split_sentences(docs_[d].text);
      sentences_.emplace_back();
      for (const auto& [lo, hi] : sent) sentences_.back().push_back({lo, hi});
      for (const auto& t : tokens_[d])
        postings_[t.lower].push_back({d, sentence_of(d, t.start), t.start});
    }
  }

  std::vector<Document> docs_;
  std::vector<std::vector<Token>> tokens_;
  std::vector<std::vector<Span>> sentences_;
  std::map<std::string, std::vector<Posting>> postings_;
};

namespace detail {

inline bool doc_excluded(const std::vector<Token>& toks, const std::vector<std::string>& exclusions) {
  for (const auto& x : exclusions)
    if (contains_term(toks, x)) return true;
  return false;
}

inline bool ordering_ok(Ordering ordering, std::size_t c_start, std::size_t q_start) {
  switch (ordering) {
    case Ordering::Any: return true;
    case Ordering::CBeforeQ: return c_start < q_start;
    case Ordering::QBeforeC: return q_start < c_start;
  }
  return true;
}

inline bool within_window(std::size_t a_start, std::size_t a_end, std::size_t b_start,
                          std::size_t b_end) {
  if (a_start > b_start) {
    std::swap(a_start, b_start);
    std::swap(a_end, b_end);
  }
  std::size_t gap = b_start > a_end ? b_start - a_end : 0;
  return gap <= kProximityWindow;
}

}  // namespace detail

inline std::vector<Snippet> search(const CorpusIndex& index, const SearchQuery& query,
                                   std::size_t limit = kDefaultSnippetLimit,
                                   const Lemmatizer* lemmatizer = nullptr) {
  std::vector<Snippet> out;
  for (std::size_t d = 0; d < index.size() && out.size() < limit; ++d) {
    const auto& toks = index.tokens(d);
    if (detail::doc_excluded(toks, query.exclusions)) continue;
    auto c_matches = detail::find_term(toks, query.term_c, lemmatizer);
    if (c_matches.empty()) continue;
    auto q_matches = detail::find_term(toks, query.term_q, lemmatizer);
    for (const auto& mc : c_matches) {
      for (const auto& mq : q_matches) {
        if (out.size() >= limit) break;
        if (mc.tok_begin == mq.tok_begin && mc.tok_end == mq.tok_end) continue;
        std::size_t sc = index.sentence_of(d, mc.char_start);
        std::size_t sq = index.sentence_of(d, mq.char_start);
        std::size_t s_lo = std::min(sc, sq), s_hi = std::max(sc, sq);
        if (s_hi - s_lo > 1) continue;
        if (!detail::within_window(mc.char_start, mc.char_end, mq.char_start, mq.char_end))
          continue;
        if (!detail::ordering_ok(query.ordering, mc.char_start, mq.char_start)) continue;
        std::size_t base = index.sentences(d)[s_lo].start;
        std::size_t end = index.sentences(d)[s_hi].end;
        std::string text = index.documents()[d].text.substr(base, end - base);
        while (!text.empty() && (text.back() == '\n' || text.back() == ' ' || text.back() == '\r'))
          text.pop_back();
        Snippet snip;
        snip.text = std::move(text);
        snip.doc_id = index.documents()[d].doc_id;
        snip.term_c_span = {mc.char_start - base, mc.char_end - base};
        snip.term_q_span = {mq.char_start - base, mq.char_end - base};
        snip.matched_term_c = query.term_c;
        snip.matched_term_q = query.term_q;
        out.push_back(std::move(snip));
      }
    }
  }
  return out;
}

class SnippetProvider {
 public:
  virtual ~SnippetProvider() = default;
  virtual std::vector<Snippet> retrieve(const SearchQuery& query) const = 0;
};

class CorpusProvider : public SnippetProvider {
 public:
  CorpusProvider(CorpusIndex index, const Lemmatizer& lemmatizer,
                 std::size_t limit = kDefaultSnippetLimit)
      : index_(std::move(index)), lemmatizer_(&lemmatizer), limit_(limit) {}

  std::vector<Snippet> retrieve(const SearchQuery& query) const override {
    return search(index_, query, limit_, lemmatizer_);
  }

  const CorpusIndex& index() const { return index_; }

 private:
  CorpusIndex index_;
  const Lemmatizer* lemmatizer_;
  std::size_t limit_;
};

// Replays recorded snippets keyed by (term_c, term_q), applying the same
// window/exclusion/ordering validation as live search. Snippets whose terms
// cannot be located or that violate a constraint are dropped and counted.
class FixtureProvider : public SnippetProvider {
 public:
  explicit FixtureProvider(const std::string& path, const Lemmatizer* lemmatizer = nullptr)
      : lemmatizer_(lemmatizer) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("fixtures: cannot open " + path);
    std::string line;
    std::size_t record = 0;
    while (std::getline(in, line)) {
      if (detail::strip(line).empty()) continue;
      ++record;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const std::exception& e) {
        throw std::runtime_error("fixtures: record " + std::to_string(record) + ": bad json: " +
                                 e.what());
      }
      if (!j.contains("term_c") || !j.contains("term_q") || !j.contains("snippets"))
        throw std::runtime_error("fixtures: record " + std::to_string(record) +
                                 ": need term_c, term_q, snippets");
      Entry e;
      for (const auto& s : j["snippets"]) {
        if (!s.contains("text"))
          throw std::runtime_error("fixtures: record " + std::to_string(record) +
                                   ": snippet missing text");
        e.snippets.push_back({s["text"].get<std::string>(),
                              s.contains("doc_id") ? s["doc_id"].get<std::string>() : ""});
      }
      entries_[key(j["term_c"].get<std::string>(), j["term_q"].get<std::string>())] = std::move(e);
    }
  }

  std::vector<Snippet> retrieve(const SearchQuery& query) const override {
    std::vector<Snippet> out;
    auto it = entries_.find(key(query.term_c, query.term_q));
    if (it == entries_.end()) return out;
    for (const auto& raw : it->second.snippets) {
      auto toks = tokenize(raw.text);
      if (detail::doc_excluded(toks, query.exclusions)) {
        ++dropped_;
        continue;
      }
      auto cs = detail::find_term(toks, query.term_c, lemmatizer_);
      auto qs = detail::find_term(toks, query.term_q, lemmatizer_);
      bool kept = false;
      for (const auto& mc : cs) {
        for (const auto& mq : qs) {
          if (mc.tok_begin == mq.tok_begin && mc.tok_end == mq.tok_end) continue;
          if (!detail::within_window(mc.char_start, mc.char_end, mq.char_start, mq.char_end))
            continue;
          if (!detail::ordering_ok(query.ordering, mc.char_start, mq.char_start)) continue;
          Snippet snip;
          snip.text = raw.text;
          snip.doc_id = raw.doc_id;
          snip.term_c_span = {mc.char_start, mc.char_end};
          snip.term_q_span = {mq.char_start, mq.char_end};
          snip.matched_term_c = query.term_c;
          snip.matched_term_q = query.term_q;
          out.push_back(std::move(snip));
          kept = true;
          break;
        }
        if (kept) break;
      }
      if (!kept) ++dropped_;
    }
    return out;
  }

  std::size_t dropped() const { return dropped_.load(); }

 private:
  struct RawSnippet {
    std::string text;
    std::string doc_id;
  };
  struct Entry {
    std::vector<RawSnippet> snippets;
  };

  static std::string key(const std::string& c, const std::string& q) { return c + '\x1f' + q; }

  std::map<std::string, Entry> entries_;
  const Lemmatizer* lemmatizer_;
  mutable std::atomic<std::size_t> dropped_{0};
};

}  // namespace knowhunt
