#include "corpusgan/text.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

namespace corpusgan {

const char* split_name(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::validation: return "validation";
    case Split::test: return "test";
  }
  return "?";
}

Split split_from_name(const std::string& name) {
  if (name == "train") return Split::train;
  if (name == "validation" || name == "val") return Split::validation;
  if (name == "test") return Split::test;
  throw error("unknown split tag: " + name);
}

// ---------------------------------------------------------------------------
// Porter stemmer. Straight port of the 1980 algorithm: b holds the word,
// k is the index of its last letter, j marks the stem end after a suffix match.
// ---------------------------------------------------------------------------
namespace {

struct Stemmer {
  std::string b;
  int k = 0;
  int j = 0;

  bool cons(int i) const {
    switch (b[i]) {
      case 'a': case 'e': case 'i': case 'o': case 'u':
        return false;
      case 'y':
        return i == 0 ? true : !cons(i - 1);
      default:
        return true;
    }
  }

  // measure of the stem b[0..j]: [C](VC)^m[V]
  int m() const {
    int n = 0;
    int i = 0;
    while (true) {
      if (i > j) return n;
      if (!cons(i)) break;
      i++;
    }
    i++;
    while (true) {
      while (true) {
        if (i > j) return n;
        if (cons(i)) break;
        i++;
      }
      i++;
      n++;
      while (true) {
        if (i > j) return n;
        if (!cons(i)) break;
        i++;
      }
      i++;
    }
  }

  bool vowelinstem() const {
    for (int i = 0; i <= j; i++)
      if (!cons(i)) return true;
    return false;
  }

  bool doublec(int pos) const {
    if (pos < 1) return false;
    if (b[pos] != b[pos - 1]) return false;
    return cons(pos);
  }

  // cvc at i where the last c is not w, x or y ("-WIL" rule)
  bool cvc(int i) const {
    if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
    char ch = b[i];
    return ch != 'w' && ch != 'x' && ch != 'y';
  }

  bool ends(const char* s) {
    int len = static_cast<int>(std::strlen(s));
    if (len > k + 1) return false;
    if (std::memcmp(b.data() + k - len + 1, s, len) != 0) return false;
    j = k - len;
    return true;
  }

  void setto(const char* s) {
    int len = static_cast<int>(std::strlen(s));
    b.resize(static_cast<std::size_t>(j + 1 + len));
    std::memcpy(b.data() + j + 1, s, len);
    k = j + len;
  }

  void r(const char* s) {
    if (m() > 0) setto(s);
  }

  void step1ab() {
    if (b[k] == 's') {
      if (ends("sses")) k -= 2;
      else if (ends("ies")) setto("i");
      else if (b[k - 1] != 's') k--;
    }
    if (ends("eed")) {
      if (m() > 0) k--;
    } else if ((ends("ed") || ends("ing")) && vowelinstem()) {
      k = j;
      if (ends("at")) setto("ate");
      else if (ends("bl")) setto("ble");
      else if (ends("iz")) setto("ize");
      else if (doublec(k)) {
        k--;
        char ch = b[k];
        if (ch == 'l' || ch == 's' || ch == 'z') k++;
      } else if (m() == 1 && cvc(k)) {
        setto("e");
      }
    }
  }

  void step1c() {
    if (ends("y") && vowelinstem()) b[k] = 'i';
  }

  void step2() {
    switch (b[k - 1]) {
      case 'a':
        if (ends("ational")) { r("ate"); break; }
        if (ends("tional")) { r("tion"); break; }
        break;
      case 'c':
        if (ends("enci")) { r("ence"); break; }
        if (ends("anci")) { r("ance"); break; }
        break;
      case 'e':
        if (ends("izer")) { r("ize"); break; }
        break;
      case 'l':
        if (ends("abli")) { r("able"); break; }
        if (ends("alli")) { r("al"); break; }
        if (ends("entli")) { r("ent"); break; }
        if (ends("eli")) { r("e"); break; }
        if (ends("ousli")) { r("ous"); break; }
        break;
      case 'o':
        if (ends("ization")) { r("ize"); break; }
        if (ends("ation")) { r("ate"); break; }
        if (ends("ator")) { r("ate"); break; }
        break;
      case 's':
        if (ends("alism")) { r("al"); break; }
        if (ends("iveness")) { r("ive"); break; }
        if (ends("fulness")) { r("ful"); break; }
        if (ends("ousness")) { r("ous"); break; }
        break;
      case 't':
        if (ends("aliti")) { r("al"); break; }
        if (ends("iviti")) { r("ive"); break; }
        if (ends("biliti")) { r("ble"); break; }
        break;
      default:
        break;
    }
  }

  void step3() {
    switch (b[k]) {
      case 'e':
        if (ends("icate")) { r("ic"); break; }
        if (ends("ative")) { r(""); break; }
        if (ends("alize")) { r("al"); break; }
        break;
      case 'i':
        if (ends("iciti")) { r("ic"); break; }
        break;
      case 'l':
        if (ends("ical")) { r("ic"); break; }
        if (ends("ful")) { r(""); break; }
        break;
      case 's':
        if (ends("ness")) { r(""); break; }
        break;
      default:
        break;
    }
  }

  void step4() {
    switch (b[k - 1]) {
      case 'a':
        if (ends("al")) break;
        return;
      case 'c':
        if (ends("ance")) break;
        if (ends("ence")) break;
        return;
      case 'e':
        if (ends("er")) break;
        return;
      case 'i':
        if (ends("ic")) break;
        return;
      case 'l':
        if (ends("able")) break;
        if (ends("ible")) break;
        return;
      case 'n':
        if (ends("ant")) break;
        if (ends("ement")) break;
        if (ends("ment")) break;
        if (ends("ent")) break;
        return;
      case 'o':
        if (ends("ion") && j >= 0 && (b[j] == 's' || b[j] == 't')) break;
        if (ends("ou")) break;
        return;
      case 's':
        if (ends("ism")) break;
        return;
      case 't':
        if (ends("ate")) break;
        if (ends("iti")) break;
        return;
      case 'u':
        if (ends("ous")) break;
        return;
      case 'v':
        if (ends("ive")) break;
        return;
      case 'z':
        if (ends("ize")) break;
        return;
      default:
        return;
    }
    if (m() > 1) k = j;
  }

  void step5() {
    j = k;
    if (b[k] == 'e') {
      int a = m();
      if (a > 1 || (a == 1 && !cvc(k - 1))) k--;
    }
    if (b[k] == 'l' && doublec(k) && m() > 1) k--;
  }

  std::string run(std::string word) {
    b = std::move(word);
    k = static_cast<int>(b.size()) - 1;
    if (k <= 1) return b;
    step1ab();
    step1c();
    step2();
    step3();
    step4();
    step5();
    b.resize(static_cast<std::size_t>(k + 1));
    return b;
  }
};

}  // namespace

std::string porter_stem(std::string word) {
  Stemmer s;
  return s.run(std::move(word));
}

std::vector<std::string> tokenize(std::string_view raw) {
  std::vector<std::string> out;
  std::string run;
  for (unsigned char c : raw) {
    if (c >= 'A' && c <= 'Z') {
      run += static_cast<char>(c - 'A' + 'a');
    } else if (c >= 'a' && c <= 'z') {
      run += static_cast<char>(c);
    } else if (!run.empty()) {
      out.push_back(porter_stem(std::move(run)));
      run.clear();
    }
  }
  if (!run.empty()) out.push_back(porter_stem(std::move(run)));
  return out;
}

int Vocabulary::lookup(const std::string& term) const {
  auto it = index.find(term);
  return it == index.end() ? -1 : it->second;
}

std::string Vocabulary::to_tsv() const {
  std::ostringstream os;
  for (int i = 0; i < size(); i++) {
    os << terms[i] << '\t' << i << '\t' << doc_freq[i] << '\n';
  }
  return os.str();
}

Vocabulary Vocabulary::from_tsv(const std::string& content) {
  Vocabulary v;
  std::istringstream is(content);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto cols = split_char(line, '\t');
    if (cols.size() != 3) throw error("vocabulary tsv: expected 3 columns, got line: " + line);
    int idx = std::stoi(cols[1]);
    if (idx != static_cast<int>(v.terms.size()))
      throw error("vocabulary tsv: indices out of order at line: " + line);
    v.index[cols[0]] = idx;
    v.terms.push_back(cols[0]);
    v.doc_freq.push_back(std::stoi(cols[2]));
  }
  return v;
}

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& train_docs_tokens,
                            int v_max) {
  if (v_max < 1) throw error("build_vocabulary: v_max must be >= 1");
  std::unordered_map<std::string, long long> freq;
  std::unordered_map<std::string, int> df;
  for (const auto& tokens : train_docs_tokens) {
    std::unordered_map<std::string, bool> seen;
    for (const auto& t : tokens) {
      freq[t]++;
      if (!seen[t]) {
        seen[t] = true;
        df[t]++;
      }
    }
  }
  if (freq.empty()) throw error("build_vocabulary: all documents tokenize to empty");

  std::vector<std::pair<std::string, long long>> ranked(freq.begin(), freq.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  int keep = std::min<int>(v_max, static_cast<int>(ranked.size()));

  Vocabulary v;
  v.terms.reserve(keep);
  v.doc_freq.reserve(keep);
  for (int i = 0; i < keep; i++) {
    const auto& term = ranked[i].first;
    v.index[term] = i;
    v.terms.push_back(term);
    v.doc_freq.push_back(df[term]);
  }
  return v;
}

Vocabulary build_vocabulary(const std::vector<RawCorpus>& corpora, int v_max) {
  std::vector<std::vector<std::string>> train_tokens;
  for (const auto& c : corpora) {
    for (const auto& d : c.documents) {
      if (d.split == Split::train) train_tokens.push_back(tokenize(d.text));
    }
  }
  return build_vocabulary(train_tokens, v_max);
}

std::map<int, double> tf_idf(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                             int n_train_docs) {
  std::map<int, int> counts;
  for (const auto& t : tokens) {
    int idx = vocab.lookup(t);
    if (idx >= 0) counts[idx]++;
  }
  std::map<int, double> weights;
  for (const auto& [idx, tf] : counts) {
    int df = vocab.doc_freq[idx];
    if (df > n_train_docs)
      throw error("tf_idf: doc_freq exceeds n_train_docs for term " + vocab.terms[idx]);
    double w = static_cast<double>(tf) * std::log(static_cast<double>(n_train_docs) / df);
    if (w > 0.0) weights[idx] = w;
  }
  return weights;
}

std::map<int, double> l1_normalize(const std::map<int, double>& weights, bool* degenerate) {
  double sum = 0.0;
  for (const auto& [idx, w] : weights) {
    if (w < 0.0) throw error("l1_normalize: negative entry");
    sum += w;
  }
  if (degenerate) *degenerate = (sum == 0.0);
  if (sum == 0.0) return weights;
  std::map<int, double> out;
  for (const auto& [idx, w] : weights) out[idx] = w / sum;
  return out;
}

}  // namespace corpusgan
