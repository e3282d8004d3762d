#include "corpusgan/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>

namespace fs = std::filesystem;

namespace corpusgan {

Split hash_split(const std::string& root_relative_path, const CorpusLoadOptions& opts) {
  double total = opts.train_ratio + opts.validation_ratio + opts.test_ratio;
  if (!(total > 0.0)) throw error("hash_split: ratios must sum to a positive value");
  double u = static_cast<double>(fnv1a64(root_relative_path) >> 11) * 0x1.0p-53;
  u *= total;
  if (u < opts.train_ratio) return Split::train;
  if (u < opts.train_ratio + opts.validation_ratio) return Split::validation;
  return Split::test;
}

namespace {

std::map<std::string, Split> read_manifest(const std::string& path) {
  std::map<std::string, Split> out;
  std::istringstream is(read_file(path));
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    lineno++;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto cols = split_char(line, '\t');
    if (cols.size() != 2)
      throw error("manifest line " + std::to_string(lineno) + ": expected 2 tab-separated columns");
    out[cols[0]] = split_from_name(cols[1]);
  }
  return out;
}

}  // namespace

std::vector<RawCorpus> load_corpora(const std::string& root, const CorpusLoadOptions& opts) {
  if (!fs::is_directory(root)) throw error("corpus root is not a directory: " + root);

  bool have_manifest = false;
  std::map<std::string, Split> manifest;
  if (!opts.manifest.empty()) {
    fs::path mpath = fs::path(root) / opts.manifest;
    if (fs::is_regular_file(mpath)) {
      manifest = read_manifest(mpath.string());
      have_manifest = true;
    }
  }

  std::vector<std::string> subdirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) subdirs.push_back(entry.path().filename().string());
  }
  std::sort(subdirs.begin(), subdirs.end());
  if (subdirs.empty()) throw error("corpus root has no corpus subdirectories: " + root);

  std::vector<RawCorpus> corpora;
  for (int m = 0; m < static_cast<int>(subdirs.size()); m++) {
    RawCorpus c;
    c.corpus_id = m;
    c.name = subdirs[m];
    fs::path dir = fs::path(root) / subdirs[m];
    std::vector<std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
      if (entry.is_regular_file())
        files.push_back(fs::relative(entry.path(), dir).generic_string());
    }
    std::sort(files.begin(), files.end());
    for (const auto& rel : files) {
      RawDocument d;
      d.relpath = c.name + "/" + rel;
      d.text = read_file((dir / rel).string());
      if (have_manifest) {
        auto it = manifest.find(d.relpath);
        if (it == manifest.end())
          throw error("manifest does not list document: " + d.relpath);
        d.split = it->second;
      } else {
        d.split = hash_split(d.relpath, opts);
      }
      c.documents.push_back(std::move(d));
    }
    bool has_train = false;
    for (const auto& d : c.documents)
      if (d.split == Split::train) has_train = true;
    if (!has_train)
      throw error("corpus " + c.name + " has no training documents");
    corpora.push_back(std::move(c));
  }
  return corpora;
}

}  // namespace corpusgan
