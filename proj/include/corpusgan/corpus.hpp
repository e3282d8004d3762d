#pragma once
#include <string>
#include <vector>

#include "corpusgan/text.hpp"

namespace corpusgan {

// Corpus root layout: one subdirectory per corpus (lexicographic order gives
// corpus ids 0..M-1), each regular file inside is one UTF-8 document. Split
// assignment comes from manifest.tsv at the root ("corpus/relpath<TAB>split"
// per line) when present, otherwise from a deterministic hash of the
// root-relative path at the configured ratios.
struct CorpusLoadOptions {
  std::string manifest = "manifest.tsv";  // relative to root; empty disables
  double train_ratio = 0.6;
  double validation_ratio = 0.1;
  double test_ratio = 0.3;
};

std::vector<RawCorpus> load_corpora(const std::string& root, const CorpusLoadOptions& opts = {});

// The hash-split rule, exposed for tests: fnv1a64(path) mapped to [0,1).
Split hash_split(const std::string& root_relative_path, const CorpusLoadOptions& opts);

}  // namespace corpusgan
