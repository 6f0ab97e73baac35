#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kgwalk {

// A corpus of token walks plus the provenance needed to reproduce it.
// File format: one `#` header line (strategy, depth, seed, extra parameters,
// config hash, body hash), then one walk per line with TAB-separated tokens.
struct WalkCorpus {
  std::vector<std::vector<std::string>> walks;
  std::string strategy = "random";
  int depth = 0;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> parameters;  // ordered extras

  void add_parameter(std::string key, std::string value);
  const std::string* parameter(std::string_view key) const;

  std::uint64_t config_hash() const;
  std::string header_line() const;  // without the body hash

  // Derived corpus for a transform: same walks container empty, chained
  // strategy tag, inherited depth/seed/parameters plus the transform's own.
  WalkCorpus derive(std::string_view transform_name) const;
};

std::string corpus_to_string(const WalkCorpus& corpus);
void save_corpus(const WalkCorpus& corpus, const std::string& path);

// Parses and verifies the embedded body hash; a mismatch means the file was
// edited or truncated after it was produced.
WalkCorpus corpus_from_string(std::string_view text);
WalkCorpus load_corpus(const std::string& path);

}  // namespace kgwalk
