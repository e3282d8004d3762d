#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "corpusgan/common.hpp"

namespace corpusgan {

// Flat "key = value" pairs grouped under "[section]" headers. '#' starts a
// comment (whole line or trailing), blanks are ignored, later duplicates win.
// Keys before any header land in the "" section.
struct ConfigFile {
  std::map<std::string, std::map<std::string, std::string>> sections;

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback) const;
  double get_real(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key,
                        std::uint64_t fallback) const;
  // whitespace-separated values
  std::vector<std::string> get_list(const std::string& section, const std::string& key) const;
  std::vector<std::uint64_t> get_u64_list(const std::string& section,
                                          const std::string& key) const;

  void set(const std::string& section, const std::string& key, const std::string& value);
};

ConfigFile parse_config(const std::string& text);
ConfigFile read_config(const std::string& path);

// Sections and keys sorted; one "section.key = value" line each. The identity
// under which two configs hash equal.
std::string canonical_config(const ConfigFile& c);
std::uint64_t config_hash(const ConfigFile& c);

}  // namespace corpusgan
