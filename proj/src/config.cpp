#include "corpusgan/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <sstream>

namespace corpusgan {
namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  auto s = sections.find(section);
  return s != sections.end() && s->second.count(key) > 0;
}

std::string ConfigFile::get(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
  auto s = sections.find(section);
  if (s == sections.end()) return fallback;
  auto k = s->second.find(key);
  return k == s->second.end() ? fallback : k->second;
}

double ConfigFile::get_real(const std::string& section, const std::string& key,
                            double fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key, "");
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(v.c_str(), &end);
  if (errno != 0 || end == v.c_str() || *end != '\0')
    throw error("config: " + section + "." + key + " is not a number: " + v);
  return x;
}

int ConfigFile::get_int(const std::string& section, const std::string& key, int fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key, "");
  char* end = nullptr;
  errno = 0;
  const long x = std::strtol(v.c_str(), &end, 10);
  if (errno != 0 || end == v.c_str() || *end != '\0')
    throw error("config: " + section + "." + key + " is not an integer: " + v);
  return static_cast<int>(x);
}

std::uint64_t ConfigFile::get_u64(const std::string& section, const std::string& key,
                                  std::uint64_t fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key, "");
  char* end = nullptr;
  errno = 0;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (errno != 0 || end == v.c_str() || *end != '\0')
    throw error("config: " + section + "." + key + " is not an unsigned integer: " + v);
  return static_cast<std::uint64_t>(x);
}

std::vector<std::string> ConfigFile::get_list(const std::string& section,
                                              const std::string& key) const {
  return split_ws(get(section, key, ""));
}

std::vector<std::uint64_t> ConfigFile::get_u64_list(const std::string& section,
                                                    const std::string& key) const {
  std::vector<std::uint64_t> out;
  for (const std::string& tok : get_list(section, key)) {
    char* end = nullptr;
    errno = 0;
    const unsigned long long x = std::strtoull(tok.c_str(), &end, 10);
    if (errno != 0 || end == tok.c_str() || *end != '\0')
      throw error("config: " + section + "." + key + " has a non-integer entry: " + tok);
    out.push_back(static_cast<std::uint64_t>(x));
  }
  return out;
}

void ConfigFile::set(const std::string& section, const std::string& key,
                     const std::string& value) {
  sections[section][key] = value;
}

ConfigFile parse_config(const std::string& text) {
  ConfigFile cfg;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    lineno++;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw error("config: unterminated section header at line " + std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      cfg.sections[section];  // register even when empty
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw error("config: expected key = value at line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw error("config: empty key at line " + std::to_string(lineno));
    cfg.sections[section][key] = value;
  }
  return cfg;
}

ConfigFile read_config(const std::string& path) { return parse_config(read_file(path)); }

std::string canonical_config(const ConfigFile& c) {
  std::ostringstream os;
  for (const auto& sec : c.sections)
    for (const auto& kv : sec.second) os << sec.first << "." << kv.first << " = " << kv.second << "\n";
  return os.str();
}

std::uint64_t config_hash(const ConfigFile& c) { return fnv1a64(canonical_config(c)); }

}  // namespace corpusgan
