#include "fgnam/config.hpp"

#include <fstream>
#include <sstream>

#include "fgnam/csv.hpp"
#include "fgnam/error.hpp"

namespace fgnam {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

KvConfig KvConfig::from_string(const std::string& text) {
  KvConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw UsageError("config line " + std::to_string(lineno) + ": malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw UsageError("config line " + std::to_string(lineno) + ": empty key");
    cfg.set(section, key, value);
  }
  return cfg;
}

KvConfig KvConfig::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str());
}

void KvConfig::set(const std::string& section, const std::string& key, const std::string& value) {
  entries_[{section, key}] = value;
}

std::map<std::string, std::string> KvConfig::section(const std::string& name) const {
  std::map<std::string, std::string> out;
  for (const auto& [sk, v] : entries_)
    if (sk.first.empty()) out[sk.second] = v;
  for (const auto& [sk, v] : entries_)
    if (sk.first == name) out[sk.second] = v;
  return out;
}

std::optional<std::string> KvConfig::get(const std::string& section_name,
                                         const std::string& key) const {
  auto it = entries_.find({section_name, key});
  if (it != entries_.end()) return it->second;
  it = entries_.find({std::string(), key});
  if (it != entries_.end()) return it->second;
  return std::nullopt;
}

double config_double(const std::map<std::string, std::string>& kv, const std::string& key,
                     double fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  auto v = parse_double(it->second);
  if (!v) throw UsageError("config: key '" + key + "' is not a number: " + it->second);
  return *v;
}

int config_int(const std::map<std::string, std::string>& kv, const std::string& key,
               int fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  auto v = parse_double(it->second);
  if (!v || *v != static_cast<int>(*v))
    throw UsageError("config: key '" + key + "' is not an integer: " + it->second);
  return static_cast<int>(*v);
}

bool config_bool(const std::map<std::string, std::string>& kv, const std::string& key,
                 bool fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  const std::string& s = it->second;
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw UsageError("config: key '" + key + "' is not a boolean: " + s);
}

std::string config_str(const std::map<std::string, std::string>& kv, const std::string& key,
                       const std::string& fallback) {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second;
}

std::vector<int> config_int_list(const std::map<std::string, std::string>& kv,
                                 const std::string& key, const std::vector<int>& fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  std::vector<int> out;
  std::istringstream ss(it->second);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    auto v = parse_double(tok);
    if (!v || *v != static_cast<int>(*v))
      throw UsageError("config: key '" + key + "' is not an integer list: " + it->second);
    out.push_back(static_cast<int>(*v));
  }
  if (out.empty())
    throw UsageError("config: key '" + key + "' is an empty list");
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    auto v = parse_double(tok);
    if (!v) throw UsageError("expected a comma-separated list of numbers: " + text);
    out.push_back(*v);
  }
  return out;
}

}  // namespace fgnam
