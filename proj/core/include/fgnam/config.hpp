#pragma once
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fgnam {

/// Flat key-value configuration text.
///
///   # comment
///   key = value
///   [section]
///   key = value
///
/// Keys before any section header are global. section("train") returns the
/// global keys overlaid with the [train] section's keys.
class KvConfig {
 public:
  KvConfig() = default;
  static KvConfig from_file(const std::string& path);
  static KvConfig from_string(const std::string& text);

  void set(const std::string& section, const std::string& key, const std::string& value);

  /// Global keys overlaid with one section.
  std::map<std::string, std::string> section(const std::string& name) const;

  std::optional<std::string> get(const std::string& section, const std::string& key) const;

  bool empty() const { return entries_.empty(); }

 private:
  // (section, key) -> value; section "" is global
  std::map<std::pair<std::string, std::string>, std::string> entries_;
};

/// Typed lookups over a merged section map; throws UsageError on bad values.
double config_double(const std::map<std::string, std::string>& kv, const std::string& key,
                     double fallback);
int config_int(const std::map<std::string, std::string>& kv, const std::string& key,
               int fallback);
bool config_bool(const std::map<std::string, std::string>& kv, const std::string& key,
                 bool fallback);
std::string config_str(const std::map<std::string, std::string>& kv, const std::string& key,
                       const std::string& fallback);
std::vector<int> config_int_list(const std::map<std::string, std::string>& kv,
                                 const std::string& key, const std::vector<int>& fallback);
std::vector<double> parse_double_list(const std::string& text);

}  // namespace fgnam
