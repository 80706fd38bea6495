#pragma once

#include <map>
#include <string>
#include <vector>

#include "sasrl/env_factory.hpp"  // ConfigError

namespace sasrl {

using KvMap = std::map<std::string, std::string>;

// Flat key=value text, UTF-8, '#' comments, blank lines ignored.
KvMap parse_kv_file(const std::string& path);
KvMap parse_kv_text(const std::string& text);

// Typed lookups. Throw ConfigError on malformed values.
double kv_double(const KvMap& kv, const std::string& key, double fallback);
long kv_long(const KvMap& kv, const std::string& key, long fallback);
bool kv_bool(const KvMap& kv, const std::string& key, bool fallback);
std::string kv_string(const KvMap& kv, const std::string& key, const std::string& fallback);
std::vector<long> kv_long_list(const KvMap& kv, const std::string& key,
                               const std::vector<long>& fallback);

}  // namespace sasrl
