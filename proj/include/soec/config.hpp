#pragma once

#include <filesystem>
#include <map>
#include <string>

// `key = value` configuration files: one assignment per line, `#` comments,
// blank lines ignored. Values stay strings here; consumers convert and
// validate. Parse errors carry the offending line number.

namespace soec {

std::map<std::string, std::string> parse_config_file(const std::filesystem::path& file);

// Strict double conversion for a config value; throws std::invalid_argument
// naming the key on garbage or trailing characters.
double config_double(const std::map<std::string, std::string>& kv, const std::string& key,
                     double fallback);

std::string config_string(const std::map<std::string, std::string>& kv, const std::string& key,
                          const std::string& fallback);

}  // namespace soec
