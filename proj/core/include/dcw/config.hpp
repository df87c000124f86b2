#pragma once

#include <map>
#include <string>

namespace dcw {

/// Flat key=value configuration. Lines starting with '#' are comments.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap load_config_file(const std::string& path);

/// FNV-1a over the sorted "key=value\n" lines; stable across platforms.
std::string config_hash_hex(const ConfigMap& config);

}  // namespace dcw
