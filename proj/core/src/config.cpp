#include "dcw/config.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>

#include "dcw/common.hpp"

namespace dcw {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace

ConfigMap load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot open " + path);
  ConfigMap map;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw config_error("config: expected key=value at " + path + ":" +
                         std::to_string(line_no));
    }
    map[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return map;
}

std::string config_hash_hex(const ConfigMap& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto feed = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& [k, v] : config) {  // std::map iterates in key order
    feed(k);
    feed("=");
    feed(v);
    feed("\n");
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace dcw
