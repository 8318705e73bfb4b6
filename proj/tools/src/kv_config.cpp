#include "kv_config.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace semidev::tools {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

KeyValues KeyValues::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_text(buffer.str(), path);
}

KeyValues KeyValues::parse_text(const std::string& text, const std::string& origin) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config",
                        origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config", origin + ":" + std::to_string(lineno) + ": empty key");
    if (kv.entries_.count(key))
      throw ConfigError(key, "duplicate key");
    kv.entries_[key] = value;
  }
  return kv;
}

bool KeyValues::has(const std::string& key) const { return entries_.count(key) != 0; }

void KeyValues::set(const std::string& key, std::string value) {
  entries_[key] = std::move(value);
}

std::string KeyValues::get_string(const std::string& key,
                                  const std::string& fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

std::string KeyValues::require_string(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError(key, "required key is missing");
  return it->second;
}

double KeyValues::parse_double(const std::string& key, const std::string& raw) const {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(raw.c_str(), &end);
  if (end == raw.c_str() || *end != '\0' || errno == ERANGE)
    throw ConfigError(key, "'" + raw + "' is not a real number");
  return v;
}

double KeyValues::get_double(const std::string& key, double fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : parse_double(key, it->second);
}

double KeyValues::require_double(const std::string& key) const {
  return parse_double(key, require_string(key));
}

std::uint64_t KeyValues::get_u64(const std::string& key, std::uint64_t fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string& raw = it->second;
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw.c_str(), &end, 10);
  if (end == raw.c_str() || *end != '\0' || errno == ERANGE ||
      raw.find('-') != std::string::npos)
    throw ConfigError(key, "'" + raw + "' is not a nonnegative integer");
  return static_cast<std::uint64_t>(v);
}

bool KeyValues::get_bool(const std::string& key, bool fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string& raw = it->second;
  if (raw == "true" || raw == "1" || raw == "yes" || raw == "on") return true;
  if (raw == "false" || raw == "0" || raw == "no" || raw == "off") return false;
  throw ConfigError(key, "'" + raw + "' is not a boolean");
}

std::vector<double> KeyValues::get_vector(const std::string& key,
                                          std::vector<double> fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  std::vector<double> out;
  for (const std::string& piece : split(it->second, ',')) {
    if (piece.empty()) throw ConfigError(key, "empty vector component");
    out.push_back(parse_double(key, piece));
  }
  if (out.empty()) throw ConfigError(key, "empty vector");
  return out;
}

std::vector<double> KeyValues::require_vector(const std::string& key) const {
  if (!has(key)) throw ConfigError(key, "required key is missing");
  return get_vector(key, {});
}

std::vector<std::vector<double>> KeyValues::require_matrix(const std::string& key) const {
  const std::string raw = require_string(key);
  std::vector<std::vector<double>> rows;
  for (const std::string& row : split(raw, ';')) {
    std::vector<double> parsed;
    for (const std::string& piece : split(row, ',')) {
      if (piece.empty()) throw ConfigError(key, "empty matrix entry");
      parsed.push_back(parse_double(key, piece));
    }
    if (parsed.empty()) throw ConfigError(key, "empty matrix row");
    rows.push_back(std::move(parsed));
  }
  if (rows.empty()) throw ConfigError(key, "empty matrix");
  for (const auto& row : rows)
    if (row.size() != rows.front().size())
      throw ConfigError(key, "matrix rows have unequal lengths");
  return rows;
}

void KeyValues::reject_unknown(const std::vector<std::string>& allowed_prefixes) const {
  for (const auto& [key, value] : entries_) {
    bool ok = false;
    for (const std::string& prefix : allowed_prefixes) {
      if (key == prefix ||
          (prefix.back() == '.' && key.rfind(prefix, 0) == 0)) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ConfigError(key, "unknown key");
  }
}

}  // namespace semidev::tools
