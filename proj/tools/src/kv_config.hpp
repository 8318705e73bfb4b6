#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace semidev::tools {

// Config validation failure tied to a specific key, so the CLI can print a
// field-level message and exit with the validation status.
struct ConfigError : std::runtime_error {
  ConfigError(std::string field_in, const std::string& message)
      : std::runtime_error(field_in + ": " + message), field(std::move(field_in)) {}
  std::string field;
};

// Flat key=value text: one `section.key = value` per line, '#' comments,
// blank lines ignored. Values stay strings until a typed getter pulls them.
class KeyValues {
 public:
  static KeyValues parse_file(const std::string& path);
  static KeyValues parse_text(const std::string& text, const std::string& origin);

  bool has(const std::string& key) const;
  void set(const std::string& key, std::string value);

  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;

  double get_double(const std::string& key, double fallback) const;
  double require_double(const std::string& key) const;

  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Comma-separated reals: "1,2,3.5".
  std::vector<double> get_vector(const std::string& key,
                                 std::vector<double> fallback) const;
  std::vector<double> require_vector(const std::string& key) const;
  // Semicolon-separated rows of comma-separated reals: "1,0;0,1".
  std::vector<std::vector<double>> require_matrix(const std::string& key) const;

  // Every key must satisfy one of the given prefixes (exact key or
  // "section." prefix); anything else is a typo worth rejecting.
  void reject_unknown(const std::vector<std::string>& allowed_prefixes) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  double parse_double(const std::string& key, const std::string& raw) const;

  std::map<std::string, std::string> entries_;
};

}  // namespace semidev::tools
