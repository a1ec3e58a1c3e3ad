#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace tsl::harness {

/// Flat key/value document: one `key = value` pair per line, `#` comments,
/// dotted keys for nesting. Insertion order is preserved so serialization
/// is deterministic.
class KeyValueDoc {
 public:
  static KeyValueDoc parse_file(const std::string& path);
  static KeyValueDoc parse_string(const std::string& text,
                                  const std::string& origin = "<string>");

  bool has(const std::string& key) const;
  const std::string& get_string(const std::string& key) const;
  std::string get_string_or(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int_or(const std::string& key, long long fallback) const;

  /// Throws ConfigError listing every missing key at once.
  void require_keys(const std::vector<std::string>& keys) const;

  void set(const std::string& key, const std::string& value);
  void set_double(const std::string& key, double value);
  void set_int(const std::string& key, long long value);

  const std::vector<std::string>& keys() const { return order_; }
  std::string serialize() const;

 private:
  std::map<std::string, std::string> values_;
  std::vector<std::string> order_;
  std::string origin_ = "<none>";
};

/// 17-significant-digit representation; round-trips any finite double.
std::string format_double(double v);

}  // namespace tsl::harness
