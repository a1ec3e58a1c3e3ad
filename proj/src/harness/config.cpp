#include "tsl/harness/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tsl/errors.hpp"

namespace tsl::harness {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

KeyValueDoc KeyValueDoc::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open config file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

KeyValueDoc KeyValueDoc::parse_string(const std::string& text,
                                      const std::string& origin) {
  KeyValueDoc doc;
  doc.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << origin << ":" << line_no << ": expected `key = value`, got `"
          << stripped << "`";
      throw ConfigError(msg.str());
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      std::ostringstream msg;
      msg << origin << ":" << line_no << ": empty key";
      throw ConfigError(msg.str());
    }
    doc.set(key, value);
  }
  return doc;
}

bool KeyValueDoc::has(const std::string& key) const {
  return values_.count(key) != 0;
}

const std::string& KeyValueDoc::get_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) {
    throw ConfigError("missing required key: " + key + " (in " + origin_ + ")");
  }
  return it->second;
}

std::string KeyValueDoc::get_string_or(const std::string& key,
                                       const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KeyValueDoc::get_double(const std::string& key) const {
  const std::string& raw = get_string(key);
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(raw, &pos);
  } catch (const std::exception&) {
    throw ConfigError("key " + key + ": `" + raw + "` is not a number");
  }
  if (pos != raw.size()) {
    throw ConfigError("key " + key + ": `" + raw + "` is not a number");
  }
  return v;
}

double KeyValueDoc::get_double_or(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long long KeyValueDoc::get_int(const std::string& key) const {
  const std::string& raw = get_string(key);
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(raw, &pos);
  } catch (const std::exception&) {
    throw ConfigError("key " + key + ": `" + raw + "` is not an integer");
  }
  if (pos != raw.size()) {
    throw ConfigError("key " + key + ": `" + raw + "` is not an integer");
  }
  return v;
}

long long KeyValueDoc::get_int_or(const std::string& key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

void KeyValueDoc::require_keys(const std::vector<std::string>& keys) const {
  std::string missing;
  for (const auto& key : keys) {
    if (!has(key)) {
      if (!missing.empty()) missing += ", ";
      missing += key;
    }
  }
  if (!missing.empty()) {
    throw ConfigError("config " + origin_ + " is missing required keys: " + missing);
  }
}

void KeyValueDoc::set(const std::string& key, const std::string& value) {
  if (values_.emplace(key, value).second) {
    order_.push_back(key);
  } else {
    values_[key] = value;
  }
}

void KeyValueDoc::set_double(const std::string& key, double value) {
  set(key, format_double(value));
}

void KeyValueDoc::set_int(const std::string& key, long long value) {
  set(key, std::to_string(value));
}

std::string KeyValueDoc::serialize() const {
  std::ostringstream out;
  for (const auto& key : order_) {
    out << key << " = " << values_.at(key) << "\n";
  }
  return out.str();
}

}  // namespace tsl::harness
