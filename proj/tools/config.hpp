#pragma once

#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace cli {

// Schema violations: unknown keys, unparsable values, bad files.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class KeyType { Number, Integer, Text, Flag, NumberList };

struct KeySpec {
  std::string key;
  KeyType type;
  std::string fallback;
  std::vector<std::string> choices;  // Text only; empty means free text
};

using Schema = std::vector<KeySpec>;

// Flat key = value document; later assignments override earlier ones.
class Config {
 public:
  static Config parse(std::istream& in, const std::string& origin);
  static Config load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  void set_assignment(const std::string& text);  // "key=value"
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// Typed view of a Config after validation against a schema.
class Settings {
 public:
  Settings(const Config& cfg, const Schema& schema);

  double number(const std::string& key) const;
  int integer(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;
  bool given(const std::string& key) const { return explicit_.count(key) > 0; }

 private:
  const std::string& raw(const std::string& key, KeyType type) const;

  std::map<std::string, std::string> values_;
  std::map<std::string, KeyType> types_;
  std::map<std::string, bool> explicit_;
};

double parse_number(const std::string& key, const std::string& text);
std::string trim(const std::string& s);

}  // namespace cli
