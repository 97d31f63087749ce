#include "config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace cli {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

namespace {

bool valid_key(const std::string& k) {
  if (k.empty() || k.front() == '.' || k.back() == '.') return false;
  return std::all_of(k.begin(), k.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '.';
  });
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

}  // namespace

double parse_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError("key '" + key + "': empty value");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v))
    throw ConfigError("key '" + key + "': '" + t + "' is not a finite number");
  return v;
}

Config Config::parse(std::istream& in, const std::string& origin) {
  Config cfg;
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(no) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (!valid_key(key)) throw ConfigError(origin + ":" + std::to_string(no) + ": bad key '" + key + "'");
    cfg.values_[key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  return parse(f, path);
}

void Config::set(const std::string& key, const std::string& value) {
  if (!valid_key(key)) throw ConfigError("bad key '" + key + "'");
  values_[key] = trim(value);
}

void Config::set_assignment(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + text + "'");
  set(trim(text.substr(0, eq)), text.substr(eq + 1));
}

Settings::Settings(const Config& cfg, const Schema& schema) {
  for (const auto& k : schema) {
    values_[k.key] = k.fallback;
    types_[k.key] = k.type;
  }
  for (const auto& [key, value] : cfg.values()) {
    auto it = std::find_if(schema.begin(), schema.end(), [&](const KeySpec& k) { return k.key == key; });
    if (it == schema.end()) throw ConfigError("unknown key '" + key + "' for this subcommand");
    values_[key] = value;
    explicit_[key] = true;
  }
  // check every value once so errors surface before any work starts
  for (const auto& k : schema) {
    const std::string& v = values_[k.key];
    switch (k.type) {
      case KeyType::Number:
        parse_number(k.key, v);
        break;
      case KeyType::Integer:
        integer(k.key);
        break;
      case KeyType::Flag:
        flag(k.key);
        break;
      case KeyType::NumberList:
        numbers(k.key);
        break;
      case KeyType::Text:
        if (!k.choices.empty() && std::find(k.choices.begin(), k.choices.end(), v) == k.choices.end()) {
          std::string all;
          for (const auto& c : k.choices) all += (all.empty() ? "" : ", ") + c;
          throw ConfigError("key '" + k.key + "': '" + v + "' is not one of {" + all + "}");
        }
        break;
    }
  }
}

const std::string& Settings::raw(const std::string& key, KeyType type) const {
  auto it = types_.find(key);
  if (it == types_.end() || it->second != type) throw std::logic_error("settings: key '" + key + "' not in schema");
  return values_.at(key);
}

double Settings::number(const std::string& key) const { return parse_number(key, raw(key, KeyType::Number)); }

int Settings::integer(const std::string& key) const {
  const std::string& t = raw(key, KeyType::Integer);
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || v < -1000000000L || v > 1000000000L)
    throw ConfigError("key '" + key + "': '" + t + "' is not an integer");
  return static_cast<int>(v);
}

const std::string& Settings::text(const std::string& key) const { return raw(key, KeyType::Text); }

bool Settings::flag(const std::string& key) const {
  const std::string& t = raw(key, KeyType::Flag);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError("key '" + key + "': '" + t + "' is not a boolean");
}

std::vector<double> Settings::numbers(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split(raw(key, KeyType::NumberList), ',')) out.push_back(parse_number(key, item));
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

}  // namespace cli
