#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "experiment.hpp"

namespace pxo::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parseDouble(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto r = std::from_chars(first, last, out);
  return r.ec == std::errc() && r.ptr == last && std::isfinite(out);
}

}  // namespace

Config Config::parse(std::istream& is, const std::string& source) {
  Config c;
  std::string line;
  int lineNo = 0;
  while (std::getline(is, line)) {
    ++lineNo;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(lineNo);
    if (eq == std::string::npos) throw ConfigError(where, "expected `key = value`");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where, "empty key");
    if (value.empty()) throw ConfigError(key, "empty value");
    const bool valid = std::all_of(key.begin(), key.end(), [](unsigned char ch) {
      return std::isalnum(ch) || ch == '.' || ch == '_' || ch == '-';
    });
    if (!valid) throw ConfigError(where, "invalid key `" + key + "`");
    if (c.values_.count(key)) throw ConfigError(key, "duplicate key (" + where + ")");
    c.values_[key] = value;
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open " + path.string());
  Config c = parse(in, path.string());
  c.baseDir_ = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  return c;
}

bool Config::has(const std::string& key) const { return values_.count(key) != 0; }

std::string Config::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(key, "missing");
  used_.insert(key);
  return it->second;
}

std::string Config::text(const std::string& key, const std::string& fallback) const {
  return has(key) ? text(key) : fallback;
}

double Config::number(const std::string& key) const {
  const std::string v = text(key);
  double out = 0.0;
  if (!parseDouble(v, out)) throw ConfigError(key, "expected a finite number, got `" + v + "`");
  return out;
}

double Config::number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

long Config::integer(const std::string& key) const {
  const std::string v = text(key);
  long out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw ConfigError(key, "expected an integer, got `" + v + "`");
  return out;
}

long Config::integer(const std::string& key, long fallback) const { return has(key) ? integer(key) : fallback; }

std::vector<double> Config::list(const std::string& key) const {
  std::string v = text(key);
  std::replace(v.begin(), v.end(), ',', ' ');
  std::istringstream is(v);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) {
    double d = 0.0;
    if (!parseDouble(tok, d)) throw ConfigError(key, "expected numbers, got `" + tok + "`");
    out.push_back(d);
  }
  if (out.empty()) throw ConfigError(key, "empty list");
  return out;
}

std::vector<double> Config::list(const std::string& key, const std::vector<double>& fallback) const {
  return has(key) ? list(key) : fallback;
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = value; }

std::filesystem::path Config::resolvePath(const std::string& key) const {
  const std::filesystem::path p(text(key));
  const std::filesystem::path full = p.is_absolute() ? p : baseDir_ / p;
  if (!std::filesystem::exists(full)) throw ConfigError(key, "file not found: " + full.string());
  return full;
}

std::vector<std::string> Config::unusedKeys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) {
    if (!used_.count(k)) out.push_back(k);
  }
  return out;
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

}  // namespace pxo::cli
