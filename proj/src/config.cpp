#include "neupde/config.hpp"

#include <fstream>
#include <sstream>

namespace neupde {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return from_string(os.str());
}

KeyValueConfig KeyValueConfig::from_string(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    cfg.entries_[key] = value;
  }
  return cfg;
}

bool KeyValueConfig::has(const std::string& key) const {
  return entries_.count(key) != 0;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  entries_[key] = value;
}

std::string KeyValueConfig::get_string(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing required key: " + key);
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key) const {
  const std::string v = get_string(key);
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (trim(v.substr(pos)).empty()) return d;
  } catch (...) {
  }
  throw ConfigError("key " + key + ": expected a number, got '" + v + "'");
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long KeyValueConfig::get_long(const std::string& key) const {
  const std::string v = get_string(key);
  try {
    std::size_t pos = 0;
    const long n = std::stol(v, &pos);
    if (trim(v.substr(pos)).empty()) return n;
  } catch (...) {
  }
  throw ConfigError("key " + key + ": expected an integer, got '" + v + "'");
}

long KeyValueConfig::get_long(const std::string& key, long fallback) const {
  return has(key) ? get_long(key) : fallback;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get_string(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key " + key + ": expected a boolean, got '" + v + "'");
}

std::vector<double> KeyValueConfig::get_list(const std::string& key) const {
  const std::string v = get_string(key);
  std::vector<double> out;
  std::istringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (...) {
      throw ConfigError("key " + key + ": expected numbers, got '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("key " + key + ": empty list");
  return out;
}

std::uint64_t KeyValueConfig::seed() const {
  if (!has("run.seed"))
    throw ConfigError("missing required key: run.seed (no entropy default)");
  const std::string v = get_string("run.seed");
  try {
    std::size_t pos = 0;
    const unsigned long long s = std::stoull(v, &pos);
    if (trim(v.substr(pos)).empty()) return static_cast<std::uint64_t>(s);
  } catch (...) {
  }
  throw ConfigError("key run.seed: expected an unsigned integer, got '" + v + "'");
}

std::string KeyValueConfig::canonical() const {
  std::ostringstream os;
  for (const auto& [k, v] : entries_) os << k << " = " << v << '\n';
  return os.str();
}

std::shared_ptr<const Domain> domain_from_config(const KeyValueConfig& cfg) {
  const std::string kind = cfg.get_string("domain.kind", "interval");
  const std::vector<double> params =
      cfg.has("domain.params") ? cfg.get_list("domain.params")
                               : std::vector<double>{-1.0, 1.0};
  if (kind == "interval") {
    if (params.size() != 2)
      throw ConfigError("domain.params: interval expects 'a, b'");
    if (!(params[0] < params[1]))
      throw ConfigError("domain.params: interval expects a < b");
    return make_interval(params[0], params[1]);
  }
  if (kind == "ball") {
    if (params.size() < 2 || params.size() > Vec::kMaxDim + 1)
      throw ConfigError("domain.params: ball expects 'c1, ..., cN, r'");
    Vec center(params.size() - 1);
    for (std::size_t i = 0; i + 1 < params.size(); ++i) center[i] = params[i];
    if (!(params.back() > 0.0))
      throw ConfigError("domain.params: ball expects radius > 0");
    return make_ball(center, params.back());
  }
  throw ConfigError("domain.kind: expected 'interval' or 'ball', got '" + kind + "'");
}

}  // namespace neupde
