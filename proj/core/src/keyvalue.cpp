#include "sflow/keyvalue.hpp"

#include <fstream>
#include <sstream>

#include "sflow/errors.hpp"

namespace sflow {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::optional<std::string> KeyValueSection::get(const std::string& key) const {
  // Last occurrence wins so overrides can simply be appended.
  std::optional<std::string> out;
  for (const auto& [k, v] : entries)
    if (k == key) out = v;
  return out;
}

std::string KeyValueSection::require(const std::string& key) const {
  auto v = get(key);
  if (!v) throw ConfigError("missing required key: " + key);
  return *v;
}

double KeyValueSection::requireDouble(const std::string& key) const {
  try {
    return std::stod(require(key));
  } catch (const std::invalid_argument&) {
    throw ConfigError("key " + key + " is not a number");
  }
}

double KeyValueSection::getDouble(const std::string& key, double fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  try {
    return std::stod(*v);
  } catch (const std::invalid_argument&) {
    throw ConfigError("key " + key + " is not a number");
  }
}

int KeyValueSection::getInt(const std::string& key, int fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  try {
    return std::stoi(*v);
  } catch (const std::invalid_argument&) {
    throw ConfigError("key " + key + " is not an integer");
  }
}

std::vector<double> KeyValueSection::getDoubles(const std::string& key) const {
  std::string raw = require(key);
  for (char& c : raw)
    if (c == ',') c = ' ';
  std::istringstream is(raw);
  std::vector<double> out;
  double v;
  while (is >> v) out.push_back(v);
  if (!is.eof()) throw ConfigError("key " + key + " has non-numeric entries");
  return out;
}

std::vector<const KeyValueSection*> KeyValueFile::named(const std::string& name) const {
  std::vector<const KeyValueSection*> out;
  for (const auto& s : sections)
    if (s.name == name) out.push_back(&s);
  return out;
}

KeyValueFile parseKeyValue(const std::string& text) {
  KeyValueFile file;
  file.sections.push_back({});
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": unterminated section");
      file.sections.push_back({trim(line.substr(1, line.size() - 2)), {}});
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    file.sections.back().entries.emplace_back(trim(line.substr(0, eq)),
                                              trim(line.substr(eq + 1)));
  }
  return file;
}

KeyValueFile loadKeyValue(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parseKeyValue(buf.str());
}

}  // namespace sflow
