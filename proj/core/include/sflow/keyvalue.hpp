#ifndef SFLOW_KEYVALUE_HPP
#define SFLOW_KEYVALUE_HPP

#include <optional>
#include <string>
#include <vector>

namespace sflow {

// Flat "key = value" text with optional [section] blocks and # comments.
// Used for run configs and scene specs; trivially parseable and diffable.
struct KeyValueSection {
  std::string name;  // empty for the leading global section
  std::vector<std::pair<std::string, std::string>> entries;

  std::optional<std::string> get(const std::string& key) const;
  std::string require(const std::string& key) const;
  double requireDouble(const std::string& key) const;
  double getDouble(const std::string& key, double fallback) const;
  int getInt(const std::string& key, int fallback) const;
  std::vector<double> getDoubles(const std::string& key) const;  // whitespace/comma split
};

struct KeyValueFile {
  std::vector<KeyValueSection> sections;  // sections[0] is the global one

  const KeyValueSection& global() const { return sections.front(); }
  std::vector<const KeyValueSection*> named(const std::string& name) const;
};

KeyValueFile parseKeyValue(const std::string& text);
KeyValueFile loadKeyValue(const std::string& path);

}  // namespace sflow

#endif
