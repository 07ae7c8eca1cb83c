#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ust::config {

// One [section] of an experiment file. Getters throw ConfigError naming the
// field as "section.key".
class Section {
 public:
  Section() = default;
  explicit Section(std::string name) : name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }
  const std::map<std::string, std::string>& entries() const noexcept { return entries_; }
  std::string field(std::string_view key) const;

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  void set(const std::string& key, std::string value) { entries_[key] = std::move(value); }

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_uint(const std::string& key) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  // Comma-separated lists.
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<std::size_t> get_sizes(const std::string& key) const;
  std::vector<std::string> get_strings(const std::string& key) const;

 private:
  std::string name_;
  std::map<std::string, std::string> entries_;
};

// An INI-style file: [section] headers, `key = value` lines, comments start
// with ';' or '#' (mid-line only after whitespace). Section names may contain
// dots ("process.low") to name nested specifications.
class Document {
 public:
  static Document parse(std::istream& in, const std::string& source_name);
  static Document parse_string(const std::string& text, const std::string& source_name = "<string>");
  static Document load(const std::filesystem::path& file);

  bool has_section(const std::string& name) const { return sections_.count(name) != 0; }
  const Section& section(const std::string& name) const;
  Section& section_or_create(const std::string& name);

  // "section.key=value"; the section is everything before the last dot.
  // Overrides take precedence over file values.
  void apply_override(std::string_view assignment);

  const std::string& source() const noexcept { return source_; }

 private:
  std::string source_;
  std::map<std::string, Section> sections_;
};

double parse_double(std::string_view text, const std::string& field);
std::uint64_t parse_uint(std::string_view text, const std::string& field);
std::vector<std::string> split_list(std::string_view text, char separator = ',');
std::string trim(std::string_view text);

}  // namespace ust::config
