#include "ustat/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ustat/errors.hpp"

namespace ust::config {

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view text, char separator) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(separator, start);
    out.push_back(trim(text.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view text, const std::string& field) {
  const std::string s = trim(text);
  if (s == "inf" || s == "+inf" || s == "infinity") return INFINITY;
  if (s == "-inf" || s == "-infinity") return -INFINITY;
  double value = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (!s.empty() && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (s.empty() || ec != std::errc{} || ptr != end) {
    throw ConfigError("expected a real number, got '" + s + "'", field);
  }
  return value;
}

std::uint64_t parse_uint(std::string_view text, const std::string& field) {
  const std::string s = trim(text);
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    // Accept integral values written in scientific notation, e.g. 2e5.
    double d = 0.0;
    auto [dptr, dec] = std::from_chars(s.data(), s.data() + s.size(), d);
    if (!s.empty() && dec == std::errc{} && dptr == s.data() + s.size() && d >= 0.0 &&
        d < 1.8e19 && std::floor(d) == d) {
      return static_cast<std::uint64_t>(d);
    }
    throw ConfigError("expected a non-negative integer, got '" + s + "'", field);
  }
  return value;
}

std::string Section::field(std::string_view key) const {
  return name_.empty() ? std::string(key) : name_ + "." + std::string(key);
}

std::string Section::get_string(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing required key", field(key));
  return it->second;
}

std::string Section::get_string(const std::string& key, const std::string& fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double Section::get_double(const std::string& key) const {
  return parse_double(get_string(key), field(key));
}

double Section::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::uint64_t Section::get_uint(const std::string& key) const {
  return parse_uint(get_string(key), field(key));
}

std::uint64_t Section::get_uint(const std::string& key, std::uint64_t fallback) const {
  return has(key) ? get_uint(key) : fallback;
}

std::vector<double> Section::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(get_string(key))) out.push_back(parse_double(item, field(key)));
  return out;
}

std::vector<std::size_t> Section::get_sizes(const std::string& key) const {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(get_string(key))) {
    out.push_back(static_cast<std::size_t>(parse_uint(item, field(key))));
  }
  return out;
}

std::vector<std::string> Section::get_strings(const std::string& key) const {
  return split_list(get_string(key));
}

Document Document::parse(std::istream& in, const std::string& source_name) {
  // boost's INI reader only knows ';' comments; map '#' comment lines onto it
  // line by line so reported line numbers stay correct.
  std::ostringstream normalized;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t");
    if (first != std::string::npos && line[first] == '#') line[first] = ';';
    // Inline comments need leading whitespace: "mode = exact  ; note".
    if (first != std::string::npos && line[first] != ';') {
      for (std::size_t i = first + 1; i < line.size(); ++i) {
        if ((line[i] == ';' || line[i] == '#') && (line[i - 1] == ' ' || line[i - 1] == '\t')) {
          line.erase(i);
          break;
        }
      }
    }
    normalized << line << '\n';
  }

  boost::property_tree::ptree tree;
  std::istringstream text(normalized.str());
  try {
    boost::property_tree::ini_parser::read_ini(text, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(source_name + ":" + std::to_string(e.line()) + ": " + e.message());
  }

  Document doc;
  doc.source_ = source_name;
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      throw ConfigError(source_name + ": key '" + name + "' must appear inside a [section]");
    }
    Section& section = doc.section_or_create(name);
    for (const auto& [key, value] : node) section.set(key, trim(value.data()));
  }
  return doc;
}

Document Document::parse_string(const std::string& text, const std::string& source_name) {
  std::istringstream in(text);
  return parse(in, source_name);
}

Document Document::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file '" + file.string() + "'");
  return parse(in, file.string());
}

const Section& Document::section(const std::string& name) const {
  auto it = sections_.find(name);
  if (it == sections_.end()) throw ConfigError("missing section [" + name + "]", name);
  return it->second;
}

Section& Document::section_or_create(const std::string& name) {
  auto it = sections_.find(name);
  if (it == sections_.end()) it = sections_.emplace(name, Section(name)).first;
  return it->second;
}

void Document::apply_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("override '" + std::string(assignment) + "' is not of the form key=value");
  }
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  const auto dot = key.rfind('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == key.size()) {
    throw ConfigError("override key '" + key + "' must look like section.key");
  }
  section_or_create(key.substr(0, dot)).set(key.substr(dot + 1), value);
}

}  // namespace ust::config
