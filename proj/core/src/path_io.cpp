#include "ustat/path_io.hpp"

#include <fmt/format.h>
#include <unistd.h>

#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "ustat/config.hpp"
#include "ustat/errors.hpp"

namespace ust::processes {

void write_path_csv(std::ostream& out, const SamplePath& path) {
  out << "# process_id=" << path.process_id() << '\n';
  out << "# seed=" << path.seed() << '\n';
  out << "# dimension=" << path.dim() << '\n';
  if (path.latent_component()) out << "# latent_component=" << *path.latent_component() << '\n';
  if (path.pair_split() != 0) out << "# pair_split=" << path.pair_split() << '\n';

  out << "index";
  for (std::size_t c = 0; c < path.dim(); ++c) out << ",coord_" << c;
  out << '\n';

  fmt::memory_buffer row;
  for (std::size_t i = 0; i < path.size(); ++i) {
    row.clear();
    fmt::format_to(std::back_inserter(row), "{}", i + 1);
    for (double v : path.point(i)) fmt::format_to(std::back_inserter(row), ",{:.17g}", v);
    row.push_back('\n');
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

SamplePath read_path_csv(std::istream& in, const std::string& source_name) {
  std::map<std::string, std::string> meta;
  std::vector<double> data;
  std::optional<std::size_t> dim;
  std::string line;
  std::size_t line_no = 0;
  std::size_t rows = 0;

  auto fail = [&](const std::string& message) -> ConfigError {
    return ConfigError(source_name + ":" + std::to_string(line_no) + ": " + message);
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string trimmed = config::trim(line);
    if (trimmed.empty()) continue;
    if (trimmed.front() == '#') {
      const std::string body = config::trim(std::string_view(trimmed).substr(1));
      const auto eq = body.find('=');
      if (eq != std::string::npos) meta[config::trim(body.substr(0, eq))] = config::trim(body.substr(eq + 1));
      continue;
    }
    const auto cells = config::split_list(trimmed);
    if (!dim) {
      if (cells.empty() || cells[0] != "index") throw fail("expected header 'index,coord_0,...'");
      if (cells.size() < 2) throw fail("header names no coordinate columns");
      dim = cells.size() - 1;
      continue;
    }
    if (cells.size() != *dim + 1) {
      throw fail("expected " + std::to_string(*dim + 1) + " columns, found " +
                 std::to_string(cells.size()));
    }
    ++rows;
    try {
      if (config::parse_uint(cells[0], "index") != rows) throw fail("index out of sequence");
      for (std::size_t c = 1; c < cells.size(); ++c) {
        data.push_back(config::parse_double(cells[c], "coord_" + std::to_string(c - 1)));
      }
    } catch (const ConfigError& e) {
      if (std::string(e.what()).rfind(source_name, 0) == 0) throw;
      throw fail(e.what());
    }
  }
  if (!dim) throw ConfigError(source_name + ": missing header line");
  if (rows == 0) throw ConfigError(source_name + ": no data rows");

  auto meta_uint = [&](const std::string& key) -> std::optional<std::uint64_t> {
    auto it = meta.find(key);
    if (it == meta.end()) return std::nullopt;
    return config::parse_uint(it->second, source_name + ": " + key);
  };
  const auto seed = meta_uint("seed").value_or(0);
  std::optional<std::size_t> latent;
  if (auto v = meta_uint("latent_component")) latent = static_cast<std::size_t>(*v);
  const auto split = static_cast<std::size_t>(meta_uint("pair_split").value_or(0));
  const std::string id = meta.count("process_id") ? meta["process_id"] : source_name;
  try {
    return SamplePath(std::move(data), *dim, seed, latent, id, split);
  } catch (const DomainError& e) {
    throw ConfigError(source_name + ": " + e.what());
  }
}

void save_path_csv(const std::filesystem::path& file, const SamplePath& path) {
  std::ostringstream out;
  write_path_csv(out, path);
  write_file_atomically(file, out.str());
}

SamplePath load_path_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open path file '" + file.string() + "'");
  return read_path_csv(in, file.string());
}

void write_file_atomically(const std::filesystem::path& file, const std::string& contents) {
  auto tmp = file;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, file, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + file.string() + "'");
  }
}

}  // namespace ust::processes
