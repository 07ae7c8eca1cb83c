#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "ustat/point.hpp"

namespace ust::processes {

// Path CSV:
//
//   # process_id=ar1(mean=0,rho=0.5,sigma=1)
//   # seed=42
//   # dimension=1
//   # latent_component=1        (mixture paths only)
//   # pair_split=1              (paired paths only)
//   index,coord_0
//   1,0.12345678901234567
//   ...
//
// Values use 17 significant digits so a write/read round trip is exact.
void write_path_csv(std::ostream& out, const SamplePath& path);
SamplePath read_path_csv(std::istream& in, const std::string& source_name = "<stream>");

void save_path_csv(const std::filesystem::path& file, const SamplePath& path);
SamplePath load_path_csv(const std::filesystem::path& file);

// Writes via a temporary sibling file and renames it into place.
void write_file_atomically(const std::filesystem::path& file, const std::string& contents);

}  // namespace ust::processes
