#pragma once

#include "qbd/experiment.hpp"

#include <filesystem>
#include <string>

namespace qbd {

// "# key=value ..." then "t,fidelity,prob_s2_plus,prob_ideal,I_t", %.17g values, LF endings.
std::string to_csv(const RunOutput& run);
RunOutput parse_csv(const std::string& text);

// Writes to a sibling temp file and renames it over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

std::string format_double(double x);

}  // namespace qbd
