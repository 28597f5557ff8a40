// Machine-readable output of an experiment run.
#pragma once

#include "modrecip/harness/experiments.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace modrecip::harness {

inline constexpr int kSchemaVersion = 1;

/// Pretty JSON. Non-finite numbers are written as the strings "inf", "-inf"
/// and "nan". Timings are included only on request, so that the default
/// output is byte-stable.
std::string render_json(const Report& report, bool timings = false);

/// Header plus one line per row:
/// experiment,n,p,norm,value,reference,rel_error,tolerance,pass
void emit_csv(const Report& report, std::ostream& out);

/// Writes to a file; failures throw std::runtime_error naming the path.
void write_file(const std::filesystem::path& path, const std::string& body);

}  // namespace modrecip::harness
