#pragma once

#include <string>
#include <string_view>

namespace smoothset {

std::string sha256_hex(std::string_view bytes);

/// Whole-file helpers; failures throw Error(Io).
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);
std::string sha256_file(const std::string& path);

/// Shortest text that reads back to the same double; "nan"/"inf" spelled out.
std::string fmt_double(double v);

}  // namespace smoothset
