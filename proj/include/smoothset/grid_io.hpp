#pragma once

#include <string>
#include <vector>

#include "smoothset/dyadic.hpp"

namespace smoothset {

// MGR1 layout: 'M','G','R','1', u8 n, u8 K, then 2^{nK} little-endian
// doubles, first coordinate fastest.
std::vector<unsigned char> encode_grid(const MassGrid& g);
MassGrid decode_grid(const std::vector<unsigned char>& bytes);

void save_grid(const MassGrid& g, const std::string& path);
MassGrid load_grid(const std::string& path);

}  // namespace smoothset
