#include "smoothset/grid_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace smoothset {

namespace {

constexpr unsigned char kMagic[4] = {'M', 'G', 'R', '1'};
constexpr std::size_t kHeader = 6;

void put_le(std::vector<unsigned char>& out, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<unsigned char>(bits >> (8 * b)));
}

double get_le(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(p[b]) << (8 * b);
  return std::bit_cast<double>(bits);
}

}  // namespace

std::vector<unsigned char> encode_grid(const MassGrid& g) {
  std::vector<unsigned char> out(kMagic, kMagic + 4);
  out.push_back(static_cast<unsigned char>(g.dim()));
  out.push_back(static_cast<unsigned char>(g.level()));
  out.reserve(kHeader + 8 * g.cell_count());
  for (double m : g.cells()) put_le(out, m);
  return out;
}

MassGrid decode_grid(const std::vector<unsigned char>& bytes) {
  if (bytes.size() < 4) throw Error(ErrorKind::Truncated, "truncated");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw Error(ErrorKind::BadMagic, "bad magic");
  if (bytes.size() < kHeader) throw Error(ErrorKind::Truncated, "truncated");
  const int n = bytes[4];
  const int K = bytes[5];
  if ((n != 1 && n != 2) || n * K > 32)
    throw Error(ErrorKind::BadHeader, "bad header: n=" + std::to_string(n) + " K=" + std::to_string(K));
  const std::size_t count = std::size_t{1} << (n * K);
  if (bytes.size() < kHeader + 8 * count) throw Error(ErrorKind::Truncated, "truncated");
  if (bytes.size() > kHeader + 8 * count) throw Error(ErrorKind::BadHeader, "trailing bytes after payload");
  std::vector<double> cells(count);
  for (std::size_t i = 0; i < count; ++i) {
    cells[i] = get_le(bytes.data() + kHeader + 8 * i);
    if (!(cells[i] >= 0.0 && cells[i] <= 1.0)) throw Error(ErrorKind::MassOutOfRange, "mass out of range");
  }
  return MassGrid(n, K, std::move(cells));
}

void save_grid(const MassGrid& g, const std::string& path) {
  const auto bytes = encode_grid(g);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(ErrorKind::Io, "write failed: " + path);
}

MassGrid load_grid(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_grid(bytes);
}

}  // namespace smoothset
