#pragma once

// Binary checkpoints:
//
//   "NLS1" | u32 version | u64 n | f64 L | f64 t | n x (f64 re, f64 im)
//
// all little-endian. A checkpoint directory holds one file per snapshot plus
// `index.txt`, listing the file names in sequence order.

#include <bit>
#include <cctype>
#include <cstdio>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "nlsim/grid.hpp"

namespace nlsim {

inline constexpr char kCheckpointMagic[4] = {'N', 'L', 'S', '1'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

template <class T>
void put(std::ostream& out, T v) {
  v = to_little(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in, const std::string& path) {
  T v;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw StructuralError(path + ": truncated checkpoint");
  return to_little(v);
}

}  // namespace detail

inline void write_checkpoint(const Field& u, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StructuralError("cannot write checkpoint: " + path.string());
  out.write(kCheckpointMagic, 4);
  detail::put<std::uint32_t>(out, kCheckpointVersion);
  detail::put<std::uint64_t>(out, u.grid().n());
  detail::put<double>(out, u.grid().half_length());
  detail::put<double>(out, u.time());
  for (const auto& z : u.samples()) {
    detail::put<double>(out, z.real());
    detail::put<double>(out, z.imag());
  }
  if (!out) throw StructuralError("failed writing checkpoint: " + path.string());
}

inline Field read_checkpoint(const std::filesystem::path& path) {
  const std::string name = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StructuralError("cannot open checkpoint: " + name);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kCheckpointMagic, 4) != 0) {
    throw StructuralError(name + ": not an NLS1 checkpoint");
  }
  const auto version = detail::get<std::uint32_t>(in, name);
  if (version != kCheckpointVersion) throw StructuralError(name + ": unsupported version " + std::to_string(version));
  const auto n = detail::get<std::uint64_t>(in, name);
  const auto L = detail::get<double>(in, name);
  const auto t = detail::get<double>(in, name);
  Grid1D grid(static_cast<std::size_t>(n), L);
  std::vector<cplx> s(grid.n());
  for (auto& z : s) {
    const double re = detail::get<double>(in, name);
    const double im = detail::get<double>(in, name);
    z = cplx(re, im);
  }
  if (in.peek() != std::char_traits<char>::eof()) throw StructuralError(name + ": trailing bytes after samples");
  return Field(grid, std::move(s), t);
}

/// Writes fields as ckpt_000000.nls1, ... and an index.txt listing them in order.
inline void write_checkpoint_directory(const std::vector<Field>& fields, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream index(dir / "index.txt", std::ios::trunc);
  if (!index) throw StructuralError("cannot write index in " + dir.string());
  for (std::size_t i = 0; i < fields.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "ckpt_%06zu.nls1", i);
    write_checkpoint(fields[i], dir / name);
    index << name << "\n";
  }
}

/// Reads the files listed in dir/index.txt (one name per line, '#' comments allowed).
inline std::vector<Field> read_checkpoint_directory(const std::filesystem::path& dir) {
  std::ifstream index(dir / "index.txt");
  if (!index) throw StructuralError("missing index.txt in " + dir.string());
  std::vector<Field> out;
  std::string line;
  while (std::getline(index, line)) {
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.erase(line.begin());
    if (line.empty()) continue;
    out.push_back(read_checkpoint(dir / line));
  }
  return out;
}

}  // namespace nlsim
