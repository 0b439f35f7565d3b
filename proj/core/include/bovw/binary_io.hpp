#pragma once

// Little-endian primitives shared by the cache, codebook, bow and model files.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bovw::io {

class Writer {
 public:
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  void bytes(std::span<const std::uint8_t> data);
  void magic(std::string_view tag);
  /// u32 length prefix followed by the raw bytes.
  void str(std::string_view s);

  const std::vector<std::uint8_t>& buffer() const { return buf_; }
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<std::uint8_t> buf_;
};

class Reader {
 public:
  /// Reads the whole file; `what` names the file kind in error messages.
  Reader(const std::filesystem::path& path, std::string what);
  Reader(std::vector<std::uint8_t> data, std::string what);

  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  void bytes(std::span<std::uint8_t> out);
  void expect_magic(std::string_view tag);
  void expect_version(std::uint32_t version);
  std::string str();

  std::size_t remaining() const { return data_.size() - pos_; }
  void expect_end() const;

 private:
  const std::uint8_t* take(std::size_t n);

  std::vector<std::uint8_t> data_;
  std::size_t pos_ = 0;
  std::string what_;
};

}  // namespace bovw::io
