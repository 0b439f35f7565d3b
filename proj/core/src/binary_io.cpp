#include "bovw/binary_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "bovw/error.hpp"

namespace bovw::io {

void Writer::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void Writer::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void Writer::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void Writer::bytes(std::span<const std::uint8_t> data) { buf_.insert(buf_.end(), data.begin(), data.end()); }

void Writer::magic(std::string_view tag) { buf_.insert(buf_.end(), tag.begin(), tag.end()); }

void Writer::str(std::string_view s) {
  u32(static_cast<std::uint32_t>(s.size()));
  buf_.insert(buf_.end(), s.begin(), s.end());
}

void Writer::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(buf_.data()), static_cast<std::streamsize>(buf_.size()));
  if (!out) throw Error("write failed: " + path.string());
}

Reader::Reader(const std::filesystem::path& path, std::string what) : what_(std::move(what)) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + what_ + ": " + path.string());
  data_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

Reader::Reader(std::vector<std::uint8_t> data, std::string what) : data_(std::move(data)), what_(std::move(what)) {}

const std::uint8_t* Reader::take(std::size_t n) {
  if (n > remaining()) throw Error(what_ + ": unexpected end of file");
  const std::uint8_t* p = data_.data() + pos_;
  pos_ += n;
  return p;
}

std::uint32_t Reader::u32() {
  const std::uint8_t* p = take(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t{p[i]} << (8 * i);
  return v;
}

std::uint64_t Reader::u64() {
  const std::uint8_t* p = take(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{p[i]} << (8 * i);
  return v;
}

double Reader::f64() { return std::bit_cast<double>(u64()); }

void Reader::bytes(std::span<std::uint8_t> out) {
  const std::uint8_t* p = take(out.size());
  std::memcpy(out.data(), p, out.size());
}

void Reader::expect_magic(std::string_view tag) {
  const std::uint8_t* p = take(tag.size());
  if (std::memcmp(p, tag.data(), tag.size()) != 0) throw Error(what_ + ": bad magic, expected " + std::string(tag));
}

void Reader::expect_version(std::uint32_t version) {
  const std::uint32_t v = u32();
  if (v != version) throw Error(what_ + ": unsupported version " + std::to_string(v));
}

std::string Reader::str() {
  const std::uint32_t n = u32();
  const std::uint8_t* p = take(n);
  return std::string(reinterpret_cast<const char*>(p), n);
}

void Reader::expect_end() const {
  if (remaining() != 0) throw Error(what_ + ": trailing bytes after payload");
}

}  // namespace bovw::io
