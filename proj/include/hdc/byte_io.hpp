#pragma once

// Little-endian byte packing shared by the dataset and model file formats.

#include <bit>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hdc/core.hpp"

namespace hdc::bytes {

class Writer {
 public:
  void put_magic(std::string_view magic) { buf_.insert(buf_.end(), magic.begin(), magic.end()); }
  void put_u32(std::uint32_t v) { put_le(v); }
  void put_u64(std::uint64_t v) { put_le(v); }
  void put_f32(float v) { put_le(std::bit_cast<std::uint32_t>(v)); }
  void put_f64(double v) { put_le(std::bit_cast<std::uint64_t>(v)); }

  [[nodiscard]] const std::vector<std::uint8_t>& buffer() const noexcept { return buf_; }
  std::vector<std::uint8_t> take() noexcept { return std::move(buf_); }

 private:
  template <typename U>
  void put_le(U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  std::vector<std::uint8_t> buf_;
};

// Reader over an in-memory image. Every read names the section it belongs
// to so truncation errors say what is missing.
class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) noexcept : data_(data) {}

  void expect_magic(std::string_view magic) {
    need(magic.size(), "magic");
    if (!std::equal(magic.begin(), magic.end(), data_.begin() + static_cast<std::ptrdiff_t>(pos_))) {
      throw Error(ErrorKind::kBadMagic, "expected magic \"" + std::string(magic) + "\"");
    }
    pos_ += magic.size();
  }
  std::uint32_t u32(std::string_view section) { return get_le<std::uint32_t>(section); }
  std::uint64_t u64(std::string_view section) { return get_le<std::uint64_t>(section); }
  float f32(std::string_view section) { return std::bit_cast<float>(get_le<std::uint32_t>(section)); }
  double f64(std::string_view section) { return std::bit_cast<double>(get_le<std::uint64_t>(section)); }

  // Fails up front when `count` more bytes are not available.
  void need(std::size_t count, std::string_view section) const {
    if (data_.size() - pos_ < count) {
      throw Error(ErrorKind::kTruncated, "file ends inside the " + std::string(section) + " section");
    }
  }
  void expect_end() const {
    if (pos_ != data_.size()) throw Error(ErrorKind::kFormat, std::to_string(data_.size() - pos_) + " trailing bytes");
  }

 private:
  template <typename U>
  U get_le(std::string_view section) {
    need(sizeof(U), section);
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(static_cast<U>(data_[pos_ + i]) << (8 * i));
    pos_ += sizeof(U);
    return v;
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> data);

}  // namespace hdc::bytes
