#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "supalign/linalg.hpp"

namespace supalign {

// 64-bit FNV-1a.
class Digest {
 public:
  void update(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      state_ ^= bytes[i];
      state_ *= 0x100000001b3ULL;
    }
  }
  void update(std::string_view s) { update(s.data(), s.size()); }
  void update(const Matrix& m) {
    const std::int64_t shape[2] = {m.rows(), m.cols()};
    update(shape, sizeof(shape));
    update(m.data(), static_cast<std::size_t>(m.size()) * sizeof(double));
  }
  std::uint64_t value() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace supalign
