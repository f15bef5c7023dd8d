#pragma once

// Counter-based random streams.
//
// Every stream is a Philox4x32-10 generator keyed by a 64-bit value that is
// derived from (master seed, replication, role, ...) by hashing. Because the
// output of a stream depends only on its key and its position, any parallel
// schedule reproduces the draws of a sequential run.

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace kboot {

// Stream roles used when deriving keys. New roles must be appended.
enum class StreamRole : std::uint64_t {
  Data = 1,
  DataCopy = 2,
  Bootstrap = 3,
  InnerBootstrap = 4,
  Oracle = 5,
  Path = 6,
  Subset = 7,
};

std::uint64_t mix64(std::uint64_t x) noexcept;

// Hash an ordered list of components into a stream key.
std::uint64_t derive_key(std::initializer_list<std::uint64_t> parts) noexcept;

inline std::uint64_t derive_key(std::uint64_t master, std::uint64_t rep,
                                StreamRole role) noexcept {
  return derive_key({master, rep, static_cast<std::uint64_t>(role)});
}

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t key = 0) noexcept;

  // A child stream whose key hashes this stream's key with `index`.
  RngStream substream(std::uint64_t index) const noexcept;

  std::uint64_t key() const noexcept { return key_; }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept { return next_u64(); }

  std::uint64_t next_u64() noexcept;
  std::uint32_t next_u32() noexcept;

  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept;
  // Uniform integer in [0, bound).
  std::uint64_t uniform_index(std::uint64_t bound) noexcept;
  double normal() noexcept;
  // Gamma(shape, 1); returns log of the variate so that tiny shapes do not
  // underflow.
  double log_gamma_variate(double shape) noexcept;
  double gamma(double shape) noexcept;

 private:
  void refill() noexcept;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int available_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace kboot
