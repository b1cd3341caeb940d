#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <vector>

#include "witness/common.hpp"

namespace witness {

// Filter sizing derived from a fixed bit budget M and a target false-positive
// rate f:
//   n = floor(-M (ln 2)^2 / ln f)    elements per filter
//   k = max(1, round((M / n) ln 2))  hash probes per element
// n rounds down so the realized rate never exceeds the target.
struct BloomParams {
  std::uint32_t filter_bits = 0;   // M
  std::uint32_t capacity = 0;      // n
  std::uint32_t hash_count = 0;    // k
  double target_fpr = 0.0;         // f

  bool operator==(const BloomParams&) const = default;
};

inline BloomParams params_from_error(std::uint32_t filter_bits, double target_fpr) {
  if (filter_bits < 8) throw std::domain_error("filter_bits must be >= 8");
  if (!(target_fpr > 0.0 && target_fpr < 1.0))
    throw std::domain_error("target_fpr must be in (0,1)");
  const double ln2 = std::log(2.0);
  double n_real = -static_cast<double>(filter_bits) * ln2 * ln2 / std::log(target_fpr);
  auto capacity = static_cast<std::uint32_t>(std::floor(n_real));
  if (capacity < 1) capacity = 1;
  auto hash_count = static_cast<std::uint32_t>(
      std::lround(static_cast<double>(filter_bits) / capacity * ln2));
  if (hash_count < 1) hash_count = 1;
  return BloomParams{filter_bits, capacity, hash_count, target_fpr};
}

// (1 - e^{-k n / M})^k, the standard fill-based false-positive estimate.
inline double theoretical_fpr(std::uint32_t filter_bits, std::uint32_t hash_count,
                              std::uint32_t inserted) {
  if (inserted == 0) return 0.0;
  double fill = 1.0 - std::exp(-static_cast<double>(hash_count) * inserted / filter_bits);
  return std::pow(fill, static_cast<double>(hash_count));
}

enum class Membership { DefinitelyAbsent, PossiblyPresent };

// Fixed-size bloom filter over raw byte sequences. Probe positions come from
// one seeded 64-bit hash of the element, remixed independently per probe index.
// Absent verdicts are exact; present verdicts carry error <= target_fpr when
// the filter holds at most `capacity` elements.
class BloomFilter {
 public:
  BloomFilter(BloomParams params, std::uint64_t hash_seed)
      : params_(params), hash_seed_(hash_seed), bits_(params.filter_bits / 8, 0) {
    if (params.filter_bits % 8 != 0)
      throw std::domain_error("filter_bits must be a multiple of 8");
  }

  const BloomParams& params() const { return params_; }
  std::uint64_t hash_seed() const { return hash_seed_; }
  std::uint32_t inserted_count() const { return inserted_count_; }
  std::span<const std::uint8_t> bit_bytes() const { return bits_; }

  void insert(std::span<const std::uint8_t> element) {
    if (inserted_count_ >= params_.capacity)
      throw std::length_error("bloom filter at capacity");
    for_each_position(element, [this](std::uint32_t pos) { set_bit(pos); });
    ++inserted_count_;
  }

  Membership contains(std::span<const std::uint8_t> element) const {
    bool all_set = true;
    for_each_position(element, [this, &all_set](std::uint32_t pos) {
      if (!get_bit(pos)) all_set = false;
    });
    return all_set ? Membership::PossiblyPresent : Membership::DefinitelyAbsent;
  }

  std::uint32_t popcount() const {
    std::uint32_t c = 0;
    for (std::uint8_t b : bits_) c += static_cast<std::uint32_t>(__builtin_popcount(b));
    return c;
  }

  // Wire layout, all fields big-endian, bit 0 of the filter = MSB of byte 0:
  //   u32 filter_bits | u32 hash_count | u64 hash_seed |
  //   u32 capacity | u32 inserted_count | u64 target_fpr (IEEE-754 bits) |
  //   filter_bits/8 payload bytes
  // A 256-bit filter serializes to a 32-byte payload after the 32-byte header.
  static constexpr std::size_t kHeaderBytes = 32;

  std::vector<std::uint8_t> serialize() const {
    std::vector<std::uint8_t> out;
    out.reserve(kHeaderBytes + bits_.size());
    append_u32_be(out, params_.filter_bits);
    append_u32_be(out, params_.hash_count);
    append_u64_be(out, hash_seed_);
    append_u32_be(out, params_.capacity);
    append_u32_be(out, inserted_count_);
    std::uint64_t fbits;
    static_assert(sizeof(double) == sizeof(std::uint64_t));
    std::memcpy(&fbits, &params_.target_fpr, sizeof(fbits));
    append_u64_be(out, fbits);
    out.insert(out.end(), bits_.begin(), bits_.end());
    return out;
  }

  static BloomFilter deserialize(std::span<const std::uint8_t> data) {
    if (data.size() < kHeaderBytes)
      throw std::invalid_argument("bloom payload truncated");
    std::uint32_t filter_bits = read_u32_be(data, 0);
    std::uint32_t hash_count = read_u32_be(data, 4);
    std::uint64_t seed = read_u64_be(data, 8);
    std::uint32_t capacity = read_u32_be(data, 16);
    std::uint32_t inserted = read_u32_be(data, 20);
    std::uint64_t fbits = read_u64_be(data, 24);
    double fpr;
    std::memcpy(&fpr, &fbits, sizeof(fpr));
    if (data.size() != kHeaderBytes + filter_bits / 8)
      throw std::invalid_argument("bloom payload size mismatch");
    BloomParams params{filter_bits, capacity, hash_count, fpr};
    BloomFilter f(params, seed);
    f.inserted_count_ = inserted;
    std::copy(data.begin() + kHeaderBytes, data.end(), f.bits_.begin());
    return f;
  }

  bool operator==(const BloomFilter&) const = default;

 private:
  template <typename Fn>
  void for_each_position(std::span<const std::uint8_t> element, Fn&& fn) const {
    const std::uint32_t m = params_.filter_bits;
    // One FNV pass over the element, then an independent finalizer mix per
    // probe. Arithmetic-progression probing (h1 + i*h2) correlates positions
    // enough at small m to push the realized FPR visibly above the ideal
    // formula, so each index gets its own mix instead.
    const std::uint64_t base = fnv1a64(element, mix64(hash_seed_));
    for (std::uint32_t i = 0; i < params_.hash_count; ++i) {
      const std::uint64_t h = mix64(base + i * 0x9e3779b97f4a7c15ULL);
      fn(static_cast<std::uint32_t>(h % m));
    }
  }

  void set_bit(std::uint32_t pos) { bits_[pos / 8] |= std::uint8_t(0x80u >> (pos % 8)); }
  bool get_bit(std::uint32_t pos) const {
    return (bits_[pos / 8] & std::uint8_t(0x80u >> (pos % 8))) != 0;
  }

  BloomParams params_;
  std::uint64_t hash_seed_ = 0;
  std::vector<std::uint8_t> bits_;
  std::uint32_t inserted_count_ = 0;
};

}  // namespace witness
