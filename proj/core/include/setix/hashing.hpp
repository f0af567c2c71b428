#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace setix {

using ElementKey = std::uint64_t;

/// Resolves the run seed: explicit value, then the SETIX_SEED environment
/// variable, then OS entropy.
std::uint64_t resolve_seed(std::optional<std::uint64_t> explicit_seed = std::nullopt);

/// Derives independent child seeds from one 64-bit seed.
class SeedStream {
  public:
    explicit SeedStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

  private:
    std::mt19937_64 engine_;
};

/// Multiply-add-shift hashing of 64-bit keys (Dietzfelbinger): the high bits
/// of (a*x + b) mod 2^128 for odd a. Pairwise independent on the top bits.
class MultiplyShift {
  public:
    explicit MultiplyShift(SeedStream &seeds);

    /// Top `bits` bits of the 128-bit product, bits in [1, 64].
    std::uint64_t top_bits(ElementKey x, unsigned bits) const noexcept {
        const unsigned __int128 v = mul_ * x + add_;
        return static_cast<std::uint64_t>(v >> (128 - bits));
    }

  private:
    unsigned __int128 mul_;
    unsigned __int128 add_;
};

/// h: keys -> [0, num_buckets).
class BucketHash {
  public:
    BucketHash(std::uint64_t num_buckets, SeedStream &seeds);

    std::uint64_t num_buckets() const noexcept { return num_buckets_; }

    std::uint64_t operator()(ElementKey x) const noexcept {
        // 32 uniform bits scaled into the bucket range
        return (fn_.top_bits(x, 32) * num_buckets_) >> 32;
    }

  private:
    MultiplyShift fn_;
    std::uint64_t num_buckets_;
};

/// h': keys -> [0, 2^bits); bits = 2*log2(w) gives the w^2 fingerprint universe.
class FingerprintHash {
  public:
    FingerprintHash(unsigned bits, SeedStream &seeds);

    std::uint64_t range() const noexcept { return std::uint64_t{1} << bits_; }

    std::uint32_t operator()(ElementKey x) const noexcept {
        return static_cast<std::uint32_t>(fn_.top_bits(x, bits_));
    }

  private:
    MultiplyShift fn_;
    unsigned bits_;
};

}  // namespace setix
