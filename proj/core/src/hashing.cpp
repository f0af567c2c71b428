#include "setix/hashing.hpp"

#include <cstdlib>
#include <string>

#include "setix/errors.hpp"

namespace setix {

std::uint64_t resolve_seed(std::optional<std::uint64_t> explicit_seed) {
    if (explicit_seed) return *explicit_seed;
    if (const char *env = std::getenv("SETIX_SEED"); env != nullptr && *env != '\0') {
        try {
            std::size_t used = 0;
            const std::uint64_t v = std::stoull(env, &used, 0);
            if (used == std::string(env).size()) return v;
        } catch (const std::exception &) {
        }
        throw UsageError(std::string("SETIX_SEED is not an unsigned integer: ") + env);
    }
    std::random_device rd;
    return (std::uint64_t{rd()} << 32) ^ rd();
}

MultiplyShift::MultiplyShift(SeedStream &seeds) {
    const unsigned __int128 m_hi = seeds.next();
    const unsigned __int128 m_lo = seeds.next();
    const unsigned __int128 a_hi = seeds.next();
    const unsigned __int128 a_lo = seeds.next();
    mul_ = (m_hi << 64) | m_lo | 1;
    add_ = (a_hi << 64) | a_lo;
}

BucketHash::BucketHash(std::uint64_t num_buckets, SeedStream &seeds) : fn_(seeds), num_buckets_(num_buckets) {
    if (num_buckets == 0 || num_buckets > (std::uint64_t{1} << 32)) {
        throw UsageError("bucket count must be in [1, 2^32]");
    }
}

FingerprintHash::FingerprintHash(unsigned bits, SeedStream &seeds) : fn_(seeds), bits_(bits) {
    if (bits == 0 || bits > 32) throw UsageError("fingerprint width must be in [1, 32] bits");
}

}  // namespace setix
