#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace wfkit {

/// 64-bit FNV-1a hash; stable across platforms and releases.
inline std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

/// Derives an independent stream seed from a base seed and a label
/// (task id, task type, family name).
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view label) {
    return base ^ fnv1a64(label);
}

/// Seedable random source. The engine is std::mt19937_64, whose output
/// sequence is fully specified by the C++ standard, so draws are
/// reproducible across platforms. Uniform doubles are built directly
/// from the raw 64-bit output (never through std::uniform_real_distribution,
/// which is implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform draw strictly inside (0, 1): ((raw >> 11) + 0.5) / 2^53.
    double next_unit() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace wfkit
