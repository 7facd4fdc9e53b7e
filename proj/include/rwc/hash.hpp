#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <string_view>

namespace rwc {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives an independent stream seed from a base seed and a stream index.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

/// FNV-1a, used for content fingerprints of artifacts.
class Fnv1a {
public:
    void update(std::string_view bytes) noexcept {
        for (unsigned char c : bytes) {
            state_ ^= c;
            state_ *= 0x100000001b3ULL;
        }
    }
    void update_u64(std::uint64_t v) noexcept {
        for (int i = 0; i < 8; ++i) {
            state_ ^= (v >> (8 * i)) & 0xffU;
            state_ *= 0x100000001b3ULL;
        }
    }
    void update_double(double v) noexcept { update_u64(std::bit_cast<std::uint64_t>(v)); }
    [[nodiscard]] std::uint64_t digest() const noexcept { return state_; }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::uint64_t fnv1a(std::string_view bytes) noexcept {
    Fnv1a h;
    h.update(bytes);
    return h.digest();
}

}  // namespace rwc
