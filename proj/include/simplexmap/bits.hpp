#pragma once

// Bit-level integer helpers: exact log2 / power-of-two arithmetic on which
// every map's level computation relies, 128-bit checked multiplication, and
// small deterministic hashing/PRNG primitives used for reproducible reports.

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace simplexmap {

using u8 = std::uint8_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

// floor(log2 v) as 63 - clz(v); the log itself is branch-free.
inline int floor_log2(u64 v) {
    if (v == 0) throw std::invalid_argument("floor_log2: v must be >= 1");
    return 63 - std::countl_zero(v);
}

// 2^floor(log2 v): largest power of two <= v.
inline u64 pow2_floor_log2(u64 v) {
    return u64{1} << floor_log2(v);
}

inline int ceil_log2(u64 v) {
    if (v == 0) throw std::invalid_argument("ceil_log2: v must be >= 1");
    return v == 1 ? 0 : floor_log2(v - 1) + 1;
}

// 2^ceil(log2 v): smallest power of two >= v.
inline u64 pow2_ceil_log2(u64 v) {
    return u64{1} << ceil_log2(v);
}

inline bool is_pow2(u64 v) {
    return v != 0 && (v & (v - 1)) == 0;
}

inline u128 checked_mul(u128 a, u128 b) {
    u128 r;
    if (__builtin_mul_overflow(a, b, &r))
        throw std::overflow_error("128-bit multiply overflow");
    return r;
}

inline u128 checked_add(u128 a, u128 b) {
    u128 r;
    if (__builtin_add_overflow(a, b, &r))
        throw std::overflow_error("128-bit add overflow");
    return r;
}

// base^exp with overflow checking.
inline u128 checked_pow(u128 base, unsigned exp) {
    u128 r = 1;
    while (exp--) r = checked_mul(r, base);
    return r;
}

inline std::string u128_to_string(u128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v != 0) {
        s.insert(s.begin(), char('0' + int(v % 10)));
        v /= 10;
    }
    return s;
}

inline std::string i128_to_string(i128 v) {
    if (v < 0) return "-" + u128_to_string(u128(-v));
    return u128_to_string(u128(v));
}

// splitmix64: tiny seedable generator with a portable, platform-stable
// output sequence (std::mt19937 + distributions are not bit-stable targets).
inline u64 splitmix64(u64& state) {
    u64 z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Value in [0, 1) from the top 53 bits of a draw.
inline double splitmix64_unit(u64& state) {
    return double(splitmix64(state) >> 11) * 0x1.0p-53;
}

constexpr u64 fnv1a_seed = 0xcbf29ce484222325ull;

inline u64 fnv1a_append(u64 h, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline u64 fnv1a_append_u64(u64 h, u64 v) {
    return fnv1a_append(h, &v, sizeof v);
}

} // namespace simplexmap
