#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>

namespace laftr {

// 64-bit FNV-1a, used for config and parameter fingerprints.
class Fnv1a {
public:
    void update(const void* data, std::size_t size) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < size; ++i) {
            hash_ ^= bytes[i];
            hash_ *= 0x100000001b3ULL;
        }
    }
    void update(std::string_view text) { update(text.data(), text.size()); }
    void update(std::span<const double> values) {
        update(values.data(), values.size_bytes());
    }
    void update(std::uint64_t value) { update(&value, sizeof(value)); }

    std::uint64_t digest() const { return hash_; }

private:
    std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

inline std::string to_hex(std::uint64_t value) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kDigits[value & 0xF];
        value >>= 4;
    }
    return out;
}

inline std::string fingerprint_of(std::string_view text) {
    Fnv1a h;
    h.update(text);
    return to_hex(h.digest());
}

}  // namespace laftr
