#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace mmwoz {

/// Streaming FNV-1a (64-bit). Fields are separated with a unit-separator byte
/// so ("ab","c") and ("a","bc") hash differently.
class StableHasher {
public:
    StableHasher& bytes(std::string_view s) {
        for (unsigned char c : s) {
            state_ ^= c;
            state_ *= 0x100000001b3ULL;
        }
        return *this;
    }
    StableHasher& field(std::string_view s) {
        bytes(s);
        return bytes(std::string_view("\x1f", 1));
    }
    StableHasher& field(std::uint64_t v) { return field(std::to_string(v)); }
    StableHasher& field(std::int64_t v) { return field(std::to_string(v)); }
    StableHasher& field(int v) { return field(std::to_string(v)); }

    [[nodiscard]] std::uint64_t raw() const { return state_; }
    /// FNV state passed through the splitmix64 finalizer for better low-bit mixing.
    [[nodiscard]] std::uint64_t digest() const;

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Counter-based generator: deterministic on every platform, unlike the
/// standard distributions.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return splitmix64(state_);
    }
    /// Uniform integer in [lo, hi] (inclusive). Modulo bias is irrelevant at these ranges.
    int uniform(int lo, int hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo + 1);
        return lo + static_cast<int>(next() % span);
    }

private:
    std::uint64_t state_;
};

std::string to_hex64(std::uint64_t v);
std::uint64_t parse_hex64(std::string_view s);
/// Uppercase base-36 rendering, no padding.
std::string to_base36(std::uint64_t v);

}  // namespace mmwoz
