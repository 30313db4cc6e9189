#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace cradle {

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

// xoshiro256** seeded through splitmix64. One instance is the single random
// stream of a session; every consumer draws from it in a fixed order.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0) noexcept;

    std::uint64_t next() noexcept;
    std::uint64_t operator()() noexcept { return next(); }

    // Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound) noexcept;

    // Uniform double in [0, 1) with 53 bits of precision.
    double uniform() noexcept;
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    static constexpr std::uint64_t min() noexcept { return 0; }
    static constexpr std::uint64_t max() noexcept { return ~std::uint64_t{0}; }

    const std::array<std::uint64_t, 4>& state() const noexcept { return s_; }
    std::string state_hex() const;

    bool operator==(const Rng&) const = default;

private:
    std::array<std::uint64_t, 4> s_{};
};

// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

}  // namespace cradle
