#pragma once

#include <cstdint>
#include <limits>
#include <span>

namespace rifs {

/// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Seed of the child at `rank` below a node whose seed is `parent_seed`.
constexpr std::uint64_t child_seed(std::uint64_t parent_seed, std::uint32_t rank) noexcept {
    return mix64(parent_seed + 0x9e3779b97f4a7c15ull * (std::uint64_t{rank} + 1));
}

/// Counter-based seed for the node reached from the root by `path` (sibling
/// ranks). Pure; derive(s, p + [r]) == child_seed(derive(s, p), r).
std::uint64_t derive_node_seed(std::uint64_t master_seed, std::span<const std::uint32_t> path) noexcept;

/// SplitMix64 stream. Satisfies UniformRandomBitGenerator; all real-valued
/// draws are produced here so results are bit-identical across standard
/// libraries.
class Rng {
  public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept { return mix64(state_ += 0x9e3779b97f4a7c15ull); }

    /// Uniform on the open interval (0, 1).
    double uniform_open() noexcept {
        return (static_cast<double>((*this)() >> 12) + 0.5) * 0x1.0p-52;
    }

    /// Uniform on [0, 1).
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n), n > 0. Lemire's multiply-shift with rejection.
    std::uint64_t below(std::uint64_t n) noexcept;

  private:
    std::uint64_t state_;
};

} // namespace rifs
