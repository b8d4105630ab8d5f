#include "rifs/random.hpp"

namespace rifs {

namespace {
__extension__ using u128 = unsigned __int128;
}

std::uint64_t derive_node_seed(std::uint64_t master_seed, std::span<const std::uint32_t> path) noexcept {
    std::uint64_t seed = mix64(master_seed ^ 0x6a09e667f3bcc909ull);
    for (auto rank : path) {
        seed = child_seed(seed, rank);
    }
    return seed;
}

std::uint64_t Rng::below(std::uint64_t n) noexcept {
    auto wide = static_cast<u128>((*this)()) * n;
    auto low = static_cast<std::uint64_t>(wide);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            wide = static_cast<u128>((*this)()) * n;
            low = static_cast<std::uint64_t>(wide);
        }
    }
    return static_cast<std::uint64_t>(wide >> 64);
}

} // namespace rifs
