#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>

namespace dtmb {

/// Axial coordinate on the triangular lattice. Two cells are adjacent iff
/// their offset is one of the six below; a cell is never adjacent to itself.
struct HexCoord {
    int q = 0;
    int r = 0;

    friend bool operator==(const HexCoord&, const HexCoord&) = default;
};

/// Stable cell order: lexicographic by (r, then q). Used everywhere an
/// ordering matters (serialization, shuffles, matching tie-breaks).
inline bool stable_less(const HexCoord& a, const HexCoord& b) {
    return a.r != b.r ? a.r < b.r : a.q < b.q;
}

/// The six neighbor offsets, listed in stable order.
inline constexpr std::array<HexCoord, 6> kHexOffsets = {{
    {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1},
}};

struct HexCoordHash {
    std::size_t operator()(const HexCoord& c) const noexcept {
        // 2D -> 1D mix; splitmix-style finalizer
        std::uint64_t z = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.q)) << 32) |
                          static_cast<std::uint32_t>(c.r);
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        return static_cast<std::size_t>(z ^ (z >> 31));
    }
};

} // namespace dtmb
