#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "dtmb/hex.hpp"
#include "dtmb/rational.hpp"

namespace dtmb {

enum class Kind : std::uint8_t { Primary, Spare };
enum class Boundary : std::uint8_t { Open, Periodic };

/// One of the four interstitial-redundancy patterns: each non-boundary
/// primary cell adjoins `spares_per_primary` spares and each spare adjoins
/// `primaries_per_spare` primaries.
struct DTMBVariant {
    int spares_per_primary = 0;   // s
    int primaries_per_spare = 0;  // p_adj

    Rational nominal_rr() const { return {spares_per_primary, primaries_per_spare}; }
    std::string name() const;

    static DTMBVariant dtmb16() { return {1, 6}; }
    static DTMBVariant dtmb26() { return {2, 6}; }
    static DTMBVariant dtmb36() { return {3, 6}; }
    static DTMBVariant dtmb44() { return {4, 4}; }

    /// Accepts "DTMB(1,6)" etc. (case-insensitive, spaces ignored) and the
    /// shorthand "dtmb16". Throws Error on anything else.
    static DTMBVariant parse(const std::string& text);

    friend bool operator==(const DTMBVariant&, const DTMBVariant&) = default;
};

/// Region the layout lives on: a W x H parallelogram (q in [0,W), r in [0,H))
/// or an explicit cell list. Periodic boundaries wrap q mod W, r mod H and
/// therefore require the parallelogram shape.
struct RegionSpec {
    struct Parallelogram { int width = 0; int height = 0; };

    std::variant<Parallelogram, std::vector<HexCoord>> shape;
    Boundary boundary = Boundary::Open;

    static RegionSpec parallelogram(int width, int height, Boundary b) {
        return {Parallelogram{width, height}, b};
    }
    static RegionSpec explicit_cells(std::vector<HexCoord> cells) {
        return {std::move(cells), Boundary::Open};
    }
};

struct Cell {
    HexCoord coord;
    Kind kind = Kind::Primary;
    bool used = false;
};

/// Immutable hexagonal-array layout. Cells are kept in stable (r, q) order;
/// adjacency is precomputed at construction. Edits go through the with_*
/// helpers, which return a new layout.
class ArrayLayout {
public:
    /// Builds a layout from explicit cells. Checks coordinate uniqueness,
    /// n_primary >= 1, used => primary, and (periodic only) that the cells
    /// fill the W x H parallelogram exactly.
    static ArrayLayout from_cells(std::vector<Cell> cells, Boundary boundary,
                                  int width, int height,
                                  std::optional<DTMBVariant> variant = std::nullopt);

    std::size_t size() const { return cells_.size(); }
    std::size_t n_primary() const { return n_primary_; }
    std::size_t n_spare() const { return cells_.size() - n_primary_; }
    std::size_t n_used() const { return n_used_; }

    const Cell& cell(std::size_t i) const { return cells_[i]; }
    std::span<const Cell> cells() const { return cells_; }

    Boundary boundary() const { return boundary_; }
    int width() const { return width_; }
    int height() const { return height_; }
    const std::optional<DTMBVariant>& variant() const { return variant_; }

    bool contains(const HexCoord& c) const { return index_.count(c) != 0; }
    /// Index of `c` in stable order; throws Error for unknown coordinates.
    std::size_t index_of(const HexCoord& c) const;

    /// In-region neighbors of `c` (wrapped if periodic), as a set in stable
    /// order. Size <= 6; degree-6 everywhere when periodic with W,H >= 3.
    std::vector<HexCoord> neighbors(const HexCoord& c) const;
    std::span<const std::uint32_t> neighbor_indices(std::size_t i) const;

    ArrayLayout with_kind(const HexCoord& c, Kind kind) const;
    ArrayLayout with_used(const std::vector<HexCoord>& used_cells) const;

    /// FNV-1a over the canonical serialization; identifies the layout in
    /// fault maps and run configs.
    std::uint64_t hash() const { return hash_; }
    std::string hash_hex() const;

private:
    ArrayLayout() = default;
    void build_index();

    std::vector<Cell> cells_; // stable (r, q) order
    std::vector<std::uint32_t> neighbor_flat_;
    std::vector<std::uint32_t> neighbor_begin_; // size() + 1 offsets
    std::unordered_map<HexCoord, std::uint32_t, HexCoordHash> index_;
    Boundary boundary_ = Boundary::Open;
    int width_ = 0;
    int height_ = 0;
    std::optional<DTMBVariant> variant_;
    std::size_t n_primary_ = 0;
    std::size_t n_used_ = 0;
    std::uint64_t hash_ = 0;
};

/// Lays out `variant` over `region`: cells are classified primary/spare by
/// the variant's membership rule. Periodic regions must be dimension-
/// compatible with the pattern period or an Error names the requirement.
ArrayLayout generate_layout(const DTMBVariant& variant, const RegionSpec& region);

struct CellCheck {
    HexCoord coord;
    Kind kind = Kind::Primary;
    int relevant_neighbors = 0; // spare neighbors of a primary, primary neighbors of a spare
    bool interior = false;      // all six neighbors in-region
    bool violation = false;     // interior and count != the variant's target
};

struct ValidationReport {
    std::vector<CellCheck> cells; // stable order
    std::size_t violation_count = 0;
    std::size_t interior_count = 0;
    Rational measured_rr{0, 1};
    std::optional<DTMBVariant> variant;
};

/// Report-only structural check: per-cell adjacency counts, violations of
/// the variant's (s, p_adj) targets on interior cells, and measured RR.
/// Without a variant only the counts and RR are reported.
ValidationReport validate_layout(const ArrayLayout& layout);

/// n_spare / n_primary, exact. Throws if the layout has no primaries.
Rational redundancy_ratio(const ArrayLayout& layout);

} // namespace dtmb
