#include "dtmb/layout.hpp"

#include <algorithm>
#include <cctype>

#include "dtmb/error.hpp"

namespace dtmb {
namespace {

int floor_mod(int x, int m) {
    const int r = x % m;
    return r < 0 ? r + m : r;
}

bool is_spare(const DTMBVariant& v, const HexCoord& c) {
    // Membership rules; each reproduces the variant's adjacency counts on
    // interior cells and the nominal redundancy ratio.
    if (v == DTMBVariant::dtmb16()) return floor_mod(c.q + 3 * c.r, 7) == 0;
    if (v == DTMBVariant::dtmb26()) return floor_mod(c.q, 2) == 0 && floor_mod(c.r, 2) == 0;
    if (v == DTMBVariant::dtmb36()) return floor_mod(c.q - c.r, 3) == 0;
    return floor_mod(c.r, 2) == 1; // DTMB(4,4)
}

// Smallest (wp, hp) such that the membership rule is invariant under
// q -> q + k*wp and r -> r + k*hp.
std::pair<int, int> pattern_period(const DTMBVariant& v) {
    if (v == DTMBVariant::dtmb16()) return {7, 7};
    if (v == DTMBVariant::dtmb36()) return {3, 3};
    return {2, 2}; // DTMB(2,6), DTMB(4,4)
}

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t fnv1a_str(std::uint64_t h, const std::string& s) {
    return fnv1a(h, s.data(), s.size());
}

} // namespace

std::string DTMBVariant::name() const {
    return "DTMB(" + std::to_string(spares_per_primary) + "," +
           std::to_string(primaries_per_spare) + ")";
}

DTMBVariant DTMBVariant::parse(const std::string& text) {
    std::string t;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch)))
            t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    for (const DTMBVariant& v : {dtmb16(), dtmb26(), dtmb36(), dtmb44()}) {
        const std::string s = std::to_string(v.spares_per_primary);
        const std::string p = std::to_string(v.primaries_per_spare);
        if (t == "dtmb(" + s + "," + p + ")" || t == "dtmb" + s + p) return v;
    }
    throw Error(ErrorCode::InvalidArgument,
                "unknown variant '" + text +
                    "' (expected DTMB(1,6), DTMB(2,6), DTMB(3,6) or DTMB(4,4))");
}

ArrayLayout ArrayLayout::from_cells(std::vector<Cell> cells, Boundary boundary,
                                    int width, int height,
                                    std::optional<DTMBVariant> variant) {
    if (cells.empty()) throw Error(ErrorCode::Schema, "layout has no cells");
    std::sort(cells.begin(), cells.end(),
              [](const Cell& a, const Cell& b) { return stable_less(a.coord, b.coord); });
    for (std::size_t i = 1; i < cells.size(); ++i)
        if (cells[i].coord == cells[i - 1].coord)
            throw Error(ErrorCode::Schema, "duplicate cell (" + std::to_string(cells[i].coord.q) +
                                               "," + std::to_string(cells[i].coord.r) + ")");

    if (boundary == Boundary::Periodic) {
        if (width < 1 || height < 1)
            throw Error(ErrorCode::Schema, "periodic layout needs positive width and height");
        if (cells.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
            throw Error(ErrorCode::Schema, "periodic layout cells must fill the region exactly");
        for (const Cell& c : cells)
            if (c.coord.q < 0 || c.coord.q >= width || c.coord.r < 0 || c.coord.r >= height)
                throw Error(ErrorCode::Schema, "periodic layout cell outside [0,W)x[0,H)");
    }

    ArrayLayout layout;
    layout.cells_ = std::move(cells);
    layout.boundary_ = boundary;
    layout.variant_ = variant;
    if (boundary == Boundary::Periodic) {
        layout.width_ = width;
        layout.height_ = height;
    } else {
        // Open regions: width/height are the bounding-box extents.
        int qmin = layout.cells_.front().coord.q, qmax = qmin;
        int rmin = layout.cells_.front().coord.r, rmax = rmin;
        for (const Cell& c : layout.cells_) {
            qmin = std::min(qmin, c.coord.q);
            qmax = std::max(qmax, c.coord.q);
            rmin = std::min(rmin, c.coord.r);
            rmax = std::max(rmax, c.coord.r);
        }
        layout.width_ = qmax - qmin + 1;
        layout.height_ = rmax - rmin + 1;
    }
    layout.build_index();

    if (layout.n_primary_ == 0) throw Error(ErrorCode::Schema, "layout has no primary cells");
    for (const Cell& c : layout.cells_)
        if (c.used && c.kind != Kind::Primary)
            throw Error(ErrorCode::Schema, "used flag set on a spare cell");
    return layout;
}

void ArrayLayout::build_index() {
    index_.clear();
    index_.reserve(cells_.size());
    n_primary_ = 0;
    n_used_ = 0;
    for (std::uint32_t i = 0; i < cells_.size(); ++i) {
        index_.emplace(cells_[i].coord, i);
        if (cells_[i].kind == Kind::Primary) ++n_primary_;
        if (cells_[i].used) ++n_used_;
    }

    neighbor_begin_.assign(cells_.size() + 1, 0);
    neighbor_flat_.clear();
    neighbor_flat_.reserve(cells_.size() * 6);
    std::vector<std::uint32_t> nbr;
    for (std::uint32_t i = 0; i < cells_.size(); ++i) {
        nbr.clear();
        for (const HexCoord& off : kHexOffsets) {
            HexCoord t{cells_[i].coord.q + off.q, cells_[i].coord.r + off.r};
            if (boundary_ == Boundary::Periodic) {
                t.q = floor_mod(t.q, width_);
                t.r = floor_mod(t.r, height_);
            }
            if (t == cells_[i].coord) continue; // tiny periodic wrap
            const auto it = index_.find(t);
            if (it != index_.end()) nbr.push_back(it->second);
        }
        std::sort(nbr.begin(), nbr.end());
        nbr.erase(std::unique(nbr.begin(), nbr.end()), nbr.end());
        neighbor_flat_.insert(neighbor_flat_.end(), nbr.begin(), nbr.end());
        neighbor_begin_[i + 1] = static_cast<std::uint32_t>(neighbor_flat_.size());
    }

    // Canonical bytes: header, then every cell in stable order.
    std::uint64_t h = 0xcbf29ce484222325ull;
    h = fnv1a_str(h, "dtmb-layout/1|");
    h = fnv1a_str(h, boundary_ == Boundary::Periodic ? "periodic|" : "open|");
    h = fnv1a_str(h, std::to_string(width_) + "x" + std::to_string(height_) + "|");
    h = fnv1a_str(h, variant_ ? variant_->name() : std::string("-"));
    for (const Cell& c : cells_) {
        h = fnv1a_str(h, ";" + std::to_string(c.coord.q) + "," + std::to_string(c.coord.r));
        h = fnv1a_str(h, c.kind == Kind::Spare ? ",s" : ",p");
        h = fnv1a_str(h, c.used ? ",1" : ",0");
    }
    hash_ = h;
}

std::size_t ArrayLayout::index_of(const HexCoord& c) const {
    const auto it = index_.find(c);
    if (it == index_.end())
        throw Error(ErrorCode::InvalidArgument, "unknown coordinate (" + std::to_string(c.q) +
                                                    "," + std::to_string(c.r) + ")");
    return it->second;
}

std::vector<HexCoord> ArrayLayout::neighbors(const HexCoord& c) const {
    std::vector<HexCoord> out;
    for (std::uint32_t j : neighbor_indices(index_of(c))) out.push_back(cells_[j].coord);
    return out;
}

std::span<const std::uint32_t> ArrayLayout::neighbor_indices(std::size_t i) const {
    return {neighbor_flat_.data() + neighbor_begin_[i],
            neighbor_flat_.data() + neighbor_begin_[i + 1]};
}

ArrayLayout ArrayLayout::with_kind(const HexCoord& c, Kind kind) const {
    std::vector<Cell> cells(cells_.begin(), cells_.end());
    Cell& cell = cells[index_of(c)];
    cell.kind = kind;
    if (kind == Kind::Spare) cell.used = false;
    return from_cells(std::move(cells), boundary_, width_, height_, variant_);
}

ArrayLayout ArrayLayout::with_used(const std::vector<HexCoord>& used_cells) const {
    std::vector<Cell> cells(cells_.begin(), cells_.end());
    for (Cell& c : cells) c.used = false;
    for (const HexCoord& u : used_cells) {
        Cell& cell = cells[index_of(u)];
        if (cell.kind != Kind::Primary)
            throw Error(ErrorCode::InvalidArgument, "used cell (" + std::to_string(u.q) + "," +
                                                        std::to_string(u.r) + ") is not primary");
        cell.used = true;
    }
    return from_cells(std::move(cells), boundary_, width_, height_, variant_);
}

std::string ArrayLayout::hash_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    std::uint64_t h = hash_;
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return s;
}

ArrayLayout generate_layout(const DTMBVariant& variant, const RegionSpec& region) {
    std::vector<HexCoord> coords;
    int width = 0, height = 0;

    if (const auto* para = std::get_if<RegionSpec::Parallelogram>(&region.shape)) {
        width = para->width;
        height = para->height;
        if (width < 1 || height < 1)
            throw Error(ErrorCode::InvalidArgument, "region dimensions must be positive");
        if (region.boundary == Boundary::Periodic) {
            const auto [wp, hp] = pattern_period(variant);
            if (width % wp != 0 || height % hp != 0)
                throw Error(ErrorCode::InvalidArgument,
                            "periodic " + variant.name() + " regions need width divisible by " +
                                std::to_string(wp) + " and height divisible by " +
                                std::to_string(hp));
        }
        coords.reserve(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
        for (int r = 0; r < height; ++r)
            for (int q = 0; q < width; ++q) coords.push_back({q, r});
    } else {
        if (region.boundary == Boundary::Periodic)
            throw Error(ErrorCode::InvalidArgument,
                        "periodic boundaries require a parallelogram region");
        coords = std::get<std::vector<HexCoord>>(region.shape);
        if (coords.empty()) throw Error(ErrorCode::InvalidArgument, "region has no cells");
    }

    std::vector<Cell> cells;
    cells.reserve(coords.size());
    for (const HexCoord& c : coords)
        cells.push_back({c, is_spare(variant, c) ? Kind::Spare : Kind::Primary, false});
    return ArrayLayout::from_cells(std::move(cells), region.boundary, width, height, variant);
}

ValidationReport validate_layout(const ArrayLayout& layout) {
    ValidationReport report;
    report.variant = layout.variant();
    report.cells.reserve(layout.size());

    // Counts are taken per offset direction, so on tiny periodic regions a
    // cell reached through two different wrapped offsets counts twice: that
    // is the adjacency the wrap actually creates, and it keeps the
    // generator contract (zero violations) exact at every legal size.
    for (std::size_t i = 0; i < layout.size(); ++i) {
        const Cell& cell = layout.cell(i);
        CellCheck check;
        check.coord = cell.coord;
        check.kind = cell.kind;
        const Kind wanted = cell.kind == Kind::Primary ? Kind::Spare : Kind::Primary;
        int degree = 0;
        for (const HexCoord& off : kHexOffsets) {
            HexCoord t{cell.coord.q + off.q, cell.coord.r + off.r};
            if (layout.boundary() == Boundary::Periodic) {
                t.q = floor_mod(t.q, layout.width());
                t.r = floor_mod(t.r, layout.height());
            }
            if (t == cell.coord || !layout.contains(t)) continue;
            ++degree;
            if (layout.cell(layout.index_of(t)).kind == wanted) ++check.relevant_neighbors;
        }
        check.interior = layout.boundary() == Boundary::Periodic || degree == 6;
        if (check.interior) ++report.interior_count;
        if (check.interior && layout.variant()) {
            const int target = cell.kind == Kind::Primary
                                   ? layout.variant()->spares_per_primary
                                   : layout.variant()->primaries_per_spare;
            check.violation = check.relevant_neighbors != target;
        }
        if (check.violation) ++report.violation_count;
        report.cells.push_back(check);
    }
    report.measured_rr = redundancy_ratio(layout);
    return report;
}

Rational redundancy_ratio(const ArrayLayout& layout) {
    if (layout.n_primary() == 0)
        throw Error(ErrorCode::InvalidArgument, "redundancy ratio undefined without primaries");
    return {static_cast<std::int64_t>(layout.n_spare()),
            static_cast<std::int64_t>(layout.n_primary())};
}

} // namespace dtmb
