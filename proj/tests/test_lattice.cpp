#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "dtmb/error.hpp"
#include "dtmb/layout.hpp"

using namespace dtmb;

namespace {

ArrayLayout periodic(DTMBVariant v, int w, int h) {
    return generate_layout(v, RegionSpec::parallelogram(w, h, Boundary::Periodic));
}

ArrayLayout open_box(DTMBVariant v, int w, int h) {
    return generate_layout(v, RegionSpec::parallelogram(w, h, Boundary::Open));
}

template <class F>
bool error_mentions(F&& f, const std::string& needle) {
    try {
        f();
    } catch (const Error& e) {
        return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
}

} // namespace

TEST_CASE("hex offsets are the six axial directions") {
    std::set<std::pair<int, int>> got;
    for (const HexCoord& o : kHexOffsets) got.insert({o.q, o.r});
    const std::set<std::pair<int, int>> want{{0, -1}, {1, -1}, {-1, 0},
                                             {1, 0},  {-1, 1}, {0, 1}};
    CHECK(got == want);
}

TEST_CASE("corner of an open parallelogram has exactly two neighbors") {
    const ArrayLayout l = open_box(DTMBVariant::dtmb26(), 5, 5);
    const auto nb = l.neighbors({0, 0});
    REQUIRE(nb.size() == 2);
    CHECK(nb[0] == HexCoord{1, 0});
    CHECK(nb[1] == HexCoord{0, 1});
}

TEST_CASE("interior cell has all six offset neighbors") {
    const ArrayLayout l = open_box(DTMBVariant::dtmb26(), 5, 5);
    const auto nb = l.neighbors({2, 2});
    REQUIRE(nb.size() == 6);
    for (const HexCoord& o : kHexOffsets)
        CHECK(std::count(nb.begin(), nb.end(), HexCoord{2 + o.q, 2 + o.r}) == 1);
}

TEST_CASE("periodic wrap restores degree six everywhere") {
    const ArrayLayout l = periodic(DTMBVariant::dtmb16(), 7, 7);
    for (const Cell& c : l.cells()) CHECK(l.neighbors(c.coord).size() == 6);
}

TEST_CASE("adjacency is symmetric and irreflexive") {
    for (const ArrayLayout& l :
         {open_box(DTMBVariant::dtmb36(), 6, 5), periodic(DTMBVariant::dtmb44(), 4, 6)}) {
        for (std::size_t i = 0; i < l.size(); ++i) {
            for (std::uint32_t j : l.neighbor_indices(i)) {
                CHECK(j != i);
                const auto back = l.neighbor_indices(j);
                CHECK(std::count(back.begin(), back.end(), i) == 1);
            }
        }
    }
}

TEST_CASE("cells are kept in stable (r, q) order and index_of round-trips") {
    const ArrayLayout l = open_box(DTMBVariant::dtmb16(), 6, 4);
    for (std::size_t i = 1; i < l.size(); ++i) {
        const HexCoord a = l.cell(i - 1).coord, b = l.cell(i).coord;
        CHECK((a.r < b.r || (a.r == b.r && a.q < b.q)));
    }
    for (std::size_t i = 0; i < l.size(); ++i) CHECK(l.index_of(l.cell(i).coord) == i);
    CHECK_THROWS_AS((void)l.index_of({99, 99}), Error);
}

TEST_CASE("DTMB(1,6) periodic 14x14 counts and ratio") {
    const ArrayLayout l = periodic(DTMBVariant::dtmb16(), 14, 14);
    CHECK(l.size() == 196);
    CHECK(l.n_spare() == 28);
    CHECK(l.n_primary() == 168);
    const Rational rr = redundancy_ratio(l);
    CHECK(rr.num == 1);
    CHECK(rr.den == 6);
}

TEST_CASE("DTMB(3,6) periodic 3x3 counts and ratio") {
    const ArrayLayout l = periodic(DTMBVariant::dtmb36(), 3, 3);
    CHECK(l.n_spare() == 3);
    CHECK(l.n_primary() == 6);
    CHECK(redundancy_ratio(l).value() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("DTMB(4,4) periodic 2x2 counts and ratio") {
    const ArrayLayout l = periodic(DTMBVariant::dtmb44(), 2, 2);
    CHECK(l.n_spare() == 2);
    CHECK(l.n_primary() == 2);
    CHECK(redundancy_ratio(l).num == 1);
    CHECK(redundancy_ratio(l).den == 1);
    // tiny wrap: adjacency counts (per offset) still match the variant
    CHECK(validate_layout(l).violation_count == 0);
}

TEST_CASE("periodic redundancy ratios are exact for all four variants") {
    CHECK(redundancy_ratio(periodic(DTMBVariant::dtmb16(), 7, 14)) == Rational{1, 6});
    CHECK(redundancy_ratio(periodic(DTMBVariant::dtmb26(), 12, 12)) == Rational{1, 3});
    CHECK(redundancy_ratio(periodic(DTMBVariant::dtmb36(), 12, 12)) == Rational{1, 2});
    CHECK(redundancy_ratio(periodic(DTMBVariant::dtmb44(), 14, 14)) == Rational{1, 1});
}

TEST_CASE("every generated periodic layout validates cleanly") {
    const ArrayLayout layouts[] = {
        periodic(DTMBVariant::dtmb16(), 7, 7), periodic(DTMBVariant::dtmb26(), 4, 6),
        periodic(DTMBVariant::dtmb36(), 6, 3), periodic(DTMBVariant::dtmb44(), 2, 4)};
    for (const ArrayLayout& l : layouts) {
        const ValidationReport rep = validate_layout(l);
        CHECK(rep.violation_count == 0);
        CHECK(rep.interior_count == l.size());
        for (const CellCheck& c : rep.cells) {
            const int want = c.kind == Kind::Primary ? l.variant()->spares_per_primary
                                                     : l.variant()->primaries_per_spare;
            CHECK(c.relevant_neighbors == want);
        }
    }
}

TEST_CASE("open generated layouts have no interior violations") {
    const ArrayLayout layouts[] = {
        open_box(DTMBVariant::dtmb16(), 30, 30), open_box(DTMBVariant::dtmb26(), 30, 30),
        open_box(DTMBVariant::dtmb36(), 30, 30), open_box(DTMBVariant::dtmb44(), 30, 30)};
    for (const ArrayLayout& l : layouts) {
        const ValidationReport rep = validate_layout(l);
        CHECK(rep.violation_count == 0);
        CHECK(rep.interior_count == 28u * 28u);
    }
}

TEST_CASE("open 30x30 ratios are within 0.02 of the nominal values") {
    const DTMBVariant vs[] = {DTMBVariant::dtmb16(), DTMBVariant::dtmb26(),
                              DTMBVariant::dtmb36(), DTMBVariant::dtmb44()};
    for (const DTMBVariant& v : vs) {
        const double measured = redundancy_ratio(open_box(v, 30, 30)).value();
        CHECK(std::abs(measured - v.nominal_rr().value()) <= 0.02);
    }
}

TEST_CASE("open-region ratio converges monotonically to nominal") {
    const DTMBVariant vs[] = {DTMBVariant::dtmb16(), DTMBVariant::dtmb26(),
                              DTMBVariant::dtmb36(), DTMBVariant::dtmb44()};
    for (const DTMBVariant& v : vs) {
        double prev = 1e9;
        for (int L : {7, 14, 28, 56}) {
            const double err =
                std::abs(redundancy_ratio(open_box(v, L, L)).value() - v.nominal_rr().value());
            CHECK(err <= prev + 1e-12);
            prev = err;
        }
        CHECK(prev <= 0.02);
    }
}

TEST_CASE("periodic dimensions must match the pattern period") {
    CHECK(error_mentions([] { periodic(DTMBVariant::dtmb16(), 8, 7); }, "7"));
    CHECK_THROWS_AS(periodic(DTMBVariant::dtmb26(), 5, 4), Error);
    CHECK(error_mentions([] { periodic(DTMBVariant::dtmb36(), 4, 3); }, "3"));
    CHECK_THROWS_AS(periodic(DTMBVariant::dtmb44(), 4, 5), Error);
}

TEST_CASE("spares form an independent set except in DTMB(4,4)") {
    for (const DTMBVariant& v :
         {DTMBVariant::dtmb16(), DTMBVariant::dtmb26(), DTMBVariant::dtmb36()}) {
        const ArrayLayout l = v == DTMBVariant::dtmb16() ? periodic(v, 7, 7)
                                                         : periodic(v, 6, 6);
        for (std::size_t i = 0; i < l.size(); ++i) {
            if (l.cell(i).kind != Kind::Spare) continue;
            for (std::uint32_t j : l.neighbor_indices(i))
                CHECK(l.cell(j).kind == Kind::Primary);
        }
    }
    const ArrayLayout l44 = periodic(DTMBVariant::dtmb44(), 6, 6);
    for (std::size_t i = 0; i < l44.size(); ++i) {
        if (l44.cell(i).kind != Kind::Spare) continue;
        int spare_neighbors = 0;
        for (std::uint32_t j : l44.neighbor_indices(i))
            if (l44.cell(j).kind == Kind::Spare) ++spare_neighbors;
        CHECK(spare_neighbors == 2);
    }
}

TEST_CASE("flipping a spare to primary flags its former dependents") {
    const ArrayLayout base = periodic(DTMBVariant::dtmb16(), 14, 14);
    const HexCoord spare{0, 0};
    REQUIRE(base.cell(base.index_of(spare)).kind == Kind::Spare);
    const ArrayLayout broken = base.with_kind(spare, Kind::Primary);
    const ValidationReport rep = validate_layout(broken);
    // six former dependents now have zero spare neighbors, and the flipped
    // cell itself is a primary with no spare neighbor
    CHECK(rep.violation_count == 7);
    for (const HexCoord& o : kHexOffsets) {
        const HexCoord nb{(o.q + 14) % 14, (o.r + 14) % 14};
        const CellCheck& chk = rep.cells[broken.index_of(nb)];
        CHECK(chk.violation);
        CHECK(chk.relevant_neighbors == 0);
    }
}

TEST_CASE("from_cells rejects duplicates, empty primaries, used spares") {
    std::vector<Cell> dup{{{0, 0}, Kind::Primary, false}, {{0, 0}, Kind::Spare, false}};
    CHECK_THROWS_AS(ArrayLayout::from_cells(dup, Boundary::Open, 0, 0), Error);

    std::vector<Cell> all_spare{{{0, 0}, Kind::Spare, false}, {{1, 0}, Kind::Spare, false}};
    CHECK_THROWS_AS(ArrayLayout::from_cells(all_spare, Boundary::Open, 0, 0), Error);

    std::vector<Cell> used_spare{{{0, 0}, Kind::Primary, false}, {{1, 0}, Kind::Spare, true}};
    CHECK_THROWS_AS(ArrayLayout::from_cells(used_spare, Boundary::Open, 0, 0), Error);
}

TEST_CASE("with_used marks primaries and rejects spares") {
    const ArrayLayout l = open_box(DTMBVariant::dtmb26(), 4, 4);
    const HexCoord prim{1, 0}, spare{0, 0};
    REQUIRE(l.cell(l.index_of(spare)).kind == Kind::Spare);
    const ArrayLayout used = l.with_used({prim});
    CHECK(used.n_used() == 1);
    CHECK(used.cell(used.index_of(prim)).used);
    CHECK_THROWS_AS((void)l.with_used({spare}), Error);
}

TEST_CASE("layout hash identifies content") {
    const ArrayLayout a = open_box(DTMBVariant::dtmb26(), 6, 6);
    const ArrayLayout b = open_box(DTMBVariant::dtmb26(), 6, 6);
    CHECK(a.hash() == b.hash());
    CHECK(a.hash_hex().size() == 16);
    CHECK(a.with_kind({1, 0}, Kind::Spare).hash() != a.hash());
    CHECK(a.with_used({{1, 0}}).hash() != a.hash());
    CHECK(periodic(DTMBVariant::dtmb26(), 6, 6).hash() != a.hash());
}

TEST_CASE("explicit cell regions get a bounding box and open adjacency") {
    const ArrayLayout l = generate_layout(
        DTMBVariant::dtmb16(),
        RegionSpec::explicit_cells({{0, 0}, {1, 0}, {0, 1}, {-1, 0}, {0, -1}, {1, -1}, {-1, 1}}));
    CHECK(l.size() == 7);
    CHECK(l.n_spare() == 1); // (0,0) satisfies the mod-7 rule
    CHECK(l.neighbors({0, 0}).size() == 6);
    CHECK(l.width() == 3);
    CHECK(l.height() == 3);
}

TEST_CASE("variant parsing accepts both spellings") {
    CHECK(DTMBVariant::parse("DTMB(2,6)") == DTMBVariant::dtmb26());
    CHECK(DTMBVariant::parse("dtmb26") == DTMBVariant::dtmb26());
    CHECK(DTMBVariant::parse("dtmb44").name() == "DTMB(4,4)");
    CHECK_THROWS_AS(DTMBVariant::parse("dtmb99"), Error);
}

TEST_CASE("zero spares give a zero redundancy ratio") {
    std::vector<Cell> cells{{{0, 0}, Kind::Primary, false}, {{1, 0}, Kind::Primary, false}};
    const ArrayLayout l = ArrayLayout::from_cells(cells, Boundary::Open, 0, 0);
    CHECK(redundancy_ratio(l).num == 0);
    CHECK(redundancy_ratio(l).value() == 0.0);
}
