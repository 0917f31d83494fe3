#include <doctest.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dtmb/error.hpp"
#include "dtmb/faults.hpp"
#include "dtmb/reconfig.hpp"
#include "dtmb/serialize.hpp"

using namespace dtmb;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    throw std::logic_error("expected a dtmb::Error");
}

std::size_t count_sub(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t at = hay.find(needle); at != std::string::npos;
         at = hay.find(needle, at + needle.size()))
        ++n;
    return n;
}

} // namespace

TEST_CASE("fmt_double round-trips doubles exactly") {
    const auto parse_back = [](const std::string& s) {
        double v = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), v);
        return v;
    };
    for (double x : {0.0, 1.0, 0.1, 0.3378, 1.0 / 3.0, 0.999, 5e-324, 1e308}) {
        CHECK(parse_back(fmt_double(x)) == x);
        CHECK(parse_back(fmt_double(-x)) == -x);
    }
    CHECK(fmt_double(0.5) == "0.5");
    CHECK(fmt_double(1.0) == "1");
}

TEST_CASE("layout JSON round-trips every flavor") {
    const ArrayLayout layouts[] = {
        generate_layout(DTMBVariant::dtmb16(),
                        RegionSpec::parallelogram(7, 7, Boundary::Periodic)),
        generate_layout(DTMBVariant::dtmb26(),
                        RegionSpec::parallelogram(5, 4, Boundary::Open)),
        generate_layout(DTMBVariant::dtmb36(),
                        RegionSpec::parallelogram(6, 3, Boundary::Periodic)),
        generate_layout(DTMBVariant::dtmb44(),
                        RegionSpec::parallelogram(4, 4, Boundary::Periodic)),
        generate_layout(DTMBVariant::dtmb26(),
                        RegionSpec::parallelogram(6, 6, Boundary::Open))
            .with_used({{1, 0}, {3, 0}, {1, 1}}),
    };
    for (const ArrayLayout& l : layouts) {
        const ArrayLayout back = layout_from_json(layout_to_json(l));
        CHECK(back.hash() == l.hash());
        CHECK(back.size() == l.size());
        CHECK(back.n_used() == l.n_used());
        CHECK(back.variant() == l.variant());
        CHECK(back.width() == l.width());
        // serialization is canonical: emit(parse(emit)) == emit
        CHECK(layout_to_json(back) == layout_to_json(l));
    }
}

TEST_CASE("layout JSON round-trips a null variant") {
    std::vector<Cell> cells{{{0, 0}, Kind::Primary, false}, {{1, 0}, Kind::Spare, false}};
    const ArrayLayout l = ArrayLayout::from_cells(cells, Boundary::Open, 0, 0);
    const std::string text = layout_to_json(l);
    CHECK(text.find("\"variant\": null") != std::string::npos);
    CHECK(layout_from_json(text).hash() == l.hash());
}

TEST_CASE("layout JSON schema violations are rejected") {
    const std::string good = layout_to_json(generate_layout(
        DTMBVariant::dtmb26(), RegionSpec::parallelogram(4, 4, Boundary::Open)));

    auto expect_schema = [](std::string broken) {
        CHECK(code_of([&] { (void)layout_from_json(broken); }) == ErrorCode::Schema);
    };

    expect_schema("{not json");
    expect_schema("[1,2,3]");
    expect_schema("{}");

    std::string t = good;
    t.replace(t.find("\"boundary\""), 10, "\"bounceary\"");
    expect_schema(t);

    t = good;
    t.replace(t.find("\"primary\""), 9, "\"primal\"");
    expect_schema(t);

    t = good;
    t.replace(t.find("\"width\": 4"), 10, "\"width\": 9");
    expect_schema(t);

    t = good;
    t.replace(t.find("\"q\": 1"), 6, "\"q\": 0"); // duplicates (0, 0)
    expect_schema(t);

    t = good;
    t.replace(t.find("\"q\": 1"), 6, "\"q\": 1.5");
    expect_schema(t);
}

TEST_CASE("fault map JSON round-trips and is layout-checked") {
    const ArrayLayout l = generate_layout(DTMBVariant::dtmb26(),
                                          RegionSpec::parallelogram(5, 4, Boundary::Open));
    const FaultMap fm = inject_bernoulli(l, 0.7, {3, 1});
    const std::string text = faultmap_to_json(fm, l);
    const FaultMap back = faultmap_from_json(text, l);
    CHECK(back == fm);

    const ArrayLayout other = generate_layout(DTMBVariant::dtmb26(),
                                              RegionSpec::parallelogram(4, 4, Boundary::Open));
    CHECK(code_of([&] { (void)faultmap_from_json(text, other); }) == ErrorCode::Schema);

    // a fault at a coordinate the layout does not have
    const std::string hash_line = "\"layout_hash\": \"" + l.hash_hex() + "\"";
    REQUIRE(text.find(hash_line) != std::string::npos);
    std::string bad = "{" + hash_line + ", \"faulty\": [{\"q\": 99, \"r\": 99}]}";
    CHECK(code_of([&] { (void)faultmap_from_json(bad, l); }) == ErrorCode::Schema);

    const FaultMap empty = faultmap_from_json(
        "{" + hash_line + ", \"faulty\": []}", l);
    CHECK(empty.count() == 0);
}

TEST_CASE("repair plan JSON distinguishes the verdicts") {
    const ArrayLayout l = generate_layout(DTMBVariant::dtmb16(),
                                          RegionSpec::parallelogram(7, 7, Boundary::Periodic));
    const auto at = [&](std::vector<HexCoord> cs) {
        std::vector<std::uint32_t> idx;
        for (const HexCoord& c : cs) idx.push_back(static_cast<std::uint32_t>(l.index_of(c)));
        return FaultMap(l, idx);
    };

    const std::string ok = plan_to_json(plan_repair(l, at({{1, 0}})));
    CHECK(ok.find("\"verdict\": \"repairable\"") != std::string::npos);
    CHECK(ok.find("\"witness\": null") != std::string::npos);
    CHECK(ok.find("\"from\"") != std::string::npos);

    const std::string bad = plan_to_json(plan_repair(l, at({{1, 0}, {0, 1}})));
    CHECK(bad.find("\"verdict\": \"unrepairable\"") != std::string::npos);
    CHECK(bad.find("\"witness\": [") != std::string::npos);
}

TEST_CASE("validation JSON carries counts and the measured ratio") {
    const ArrayLayout l = generate_layout(DTMBVariant::dtmb26(),
                                          RegionSpec::parallelogram(6, 6, Boundary::Periodic));
    const std::string text = validation_to_json(validate_layout(l), l);
    CHECK(text.find("\"ok\": true") != std::string::npos);
    CHECK(text.find("\"violation_count\": 0") != std::string::npos);
    CHECK(text.find("\"n_cells\": 36") != std::string::npos);
    CHECK(text.find("\"num\": 1") != std::string::npos);
    CHECK(text.find("\"den\": 3") != std::string::npos);
    CHECK(count_sub(text, "\"relevant_neighbors\"") == 36);
}

TEST_CASE("curve CSV has the documented header and one row per point") {
    Curve curve;
    YieldEstimate mc;
    mc.method = YieldMethod::MonteCarlo;
    mc.runs = 100;
    mc.successes = 85;
    mc.value = 0.85;
    mc.std_error = std::sqrt(0.85 * 0.15 / 100.0);
    curve.push_back({0.9, mc});
    YieldEstimate an;
    an.method = YieldMethod::Analytic;
    an.value = 0.5;
    curve.push_back({0.95, an});

    const std::string csv = curve_to_csv(curve);
    REQUIRE(csv.rfind("p_or_m,runs,successes,yield,std_error,method\n", 0) == 0);
    CHECK(count_sub(csv, "\n") == 3);
    CHECK(csv.find("0.9,100,85,0.85,") != std::string::npos);
    CHECK(csv.find(",monte-carlo\n") != std::string::npos);
    CHECK(csv.find("0.95,0,0,0.5,0,analytic\n") != std::string::npos);
}

TEST_CASE("curve SVG is a plot with one marker per point") {
    Curve curve;
    for (int i = 0; i <= 4; ++i) {
        YieldEstimate e;
        e.method = YieldMethod::MonteCarlo;
        e.runs = 50;
        e.successes = static_cast<std::uint64_t>(50 - 10 * i);
        e.value = 1.0 - 0.2 * i;
        e.std_error = 0.02;
        curve.push_back({static_cast<double>(i), e});
    }
    const std::string svg = curve_to_svg(curve, "tolerance", "faults m");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(count_sub(svg, "<circle") == 5);
    CHECK(svg.find("tolerance") != std::string::npos);
    CHECK(svg.find("faults m") != std::string::npos);
    CHECK(svg == curve_to_svg(curve, "tolerance", "faults m"));

    const std::string empty = curve_to_svg({}, "t", "x");
    CHECK(empty.rfind("<svg", 0) == 0);
    CHECK(count_sub(empty, "<circle") == 0);
}

TEST_CASE("p-grid parsing") {
    const std::vector<double> r = parse_p_grid("0.9:0.99:0.01");
    REQUIRE(r.size() == 10);
    CHECK(r.front() == 0.9);
    CHECK(r.back() == doctest::Approx(0.99).epsilon(1e-12));

    const std::vector<double> fine = parse_p_grid("0.90:0.999:0.001");
    REQUIRE(fine.size() == 100);
    CHECK(fine.back() == doctest::Approx(0.999).epsilon(1e-9));

    CHECK(parse_p_grid("0.95") == std::vector<double>{0.95});
    CHECK(parse_p_grid("0.5, 0.7, 0.9").size() == 3);
    CHECK(parse_p_grid(" 0.5 ,0.7 ").size() == 2);

    CHECK(code_of([] { (void)parse_p_grid("0.9:0.5:0.01"); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { (void)parse_p_grid("0.9:0.99:0"); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { (void)parse_p_grid("0.9:0.99:-0.1"); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { (void)parse_p_grid("zero"); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { (void)parse_p_grid(""); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { (void)parse_p_grid("0.5;0.7"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("m-grid parsing") {
    const std::vector<int> r = parse_m_grid("0:50:5");
    REQUIRE(r.size() == 11);
    CHECK(r.front() == 0);
    CHECK(r.back() == 50);
    CHECK(parse_m_grid("35") == std::vector<int>{35});
    CHECK(parse_m_grid("1,2,3") == std::vector<int>{1, 2, 3});
    CHECK(code_of([] { (void)parse_m_grid("3.5"); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { (void)parse_m_grid("10:0:5"); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { (void)parse_m_grid("0:10:0"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("file IO errors carry the Io code") {
    CHECK(code_of([] { (void)read_file("/nonexistent/nope.json"); }) == ErrorCode::Io);
    CHECK(code_of([] { write_file("/nonexistent/nope.json", "x"); }) == ErrorCode::Io);

    const std::string path = "/tmp/dtmb_test_io.txt";
    write_file(path, "hello\n");
    CHECK(read_file(path) == "hello\n");
    std::remove(path.c_str());
}
