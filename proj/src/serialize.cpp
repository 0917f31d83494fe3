#include "dtmb/serialize.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "dtmb/error.hpp"

namespace dtmb {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

double parse_double(const std::string& tok) {
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw Error(ErrorCode::InvalidArgument, "not a number: '" + tok + "'");
    return v;
}

int parse_int(const std::string& tok) {
    int v = 0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw Error(ErrorCode::InvalidArgument, "not an integer: '" + tok + "'");
    return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

[[noreturn]] void schema_fail(const std::string& what) {
    throw Error(ErrorCode::Schema, what);
}

const json& need(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) schema_fail(std::string("missing key '") + key + "'");
    return *it;
}

HexCoord coord_from_json(const json& obj) {
    if (!obj.is_object() || !need(obj, "q").is_number_integer() ||
        !need(obj, "r").is_number_integer())
        schema_fail("cell coordinate must be {\"q\": int, \"r\": int}");
    return {obj["q"].get<int>(), obj["r"].get<int>()};
}

ojson coord_to_json(const HexCoord& c) {
    ojson o;
    o["q"] = c.q;
    o["r"] = c.r;
    return o;
}

json parse_json(const std::string& text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) schema_fail("malformed JSON");
    return doc;
}

} // namespace

std::string fmt_double(double x) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return std::string(buf, ptr);
}

std::string layout_to_json(const ArrayLayout& layout) {
    ojson doc;
    if (layout.variant())
        doc["variant"] = layout.variant()->name();
    else
        doc["variant"] = nullptr;
    doc["boundary"] = layout.boundary() == Boundary::Periodic ? "periodic" : "open";
    doc["width"] = layout.width();
    doc["height"] = layout.height();
    ojson cells = ojson::array();
    for (const Cell& c : layout.cells()) {
        ojson o = coord_to_json(c.coord);
        o["kind"] = c.kind == Kind::Spare ? "spare" : "primary";
        o["used"] = c.used;
        cells.push_back(std::move(o));
    }
    doc["cells"] = std::move(cells);
    return doc.dump(2) + "\n";
}

ArrayLayout layout_from_json(const std::string& text) {
    json doc = parse_json(text);
    if (!doc.is_object()) schema_fail("layout must be a JSON object");

    std::optional<DTMBVariant> variant;
    const json& v = need(doc, "variant");
    if (v.is_string()) {
        try {
            variant = DTMBVariant::parse(v.get<std::string>());
        } catch (const Error& e) {
            schema_fail(e.what());
        }
    } else if (!v.is_null()) {
        schema_fail("'variant' must be a string or null");
    }

    const json& b = need(doc, "boundary");
    if (!b.is_string()) schema_fail("'boundary' must be a string");
    Boundary boundary;
    if (b == "open")
        boundary = Boundary::Open;
    else if (b == "periodic")
        boundary = Boundary::Periodic;
    else
        schema_fail("'boundary' must be \"open\" or \"periodic\"");

    if (!need(doc, "width").is_number_integer() || !need(doc, "height").is_number_integer())
        schema_fail("'width' and 'height' must be integers");
    int width = doc["width"].get<int>();
    int height = doc["height"].get<int>();

    const json& cell_arr = need(doc, "cells");
    if (!cell_arr.is_array() || cell_arr.empty()) schema_fail("'cells' must be a non-empty array");
    std::vector<Cell> cells;
    cells.reserve(cell_arr.size());
    for (const json& o : cell_arr) {
        Cell c;
        c.coord = coord_from_json(o);
        const json& kind = need(o, "kind");
        if (kind == "primary")
            c.kind = Kind::Primary;
        else if (kind == "spare")
            c.kind = Kind::Spare;
        else
            schema_fail("cell 'kind' must be \"primary\" or \"spare\"");
        if (auto it = o.find("used"); it != o.end()) {
            if (!it->is_boolean()) schema_fail("cell 'used' must be a boolean");
            c.used = it->get<bool>();
        }
        cells.push_back(c);
    }

    try {
        ArrayLayout layout =
            ArrayLayout::from_cells(std::move(cells), boundary, width, height, variant);
        if (layout.width() != width || layout.height() != height)
            schema_fail("'width'/'height' do not match the cell bounding box");
        return layout;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Schema) throw;
        schema_fail(e.what()); // duplicate cells, bad periodic fill, ...
    }
}

std::string faultmap_to_json(const FaultMap& faults, const ArrayLayout& layout) {
    if (faults.layout_hash() != layout.hash())
        throw Error(ErrorCode::Schema, "fault map belongs to a different layout");
    ojson doc;
    doc["layout_hash"] = layout.hash_hex();
    ojson arr = ojson::array();
    for (std::uint32_t i : faults.faulty_indices())
        arr.push_back(coord_to_json(layout.cell(i).coord));
    doc["faulty"] = std::move(arr);
    return doc.dump(2) + "\n";
}

FaultMap faultmap_from_json(const std::string& text, const ArrayLayout& layout) {
    json doc = parse_json(text);
    if (!doc.is_object()) schema_fail("fault map must be a JSON object");
    const json& h = need(doc, "layout_hash");
    if (!h.is_string()) schema_fail("'layout_hash' must be a string");
    if (h.get<std::string>() != layout.hash_hex())
        schema_fail("fault map layout_hash " + h.get<std::string>() +
                    " does not match layout " + layout.hash_hex());
    const json& arr = need(doc, "faulty");
    if (!arr.is_array()) schema_fail("'faulty' must be an array");
    std::vector<std::uint32_t> idx;
    idx.reserve(arr.size());
    for (const json& o : arr) {
        HexCoord c = coord_from_json(o);
        if (!layout.contains(c))
            schema_fail("faulty cell (" + std::to_string(c.q) + "," + std::to_string(c.r) +
                        ") is not in the layout");
        idx.push_back(static_cast<std::uint32_t>(layout.index_of(c)));
    }
    return FaultMap(layout, std::move(idx));
}

std::string plan_to_json(const RepairPlan& plan) {
    ojson doc;
    doc["verdict"] = plan.verdict == Verdict::Repairable ? "repairable" : "unrepairable";
    ojson arr = ojson::array();
    for (const auto& [from, to] : plan.assignment) {
        ojson o;
        o["from"] = coord_to_json(from);
        o["to"] = coord_to_json(to);
        arr.push_back(std::move(o));
    }
    doc["assignment"] = std::move(arr);
    if (plan.verdict == Verdict::Repairable) {
        doc["witness"] = nullptr;
    } else {
        ojson w = ojson::array();
        for (const HexCoord& c : plan.witness) w.push_back(coord_to_json(c));
        doc["witness"] = std::move(w);
    }
    return doc.dump(2) + "\n";
}

std::string validation_to_json(const ValidationReport& report, const ArrayLayout& layout) {
    ojson doc;
    if (report.variant)
        doc["variant"] = report.variant->name();
    else
        doc["variant"] = nullptr;
    doc["n_cells"] = layout.size();
    doc["n_primary"] = layout.n_primary();
    doc["n_spare"] = layout.n_spare();
    doc["interior_count"] = report.interior_count;
    doc["violation_count"] = report.violation_count;
    doc["ok"] = report.violation_count == 0;
    ojson rr;
    rr["num"] = report.measured_rr.num;
    rr["den"] = report.measured_rr.den;
    rr["value"] = report.measured_rr.value();
    doc["measured_rr"] = std::move(rr);
    ojson arr = ojson::array();
    for (const CellCheck& c : report.cells) {
        ojson o = coord_to_json(c.coord);
        o["kind"] = c.kind == Kind::Spare ? "spare" : "primary";
        o["relevant_neighbors"] = c.relevant_neighbors;
        o["interior"] = c.interior;
        o["violation"] = c.violation;
        arr.push_back(std::move(o));
    }
    doc["cells"] = std::move(arr);
    return doc.dump(2) + "\n";
}

std::string curve_to_csv(const Curve& curve) {
    std::string out = "p_or_m,runs,successes,yield,std_error,method\n";
    for (const CurvePoint& pt : curve) {
        out += fmt_double(pt.x);
        out += ',';
        out += std::to_string(pt.est.runs);
        out += ',';
        out += std::to_string(pt.est.successes);
        out += ',';
        out += fmt_double(pt.est.value);
        out += ',';
        out += fmt_double(pt.est.std_error);
        out += ',';
        out += method_name(pt.est.method);
        out += '\n';
    }
    return out;
}

namespace {

// Plot coordinates rounded so the SVG text is stable.
std::string svg_num(double v) {
    double r = std::round(v * 100.0) / 100.0;
    if (r == 0.0) r = 0.0; // never emit -0
    return fmt_double(r);
}

} // namespace

std::string curve_to_svg(const Curve& curve, const std::string& title,
                         const std::string& x_label) {
    constexpr double kW = 720, kH = 480, kL = 70, kR = 30, kT = 44, kB = 56;
    const double plot_w = kW - kL - kR;
    const double plot_h = kH - kT - kB;

    double x_min = 0.0, x_max = 1.0;
    if (!curve.empty()) {
        x_min = x_max = curve.front().x;
        for (const CurvePoint& pt : curve) {
            x_min = std::min(x_min, pt.x);
            x_max = std::max(x_max, pt.x);
        }
    }
    if (x_max - x_min < 1e-12) {
        x_min -= 0.5;
        x_max += 0.5;
    }
    auto sx = [&](double x) { return kL + (x - x_min) / (x_max - x_min) * plot_w; };
    auto sy = [&](double y) { return kT + (1.0 - y) * plot_h; };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
    s << "<rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n";
    s << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"monospace\" font-size=\"15\">"
      << title << "</text>\n";

    // frame + horizontal gridlines at 0, 0.25, ..., 1
    for (int i = 0; i <= 4; ++i) {
        double y = i * 0.25;
        s << "<line x1=\"" << svg_num(kL) << "\" y1=\"" << svg_num(sy(y)) << "\" x2=\""
          << svg_num(kL + plot_w) << "\" y2=\"" << svg_num(sy(y))
          << "\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";
        s << "<text x=\"" << svg_num(kL - 8) << "\" y=\"" << svg_num(sy(y) + 4)
          << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"12\">" << fmt_double(y)
          << "</text>\n";
    }
    s << "<rect x=\"" << svg_num(kL) << "\" y=\"" << svg_num(kT) << "\" width=\""
      << svg_num(plot_w) << "\" height=\"" << svg_num(plot_h)
      << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";

    // x-axis end labels + axis titles
    s << "<text x=\"" << svg_num(kL) << "\" y=\"" << svg_num(kH - kB + 18)
      << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\">"
      << fmt_double(x_min) << "</text>\n";
    s << "<text x=\"" << svg_num(kL + plot_w) << "\" y=\"" << svg_num(kH - kB + 18)
      << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\">"
      << fmt_double(x_max) << "</text>\n";
    s << "<text x=\"" << kW / 2 << "\" y=\"" << svg_num(kH - 14)
      << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"13\">" << x_label
      << "</text>\n";
    s << "<text x=\"18\" y=\"" << kH / 2
      << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"13\" "
         "transform=\"rotate(-90 18 "
      << kH / 2 << ")\">yield</text>\n";

    if (!curve.empty()) {
        // error bars first so the line sits on top
        for (const CurvePoint& pt : curve) {
            if (pt.est.std_error <= 0.0) continue;
            double lo = std::max(0.0, pt.est.value - pt.est.std_error);
            double hi = std::min(1.0, pt.est.value + pt.est.std_error);
            s << "<line x1=\"" << svg_num(sx(pt.x)) << "\" y1=\"" << svg_num(sy(lo)) << "\" x2=\""
              << svg_num(sx(pt.x)) << "\" y2=\"" << svg_num(sy(hi))
              << "\" stroke=\"#888888\" stroke-width=\"1\"/>\n";
        }
        s << "<polyline fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < curve.size(); ++i) {
            if (i) s << ' ';
            s << svg_num(sx(curve[i].x)) << ',' << svg_num(sy(curve[i].est.value));
        }
        s << "\"/>\n";
        for (const CurvePoint& pt : curve) {
            s << "<circle cx=\"" << svg_num(sx(pt.x)) << "\" cy=\"" << svg_num(sy(pt.est.value))
              << "\" r=\"2.5\" fill=\"#1f5fbf\"/>\n";
        }
    }
    s << "</svg>\n";
    return s.str();
}

namespace {

// "a:b:step" -> count; tolerant of the usual decimal-step rounding.
std::size_t range_count(double a, double b, double step) {
    if (step <= 0.0) throw Error(ErrorCode::InvalidArgument, "grid step must be positive");
    if (b < a) throw Error(ErrorCode::InvalidArgument, "grid stop below start");
    double n = std::floor((b - a) / step + 1e-6) + 1.0;
    if (n > 1e6) throw Error(ErrorCode::InvalidArgument, "grid has too many points");
    return static_cast<std::size_t>(n);
}

} // namespace

std::vector<double> parse_p_grid(const std::string& text) {
    if (text.find(':') != std::string::npos) {
        auto parts = split(text, ':');
        if (parts.size() != 3)
            throw Error(ErrorCode::InvalidArgument, "range grid must be start:stop:step");
        double a = parse_double(parts[0]);
        double b = parse_double(parts[1]);
        double step = parse_double(parts[2]);
        std::size_t n = range_count(a, b, step);
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = a + static_cast<double>(i) * step;
        return out;
    }
    std::vector<double> out;
    for (const std::string& tok : split(text, ',')) out.push_back(parse_double(tok));
    if (out.empty()) throw Error(ErrorCode::InvalidArgument, "empty grid");
    return out;
}

std::vector<int> parse_m_grid(const std::string& text) {
    if (text.find(':') != std::string::npos) {
        auto parts = split(text, ':');
        if (parts.size() != 3)
            throw Error(ErrorCode::InvalidArgument, "range grid must be start:stop:step");
        int a = parse_int(parts[0]);
        int b = parse_int(parts[1]);
        int step = parse_int(parts[2]);
        if (step <= 0) throw Error(ErrorCode::InvalidArgument, "grid step must be positive");
        if (b < a) throw Error(ErrorCode::InvalidArgument, "grid stop below start");
        std::vector<int> out;
        for (int m = a; m <= b; m += step) out.push_back(m);
        return out;
    }
    std::vector<int> out;
    for (const std::string& tok : split(text, ',')) out.push_back(parse_int(tok));
    if (out.empty()) throw Error(ErrorCode::InvalidArgument, "empty grid");
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path + " for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw Error(ErrorCode::Io, "read error on " + path);
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out.good()) throw Error(ErrorCode::Io, "write error on " + path);
}

} // namespace dtmb
