// dtmb — command-line front end for the microfluidic-array simulator.
//
// Subcommands: generate, validate, inject, repair, yield-sweep,
// mfault-curve, effective-yield, casestudy. Every run echoes its resolved
// configuration and writes it next to the primary output as
// <out>.config.json; re-running with the same config and seed reproduces
// every output byte for byte (--jobs never changes results, only wall time).
//
// Exit codes: 0 ok, 2 bad usage/arguments, 3 schema violation,
// 4 enumeration bound exceeded, 5 I/O failure.

#include <cstdint>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dtmb/casestudy.hpp"
#include "dtmb/error.hpp"
#include "dtmb/faults.hpp"
#include "dtmb/layout.hpp"
#include "dtmb/reconfig.hpp"
#include "dtmb/serialize.hpp"
#include "dtmb/yield.hpp"

namespace {

using dtmb::Error;
using dtmb::ErrorCode;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

int exit_code(ErrorCode c) {
    switch (c) {
        case ErrorCode::InvalidArgument: return 2;
        case ErrorCode::Schema: return 3;
        case ErrorCode::BoundExceeded: return 4;
        case ErrorCode::Io: return 5;
    }
    return 1;
}

const char* code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::InvalidArgument: return "invalid-argument";
        case ErrorCode::Schema: return "schema";
        case ErrorCode::BoundExceeded: return "bound-exceeded";
        case ErrorCode::Io: return "io";
    }
    return "error";
}

void print_error(const std::string& code, const std::string& message) {
    ojson e;
    e["error"]["code"] = code;
    e["error"]["message"] = message;
    std::cerr << e.dump() << std::endl;
}

[[noreturn]] void usage_fail(const std::string& msg) {
    throw Error(ErrorCode::InvalidArgument, msg);
}

dtmb::Scope parse_scope(const std::string& s) {
    if (s == "all" || s == "all-primaries") return dtmb::Scope::AllPrimaries;
    if (s == "used" || s == "used-only") return dtmb::Scope::UsedOnly;
    usage_fail("scope must be all-primaries or used-only, got '" + s + "'");
}

const char* scope_name(dtmb::Scope s) {
    return s == dtmb::Scope::UsedOnly ? "used-only" : "all-primaries";
}

dtmb::Boundary parse_boundary(const std::string& s) {
    if (s == "open") return dtmb::Boundary::Open;
    if (s == "periodic") return dtmb::Boundary::Periodic;
    usage_fail("boundary must be open or periodic, got '" + s + "'");
}

// Applies a JSON config file on top of parsed flags (file wins). Keys are
// the long option names without dashes; unknown keys are schema errors.
class Overrides {
public:
    Overrides(const std::string& path, const std::string& command) {
        if (path.empty()) return;
        json doc = json::parse(dtmb::read_file(path), nullptr, false);
        if (doc.is_discarded() || !doc.is_object())
            throw Error(ErrorCode::Schema, "config file must be a JSON object");
        cfg_ = std::move(doc);
        if (auto it = cfg_.find("command"); it != cfg_.end()) {
            if (!it->is_string() || it->get<std::string>() != command)
                throw Error(ErrorCode::Schema,
                            "config 'command' does not match subcommand '" + command + "'");
            used_.insert("command");
        }
    }

    void str(const char* key, std::string& var) {
        if (const json* v = get(key)) {
            if (!v->is_string()) type_fail(key, "a string");
            var = v->get<std::string>();
        }
    }
    void u64(const char* key, std::uint64_t& var) {
        if (const json* v = get(key)) {
            if (!v->is_number_integer() || v->is_number_float() || v->get<std::int64_t>() < 0)
                type_fail(key, "a nonnegative integer");
            var = v->get<std::uint64_t>();
        }
    }
    void i32(const char* key, int& var) {
        if (const json* v = get(key)) {
            if (!v->is_number_integer()) type_fail(key, "an integer");
            var = v->get<int>();
        }
    }
    void dbl(const char* key, double& var, bool* present = nullptr) {
        if (const json* v = get(key)) {
            if (!v->is_number()) type_fail(key, "a number");
            var = v->get<double>();
            if (present) *present = true;
        }
    }
    void boolean(const char* key, bool& var) {
        if (const json* v = get(key)) {
            if (!v->is_boolean()) type_fail(key, "a boolean");
            var = v->get<bool>();
        }
    }

    void done() const {
        for (auto it = cfg_.begin(); it != cfg_.end(); ++it)
            if (!used_.count(it.key()))
                throw Error(ErrorCode::Schema, "unknown config key '" + it.key() + "'");
    }

private:
    const json* get(const char* key) {
        auto it = cfg_.find(key);
        if (it == cfg_.end()) return nullptr;
        used_.insert(key);
        return &*it;
    }
    [[noreturn]] static void type_fail(const char* key, const char* want) {
        throw Error(ErrorCode::Schema, std::string("config key '") + key + "' must be " + want);
    }

    json cfg_ = json::object();
    std::set<std::string> used_;
};

// Resolved-config echo: printed to stdout and written as <out>.config.json.
// Excludes --jobs on purpose, so runs differing only in parallelism share
// identical outputs and sidecars.
void emit_config(const ojson& rc, const std::string& out_path) {
    std::string text = rc.dump(2) + "\n";
    std::cout << text;
    dtmb::write_file(out_path + ".config.json", text);
}

dtmb::ArrayLayout load_layout(const std::string& path) {
    if (path.empty()) usage_fail("missing --layout");
    return dtmb::layout_from_json(dtmb::read_file(path));
}

// Shared option state; CLI11 binds references, the config file then
// overrides, and each run_* validates what it actually needs.
struct Opts {
    std::string config;
    std::uint64_t seed = 1;
    unsigned jobs = 1;

    std::string variant;
    int width = 0;
    int height = 0;
    std::string boundary = "open";
    std::string layout;
    std::string faults;
    std::string out;
    std::string plot;
    std::string layout_out;
    std::string scope = "all-primaries";
    std::string grid;
    std::string mfault;
    std::string analytic;
    std::string method = "mc";
    double p = 0.0;
    bool has_p = false;
    int m = -1;
    std::uint64_t trial = 0;
    std::uint64_t runs = 10000;
    std::uint64_t n = 0;
    bool exact = false;
};

void require_out(const Opts& o) {
    if (o.out.empty()) usage_fail("missing --out");
}

void maybe_plot(const Opts& o, const dtmb::Curve& curve, const std::string& title,
                const std::string& x_label) {
    if (!o.plot.empty()) dtmb::write_file(o.plot, dtmb::curve_to_svg(curve, title, x_label));
}

int run_generate(Opts& o) {
    Overrides cfg(o.config, "generate");
    cfg.str("variant", o.variant);
    cfg.i32("width", o.width);
    cfg.i32("height", o.height);
    cfg.str("boundary", o.boundary);
    cfg.str("out", o.out);
    cfg.done();

    if (o.variant.empty()) usage_fail("missing --variant");
    if (o.width <= 0 || o.height <= 0) usage_fail("missing or nonpositive --width/--height");
    require_out(o);

    dtmb::DTMBVariant variant = dtmb::DTMBVariant::parse(o.variant);
    dtmb::RegionSpec region =
        dtmb::RegionSpec::parallelogram(o.width, o.height, parse_boundary(o.boundary));
    dtmb::ArrayLayout layout = dtmb::generate_layout(variant, region);
    dtmb::write_file(o.out, dtmb::layout_to_json(layout));

    ojson rc;
    rc["command"] = "generate";
    rc["variant"] = variant.name();
    rc["width"] = o.width;
    rc["height"] = o.height;
    rc["boundary"] = o.boundary;
    rc["out"] = o.out;
    emit_config(rc, o.out);
    return 0;
}

int run_validate(Opts& o) {
    Overrides cfg(o.config, "validate");
    cfg.str("layout", o.layout);
    cfg.str("out", o.out);
    cfg.done();
    require_out(o);

    dtmb::ArrayLayout layout = load_layout(o.layout);
    dtmb::ValidationReport report = dtmb::validate_layout(layout);
    dtmb::write_file(o.out, dtmb::validation_to_json(report, layout));

    ojson rc;
    rc["command"] = "validate";
    rc["layout"] = o.layout;
    rc["out"] = o.out;
    emit_config(rc, o.out);
    return 0;
}

int run_inject(Opts& o) {
    Overrides cfg(o.config, "inject");
    cfg.str("layout", o.layout);
    cfg.dbl("p", o.p, &o.has_p);
    cfg.i32("m", o.m);
    cfg.u64("trial", o.trial);
    cfg.u64("seed", o.seed);
    cfg.str("out", o.out);
    cfg.done();
    require_out(o);

    bool has_m = o.m >= 0;
    if (o.has_p == has_m) usage_fail("exactly one of --p and --m is required");

    dtmb::ArrayLayout layout = load_layout(o.layout);
    dtmb::Seed seed{o.seed, o.trial};
    dtmb::FaultMap faults = o.has_p
                                ? dtmb::inject_bernoulli(layout, o.p, seed)
                                : dtmb::inject_exact(layout, static_cast<std::size_t>(o.m), seed);
    dtmb::write_file(o.out, dtmb::faultmap_to_json(faults, layout));

    ojson rc;
    rc["command"] = "inject";
    rc["layout"] = o.layout;
    if (o.has_p)
        rc["p"] = o.p;
    else
        rc["m"] = o.m;
    rc["trial"] = o.trial;
    rc["master_seed"] = o.seed;
    rc["out"] = o.out;
    emit_config(rc, o.out);
    return 0;
}

int run_repair(Opts& o) {
    Overrides cfg(o.config, "repair");
    cfg.str("layout", o.layout);
    cfg.str("faults", o.faults);
    cfg.str("scope", o.scope);
    cfg.str("out", o.out);
    cfg.done();
    require_out(o);
    if (o.faults.empty()) usage_fail("missing --faults");

    dtmb::ArrayLayout layout = load_layout(o.layout);
    dtmb::FaultMap faults = dtmb::faultmap_from_json(dtmb::read_file(o.faults), layout);
    dtmb::RepairPlan plan = dtmb::plan_repair(layout, faults, parse_scope(o.scope));
    dtmb::write_file(o.out, dtmb::plan_to_json(plan));

    ojson rc;
    rc["command"] = "repair";
    rc["layout"] = o.layout;
    rc["faults"] = o.faults;
    rc["scope"] = scope_name(parse_scope(o.scope));
    rc["out"] = o.out;
    emit_config(rc, o.out);
    return 0;
}

int run_yield_sweep(Opts& o) {
    Overrides cfg(o.config, "yield-sweep");
    cfg.str("layout", o.layout);
    cfg.str("analytic", o.analytic);
    cfg.u64("n", o.n);
    cfg.str("grid", o.grid);
    cfg.u64("runs", o.runs);
    cfg.boolean("exact", o.exact);
    cfg.str("scope", o.scope);
    cfg.u64("seed", o.seed);
    cfg.str("out", o.out);
    cfg.str("plot", o.plot);
    cfg.done();
    require_out(o);
    if (o.grid.empty()) usage_fail("missing --grid");

    std::vector<double> grid = dtmb::parse_p_grid(o.grid);
    dtmb::Curve curve;
    ojson rc;
    rc["command"] = "yield-sweep";

    if (!o.analytic.empty()) {
        if (o.n == 0) usage_fail("--analytic requires --n");
        if (o.analytic == "none") {
            curve = dtmb::yield_sweep_no_redundancy(grid, o.n);
        } else {
            dtmb::DTMBVariant v = dtmb::DTMBVariant::parse(o.analytic);
            if (!(v == dtmb::DTMBVariant::dtmb16()))
                usage_fail("closed-form sweep supports only DTMB(1,6) or 'none'");
            curve = dtmb::yield_sweep_dtmb16(grid, o.n);
        }
        rc["analytic"] = o.analytic;
        rc["n"] = o.n;
    } else {
        dtmb::ArrayLayout layout = load_layout(o.layout);
        dtmb::Scope scope = parse_scope(o.scope);
        if (o.exact) {
            for (double p : grid)
                curve.push_back({p, dtmb::exact_yield(layout, p, scope)});
        } else {
            curve = dtmb::yield_sweep_mc(layout, grid, o.runs, o.seed, scope, o.jobs);
            rc["runs"] = o.runs;
            rc["master_seed"] = o.seed;
        }
        rc["layout"] = o.layout;
        rc["exact"] = o.exact;
        rc["scope"] = scope_name(scope);
    }
    rc["grid"] = o.grid;
    rc["out"] = o.out;
    if (!o.plot.empty()) rc["plot"] = o.plot;

    dtmb::write_file(o.out, dtmb::curve_to_csv(curve));
    maybe_plot(o, curve, "yield vs survival probability", "p");
    emit_config(rc, o.out);
    return 0;
}

int run_mfault_curve(Opts& o) {
    Overrides cfg(o.config, "mfault-curve");
    cfg.str("layout", o.layout);
    cfg.str("mfault", o.mfault);
    cfg.u64("runs", o.runs);
    cfg.str("scope", o.scope);
    cfg.u64("seed", o.seed);
    cfg.str("out", o.out);
    cfg.str("plot", o.plot);
    cfg.done();
    require_out(o);
    if (o.mfault.empty()) usage_fail("missing --mfault");

    std::vector<int> grid = dtmb::parse_m_grid(o.mfault);
    dtmb::ArrayLayout layout = load_layout(o.layout);
    dtmb::Scope scope = parse_scope(o.scope);
    dtmb::Curve curve = dtmb::mfault_curve(layout, grid, o.runs, o.seed, scope, o.jobs);

    dtmb::write_file(o.out, dtmb::curve_to_csv(curve));
    maybe_plot(o, curve, "yield vs fault count", "m");

    ojson rc;
    rc["command"] = "mfault-curve";
    rc["layout"] = o.layout;
    rc["mfault"] = o.mfault;
    rc["runs"] = o.runs;
    rc["scope"] = scope_name(scope);
    rc["master_seed"] = o.seed;
    rc["out"] = o.out;
    if (!o.plot.empty()) rc["plot"] = o.plot;
    emit_config(rc, o.out);
    return 0;
}

int run_effective_yield(Opts& o) {
    Overrides cfg(o.config, "effective-yield");
    cfg.str("layout", o.layout);
    cfg.dbl("p", o.p, &o.has_p);
    cfg.str("method", o.method);
    cfg.u64("runs", o.runs);
    cfg.str("scope", o.scope);
    cfg.u64("seed", o.seed);
    cfg.str("out", o.out);
    cfg.done();
    require_out(o);
    if (!o.has_p) usage_fail("missing --p");

    dtmb::ArrayLayout layout = load_layout(o.layout);
    dtmb::Scope scope = parse_scope(o.scope);
    dtmb::YieldEstimate y;
    if (o.method == "mc") {
        y = dtmb::mc_yield(layout, o.p, o.runs, o.seed, scope, o.jobs);
    } else if (o.method == "exact") {
        y = dtmb::exact_yield(layout, o.p, scope);
    } else if (o.method == "analytic") {
        if (!(layout.variant() && *layout.variant() == dtmb::DTMBVariant::dtmb16()))
            usage_fail("--method analytic requires a DTMB(1,6) layout");
        y = dtmb::analytic_yield_dtmb16(o.p, layout.n_primary());
    } else {
        usage_fail("method must be mc, exact, or analytic");
    }
    dtmb::EffectiveYield ey = dtmb::effective_yield(y, layout);

    ojson doc;
    doc["p"] = o.p;
    doc["method"] = dtmb::method_name(y.method);
    doc["yield"] = y.value;
    doc["runs"] = y.runs;
    doc["successes"] = y.successes;
    doc["std_error"] = y.std_error;
    doc["n_primary"] = layout.n_primary();
    doc["n_spare"] = layout.n_spare();
    doc["n_cells"] = layout.size();
    doc["rr"]["num"] = ey.rr_input.num;
    doc["rr"]["den"] = ey.rr_input.den;
    doc["rr"]["value"] = ey.rr_input.value();
    doc["effective_yield"] = ey.value;
    dtmb::write_file(o.out, doc.dump(2) + "\n");

    ojson rc;
    rc["command"] = "effective-yield";
    rc["layout"] = o.layout;
    rc["p"] = o.p;
    rc["method"] = o.method;
    if (o.method == "mc") {
        rc["runs"] = o.runs;
        rc["master_seed"] = o.seed;
    }
    rc["scope"] = scope_name(scope);
    rc["out"] = o.out;
    emit_config(rc, o.out);
    return 0;
}

int run_casestudy(Opts& o) {
    Overrides cfg(o.config, "casestudy");
    cfg.str("mfault", o.mfault);
    cfg.u64("runs", o.runs);
    cfg.str("scope", o.scope);
    cfg.u64("seed", o.seed);
    cfg.str("out", o.out);
    cfg.str("plot", o.plot);
    cfg.str("layout-out", o.layout_out);
    cfg.done();
    require_out(o);

    std::vector<int> grid = dtmb::parse_m_grid(o.mfault.empty() ? "0:50:5" : o.mfault);
    dtmb::Scope scope = parse_scope(o.scope);
    dtmb::Curve curve = dtmb::casestudy_mfault_curve(grid, o.runs, o.seed, scope, o.jobs);

    dtmb::write_file(o.out, dtmb::curve_to_csv(curve));
    maybe_plot(o, curve, "case study: yield vs fault count", "m");
    if (!o.layout_out.empty())
        dtmb::write_file(o.layout_out, dtmb::layout_to_json(dtmb::build_invitro_layout()));

    ojson rc;
    rc["command"] = "casestudy";
    rc["mfault"] = o.mfault.empty() ? "0:50:5" : o.mfault;
    rc["runs"] = o.runs;
    rc["scope"] = scope_name(scope);
    rc["master_seed"] = o.seed;
    rc["out"] = o.out;
    if (!o.plot.empty()) rc["plot"] = o.plot;
    if (!o.layout_out.empty()) rc["layout-out"] = o.layout_out;
    emit_config(rc, o.out);
    return 0;
}

void add_common(CLI::App* cmd, Opts& o) {
    cmd->add_option("--config", o.config, "JSON config file; overrides flags on conflict");
    cmd->add_option("--seed", o.seed, "master seed (default from DTMB_SEED, else 1)")
        ->envname("DTMB_SEED");
    cmd->add_option("--jobs", o.jobs, "worker threads for Monte Carlo (never affects results)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"defect-tolerant microfluidic biochip array simulator"};
    app.require_subcommand(1);
    Opts o;

    CLI::App* generate = app.add_subcommand("generate", "generate a DTMB layout");
    generate->add_option("--variant", o.variant, "dtmb16|dtmb26|dtmb36|dtmb44");
    generate->add_option("--width", o.width, "parallelogram width");
    generate->add_option("--height", o.height, "parallelogram height");
    generate->add_option("--boundary", o.boundary, "open|periodic (default open)");
    generate->add_option("--out", o.out, "layout JSON path");
    add_common(generate, o);

    CLI::App* validate = app.add_subcommand("validate", "check adjacency counts of a layout");
    validate->add_option("--layout", o.layout, "layout JSON path");
    validate->add_option("--out", o.out, "validation report JSON path");
    add_common(validate, o);

    CLI::App* inject = app.add_subcommand("inject", "draw a seeded fault map");
    inject->add_option("--layout", o.layout, "layout JSON path");
    inject->add_option("--p", o.p, "per-cell survival probability (Bernoulli mode)")
        ->check(CLI::Range(0.0, 1.0));
    inject->add_option("--m", o.m, "exact fault count (exactly-m mode)");
    inject->add_option("--trial", o.trial, "trial index (substream selector, default 0)");
    inject->add_option("--out", o.out, "fault map JSON path");
    add_common(inject, o);

    CLI::App* repair = app.add_subcommand("repair", "plan a repair for a fault map");
    repair->add_option("--layout", o.layout, "layout JSON path");
    repair->add_option("--faults", o.faults, "fault map JSON path");
    repair->add_option("--scope", o.scope, "all-primaries|used-only (default all-primaries)");
    repair->add_option("--out", o.out, "repair plan JSON path");
    add_common(repair, o);

    CLI::App* sweep = app.add_subcommand("yield-sweep", "yield over a survival-probability grid");
    sweep->add_option("--layout", o.layout, "layout JSON path (MC and exact modes)");
    sweep->add_option("--analytic", o.analytic,
                      "closed-form sweep: dtmb16 or none (no layout needed)");
    sweep->add_option("--n", o.n, "primary-cell count for --analytic");
    sweep->add_option("--grid", o.grid, "p grid: value, comma list, or start:stop:step");
    sweep->add_option("--runs", o.runs, "Monte Carlo trials per point (default 10000)");
    sweep->add_flag("--exact", o.exact, "exhaustive enumeration per point (N <= 24)");
    sweep->add_option("--scope", o.scope, "all-primaries|used-only");
    sweep->add_option("--out", o.out, "curve CSV path");
    sweep->add_option("--plot", o.plot, "optional SVG path");
    add_common(sweep, o);

    CLI::App* mcurve = app.add_subcommand("mfault-curve", "yield over an exact-fault-count grid");
    mcurve->add_option("--layout", o.layout, "layout JSON path");
    mcurve->add_option("--mfault", o.mfault, "m grid: value, comma list, or start:stop:step");
    mcurve->add_option("--runs", o.runs, "Monte Carlo trials per point (default 10000)");
    mcurve->add_option("--scope", o.scope, "all-primaries|used-only");
    mcurve->add_option("--out", o.out, "curve CSV path");
    mcurve->add_option("--plot", o.plot, "optional SVG path");
    add_common(mcurve, o);

    CLI::App* ey = app.add_subcommand("effective-yield", "yield discounted by spare area");
    ey->add_option("--layout", o.layout, "layout JSON path");
    ey->add_option("--p", o.p, "survival probability")->check(CLI::Range(0.0, 1.0));
    ey->add_option("--method", o.method, "mc|exact|analytic (default mc)");
    ey->add_option("--runs", o.runs, "Monte Carlo trials (default 10000)");
    ey->add_option("--scope", o.scope, "all-primaries|used-only");
    ey->add_option("--out", o.out, "result JSON path");
    add_common(ey, o);

    CLI::App* cs = app.add_subcommand("casestudy", "m-fault curve on the 252/91/108 chip");
    cs->add_option("--mfault", o.mfault, "m grid (default 0:50:5)");
    cs->add_option("--runs", o.runs, "Monte Carlo trials per point (default 10000)");
    cs->add_option("--scope", o.scope, "all-primaries|used-only");
    cs->add_option("--out", o.out, "curve CSV path");
    cs->add_option("--plot", o.plot, "optional SVG path");
    cs->add_option("--layout-out", o.layout_out, "also write the reconstructed layout JSON");
    add_common(cs, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error("usage", e.what());
        return 2;
    }

    o.has_p = inject->count("--p") > 0 || ey->count("--p") > 0;

    try {
        if (generate->parsed()) return run_generate(o);
        if (validate->parsed()) return run_validate(o);
        if (inject->parsed()) return run_inject(o);
        if (repair->parsed()) return run_repair(o);
        if (sweep->parsed()) return run_yield_sweep(o);
        if (mcurve->parsed()) return run_mfault_curve(o);
        if (ey->parsed()) return run_effective_yield(o);
        if (cs->parsed()) return run_casestudy(o);
    } catch (const Error& e) {
        print_error(code_name(e.code()), e.what());
        return exit_code(e.code());
    } catch (const std::exception& e) {
        print_error("internal", e.what());
        return 1;
    }
    return 2;
}
