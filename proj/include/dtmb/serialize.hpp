#pragma once

#include <string>
#include <vector>

#include "dtmb/faults.hpp"
#include "dtmb/layout.hpp"
#include "dtmb/reconfig.hpp"
#include "dtmb/yield.hpp"

namespace dtmb {

/// Shortest round-trip decimal form of x (std::to_chars).
std::string fmt_double(double x);

// Layout JSON:
//   {"variant": "DTMB(2,6)"|null, "boundary": "open"|"periodic",
//    "width": W, "height": H,
//    "cells": [{"q":..,"r":..,"kind":"primary"|"spare","used":bool}, ...]}
// Cells are emitted in stable (r, q) order.
std::string layout_to_json(const ArrayLayout& layout);
ArrayLayout layout_from_json(const std::string& text);

// Fault map JSON: {"layout_hash": hex, "faulty": [{"q":..,"r":..}, ...]},
// faulty cells in stable order. Loading checks the hash against `layout`.
std::string faultmap_to_json(const FaultMap& faults, const ArrayLayout& layout);
FaultMap faultmap_from_json(const std::string& text, const ArrayLayout& layout);

// Repair plan JSON: {"verdict": "repairable"|"unrepairable",
//   "assignment": [{"from":{"q","r"},"to":{"q","r"}}, ...],
//   "witness": [{"q","r"}, ...] | null}
std::string plan_to_json(const RepairPlan& plan);

std::string validation_to_json(const ValidationReport& report, const ArrayLayout& layout);

// Curve CSV, one row per grid point:
//   p_or_m,runs,successes,yield,std_error,method
std::string curve_to_csv(const Curve& curve);

// Minimal line plot of a curve (yield on [0,1] against p or m).
std::string curve_to_svg(const Curve& curve, const std::string& title,
                         const std::string& x_label);

// Grid strings: a single value "0.95", a comma list "0,5,10", or an
// inclusive range "start:stop:step".
std::vector<double> parse_p_grid(const std::string& text);
std::vector<int> parse_m_grid(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace dtmb
