#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "banlab/harness.hpp"
#include "banlab/summing.hpp"
#include "banlab/types.hpp"
#include "banlab/vfun.hpp"

namespace banlab::serialize {

using json = nlohmann::json;

/// Doubles print with 17 significant digits so that every value round-trips.
std::string format_double(double v);

/// Minimal JSON string escaping for report emission.
std::string escape(const std::string& s);

// --- config parsing (throws ConfigError naming the offending field) ---

json parse_json_file(const std::string& path);
json parse_json_text(const std::string& text, const std::string& origin);

SpaceSpec space_from_json(const json& j, const std::string& field);
json space_to_json(const SpaceSpec& s);

summing::Operator operator_from_json(const json& j, const std::string& field);
json operator_to_json(const summing::Operator& T);

/// {"space": {...}, "cells": [{"mass": m, "value": [...]}, ...]}
std::pair<vfun::MeasureSpace, vfun::SimpleFunction> function_from_json(const json& j,
                                                                       const std::string& field);
json function_to_json(const vfun::MeasureSpace& ms, const vfun::SimpleFunction& f);

summing::SummingParams params_from_json(const json& j, const std::string& field);

// --- report emission (canonical byte-stable text) ---

std::string check_report_line(const harness::CheckReport& r, int instance);
std::string check_report_csv_row(const harness::CheckReport& r);
std::string estimate_line(const std::string& name, const summing::NormEstimate& est);

} // namespace banlab::serialize
