#pragma once

#include <ostream>

#include "json.hpp"

// Cross-oracle suite behind `fpuchain validate`. Writes one PASS/FAIL line
// per check to text, fills report, returns true when everything passed.
bool run_validation(nlohmann::ordered_json& report, std::ostream& text);
