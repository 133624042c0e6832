#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "gadi/gadi.hpp"
#include "gadi/gpr.hpp"
#include "gadi/params.hpp"
#include "gadi/sylvester.hpp"

namespace gadi {

// Doubles are written with shortest round-trip formatting, so save/load is bit-exact.

void to_json(nlohmann::json& j, const SolveReport& r);
void to_json(nlohmann::json& j, const SylvesterReport& r);

void to_json(nlohmann::json& j, const SpectralSummary& s);
void from_json(const nlohmann::json& j, SpectralSummary& s);

/**
 * {"kernel": "exponential", "inputs": [...], "targets": [...], "iota", "sigma_f",
 *  "noise", "input_scale"}. The factorization is rebuilt on load.
 */
void to_json(nlohmann::json& j, const GprModel& m);
void from_json(const nlohmann::json& j, GprModel& m);

void save_gpr_model(const std::filesystem::path& path, const GprModel& m);
/// Throws ParseError on malformed documents.
GprModel load_gpr_model(const std::filesystem::path& path);

} // namespace gadi
