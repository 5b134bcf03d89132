#pragma once

#include <map>
#include <optional>
#include <string>

#include "pairglm/logistic.hpp"
#include "pairglm/simulate.hpp"
#include "pairglm/solver.hpp"

namespace pairglm {

// Everything needed to reapply a fitted model: coefficients on the
// standardized scale, the standardizer itself, and the resolved
// configuration echo. Schema version "1".
struct FitBundle {
  FitResult fit;
  PenaltySpec spec;
  Family family = Family::Gaussian;
  std::optional<Standardizer> standardizer;
  std::map<std::string, std::string> config_echo;
};

std::string fit_bundle_to_json(const FitBundle& bundle);
FitBundle fit_bundle_from_json(const std::string& text);

std::string scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const std::string& text);  // unknown keys rejected

std::string scenario_report_to_json(const ScenarioReport& report);

// summary CSV, one row per (method, relaxed) pair
std::string scenario_report_to_csv(const ScenarioReport& report);

// write-to-temp-then-rename so outputs are never observed half-written
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace pairglm
