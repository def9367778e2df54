// Copyright 2026 the fcvi authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>
#include <string>

#include "fcvi/problem.hpp"

namespace fcvi {

class SaddleProblem;  // saddle.hpp

// Declarative JSON schema for instances. Matrices are nested row-major
// arrays; every derived metadata field (L, H, L_g, H_g, M_g, D_X) is
// written explicitly and re-verified on load.
nlohmann::json instance_to_json(const ProblemInstance& inst);
ProblemInstance instance_from_json(const nlohmann::json& j);

ProblemInstance load_instance(const std::string& path);
void save_instance(const ProblemInstance& inst, const std::string& path);

nlohmann::json saddle_to_json(const SaddleProblem& sp);
SaddleProblem saddle_from_json(const nlohmann::json& j);
SaddleProblem load_saddle(const std::string& path);
void save_saddle(const SaddleProblem& sp, const std::string& path);

// True when the JSON object describes a saddle problem (has a payoff block)
// rather than a plain instance.
bool is_saddle_schema(const nlohmann::json& j);

}  // namespace fcvi
