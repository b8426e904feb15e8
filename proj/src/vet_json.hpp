// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#pragma once

#include <json.hpp>

#include "tracelab/vet.hpp"

namespace tracelab::vet {

nlohmann::json to_json(const Candidate& c);
Candidate candidate_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DecisionRecord& d);
DecisionRecord decision_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SessionStats& s);
nlohmann::json to_json(const TraceLink& link);

}  // namespace tracelab::vet
