// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#pragma once

#include <string>

#include "tracelab/config.hpp"

namespace tracelab::workflows {

// Each command reads its settings from the config, writes its files plus
// run_config.txt (the resolved settings) into `out`, and returns a one-line
// summary. Errors surface as tracelab::Error.

/// candidates.csv
std::string recover(const RunConfig& c);
/// eval_report.txt (key=value) and eval_per_source.csv
std::string eval(const RunConfig& c);
/// matrix.csv, changes.csv, consistency.txt; appends justifications.log
std::string maintain(const RunConfig& c);
/// type_predictions.csv, type_report.txt, type_per_class.csv
std::string classify_types(const RunConfig& c);
/// explanations.jsonl
std::string explain(const RunConfig& c);
/// Blocks serving the vetting API until the process ends.
void serve(const RunConfig& c);

}  // namespace tracelab::workflows
