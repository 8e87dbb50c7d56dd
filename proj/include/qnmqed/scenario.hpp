// scenario.hpp — scenario-driven front end: config ingestion, dispatch to the
// physics pipelines, CSV/JSON artifact emission, and parallel sweeps.
//
// Config files are JSON with a mandatory schema_version field and strict
// unknown-key rejection.  Every scenario echoes its fully resolved parameter
// set (defaults included) into a JSON sidecar so a rerun reproduces the
// artifacts byte for byte.

#pragma once

#include "qnmqed/liouvillian.hpp"
#include "qnmqed/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qnmqed::scen {

struct Overrides {
    std::optional<liou::NegativeRatePolicy> policy;
    std::optional<bool> secular;
    std::optional<int> n_fock;
    std::optional<int> keep;
    std::optional<int> workers;
    std::optional<std::string> out_dir;
    std::optional<std::string> data_dir;
};

struct RunReport {
    std::vector<std::string> artifacts;
    std::vector<std::string> warnings;
};

// Bundled QNM parameter directory; the QNM_USC_DATA environment variable
// overrides the compiled-in default.
std::string default_data_dir();

// Parses and validates a config (including referenced QNM files) without
// running anything.  Throws ConfigError on any violation.
void validate_config(const std::string& config_path, const Overrides& overrides);

// Runs every scenario (or the sweep block) in the config.
RunReport run_config(const std::string& config_path, const Overrides& overrides);

// Derived-criteria table over a set of QNM parameter files.
RunReport run_criteria(const std::vector<std::string>& qnm_files, const std::string& out_dir);

}  // namespace qnmqed::scen
