#pragma once

#include <json.hpp>

#include "floquet/types.hpp"

namespace floquet {

struct SuiteResult {
    std::string name;
    bool pass = false;
    double worst = 0.0;
    double tol = 0.0;
    nlohmann::json detail;
};

struct VerifyOptions {
    std::string config_dir;
    bool debug_mis_sign = false;
    unsigned seed = 2024;
};

std::vector<std::string> available_suites();
SuiteResult run_suite(const std::string& name, const VerifyOptions& opt);

}  // namespace floquet
