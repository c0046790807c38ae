#pragma once
// Named verification suites. Each suite pins the tolerances of one
// acceptance-level claim and reports one pass/fail line per check, with
// the measured values attached. Used by the `verify` CLI command and by
// the acceptance test binary.

#include <cstdint>
#include <string>
#include <vector>

namespace erw {

struct VerifyCheck {
    std::string name;
    bool pass = false;
    std::string detail;  // measured vs target, human-readable
};

struct CriterionResult {
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    std::vector<VerifyCheck> checks;
};

struct VerifyOptions {
    std::uint64_t seed = 20250811;
    unsigned threads = 0;       // 0 = auto
    std::string cli_path;       // required by the determinism suite
};

const std::vector<std::string>& verify_suite_names();
bool is_verify_suite(const std::string& name);
CriterionResult run_verify_suite(const std::string& name, const VerifyOptions& options);
std::vector<CriterionResult> run_all_verify_suites(const VerifyOptions& options);

}  // namespace erw
