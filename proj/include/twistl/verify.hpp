#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace twistl {

struct VerifyResult {
    std::string name;
    bool pass = false;
    double metric = 0.0;   // worst observed deviation
    double bound = 0.0;    // allowed bound
};

// deterministic invariant suite; identical output for identical seeds
std::vector<VerifyResult> run_verify(std::uint64_t seed);

std::string format_verify(const std::vector<VerifyResult>& results);

}  // namespace twistl
