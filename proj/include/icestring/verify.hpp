#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "icestring/lattice.hpp"

namespace icestr {

struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double threshold = 0.0;
    bool informational = false;  // reported only, never fails a run
};

struct VerifyOptions {
    bool inject_fault = false;  // wrong sign on the lambda_1 = 1 relabelling phase
    std::size_t cap = kDefaultBasisCap;
};

std::vector<CheckResult> verify_fixed(int N, int M, const VerifyOptions& opt = {});
std::vector<CheckResult> verify_t11(int m, int n, const VerifyOptions& opt = {});
std::vector<CheckResult> verify_t12(int m, int n, const VerifyOptions& opt = {});

// fixed ends with N+M <= 8, (1,1) with m,n <= 4, (1,2) with m <= 4, 2 <= n <= 4
std::vector<CheckResult> verify_default(const VerifyOptions& opt = {});

bool all_passed(const std::vector<CheckResult>& checks);

}  // namespace icestr
