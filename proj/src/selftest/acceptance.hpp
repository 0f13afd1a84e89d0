#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

namespace lcft::acceptance {

struct Options {
    int threads = 0;               // 0: LCFT_THREADS, then hardware concurrency
    std::uint64_t seed = 20240601;
    long mc_samples = 200000;
    std::set<int> only;            // empty: all criteria
};

struct Outcome {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

// "PASS [3] name: detail (1.2 s)"
std::string format(const Outcome& o);

// Runs the criteria in order; `report` is called as each one finishes.
std::vector<Outcome> run(const Options& opt, const std::function<void(const Outcome&)>& report = {});

}  // namespace lcft::acceptance
