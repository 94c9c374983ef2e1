#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pathrel {

struct ClassMetrics {
    std::string label;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::int64_t support = 0;
};

struct EvalReport {
    std::vector<ClassMetrics> per_class;
    double weighted_f1 = 0.0;
    // coverage stats, filled by the experiment driver
    std::int64_t instances = 0;
    std::int64_t instances_with_paths = 0;

    std::string coverage_line() const;  // "57509 / 8866 / 15.4%"
    std::string format() const;         // deterministic multi-line report
};

// Per-class precision/recall/F1 with the 0/0 -> 0 convention, averaged with
// weights proportional to gold support. Every declared class participates.
EvalReport weighted_f1(const std::vector<std::int64_t>& gold,
                       const std::vector<std::int64_t>& predicted,
                       const std::vector<std::string>& labels);

std::string format_coverage(std::int64_t instances, std::int64_t with_paths);

}  // namespace pathrel
