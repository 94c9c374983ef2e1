#include "pathrel/metrics.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "pathrel/tensor.hpp"

namespace pathrel {

EvalReport weighted_f1(const std::vector<std::int64_t>& gold,
                       const std::vector<std::int64_t>& predicted,
                       const std::vector<std::string>& labels) {
    if (gold.size() != predicted.size()) {
        throw std::invalid_argument("weighted_f1: " + std::to_string(gold.size()) +
                                    " gold vs " + std::to_string(predicted.size()) +
                                    " predicted labels");
    }
    if (gold.empty()) throw std::invalid_argument("weighted_f1: empty label vectors");
    const std::int64_t c = static_cast<std::int64_t>(labels.size());
    std::vector<std::int64_t> tp(labels.size(), 0), fp(labels.size(), 0), fn(labels.size(), 0);
    for (std::size_t i = 0; i < gold.size(); ++i) {
        const std::int64_t g = gold[i], p = predicted[i];
        if (g < 0 || g >= c || p < 0 || p >= c) {
            throw std::out_of_range("weighted_f1: label index out of range at item " +
                                    std::to_string(i));
        }
        if (g == p) {
            ++tp[static_cast<std::size_t>(g)];
        } else {
            ++fn[static_cast<std::size_t>(g)];
            ++fp[static_cast<std::size_t>(p)];
        }
    }

    EvalReport report;
    double weighted = 0.0;
    for (std::size_t k = 0; k < labels.size(); ++k) {
        ClassMetrics m;
        m.label = labels[k];
        m.support = tp[k] + fn[k];
        const std::int64_t pred_count = tp[k] + fp[k];
        m.precision = pred_count == 0 ? 0.0
                                      : static_cast<double>(tp[k]) / static_cast<double>(pred_count);
        m.recall = m.support == 0 ? 0.0
                                  : static_cast<double>(tp[k]) / static_cast<double>(m.support);
        m.f1 = (m.precision + m.recall) == 0.0
                   ? 0.0
                   : 2.0 * m.precision * m.recall / (m.precision + m.recall);
        weighted += static_cast<double>(m.support) * m.f1;
        report.per_class.push_back(std::move(m));
    }
    report.weighted_f1 = weighted / static_cast<double>(gold.size());
    return report;
}

std::string format_coverage(std::int64_t instances, std::int64_t with_paths) {
    const double pct =
        instances == 0 ? 0.0
                       : 100.0 * static_cast<double>(with_paths) / static_cast<double>(instances);
    char buf[96];
    std::snprintf(buf, sizeof buf, "%lld / %lld / %.1f%%", static_cast<long long>(instances),
                  static_cast<long long>(with_paths), pct);
    return buf;
}

std::string EvalReport::coverage_line() const {
    return format_coverage(instances, instances_with_paths);
}

std::string EvalReport::format() const {
    std::ostringstream os;
    char buf[160];
    os << "relation\tprecision\trecall\tf1\tsupport\n";
    for (const ClassMetrics& m : per_class) {
        std::snprintf(buf, sizeof buf, "%s\t%.4f\t%.4f\t%.4f\t%lld\n", m.label.c_str(),
                      m.precision, m.recall, m.f1, static_cast<long long>(m.support));
        os << buf;
    }
    std::snprintf(buf, sizeof buf, "weighted_f1\t%.4f\n", weighted_f1);
    os << buf;
    if (instances > 0) os << "coverage\t" << coverage_line() << '\n';
    return os.str();
}

}  // namespace pathrel
