#include "foxbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>

#include "foxbench/error.hpp"

namespace foxbench {

namespace {

double sample_std(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    // Two-pass with the compensation term, so a constant vector comes out
    // at exactly zero even when the mean itself carries rounding.
    double ss = 0.0;
    double comp = 0.0;
    for (double x : xs) {
        const double d = x - mean;
        ss += d * d;
        comp += d;
    }
    const double n = static_cast<double>(xs.size());
    const double var = (ss - comp * comp / n) / (n - 1.0);
    return var > 0.0 ? std::sqrt(var) : 0.0;
}

double mean_of(const std::vector<double>& xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

}  // namespace

ConfusionMatrix ConfusionMatrix::from_labels(const std::vector<int>& truth,
                                             const std::vector<int>& predicted,
                                             int num_classes) {
    if (truth.size() != predicted.size()) {
        std::ostringstream msg;
        msg << "ConfusionMatrix: " << truth.size() << " truth labels vs "
            << predicted.size() << " predictions";
        throw ShapeError(msg.str());
    }
    ConfusionMatrix cm(static_cast<std::size_t>(num_classes));
    for (std::size_t k = 0; k < truth.size(); ++k) {
        if (truth[k] < 0 || truth[k] >= num_classes || predicted[k] < 0 ||
            predicted[k] >= num_classes) {
            std::ostringstream msg;
            msg << "ConfusionMatrix: label pair (" << truth[k] << ", " << predicted[k]
                << ") at index " << k << " outside [0," << num_classes << ")";
            throw BoundsError(msg.str());
        }
        ++cm.at(static_cast<std::size_t>(truth[k]), static_cast<std::size_t>(predicted[k]));
    }
    return cm;
}

long ConfusionMatrix::total() const {
    return std::accumulate(counts.begin(), counts.end(), 0L);
}

double accuracy(const ConfusionMatrix& cm) {
    const long n = cm.total();
    if (n == 0) throw DomainError("accuracy: empty confusion matrix");
    long correct = 0;
    for (std::size_t c = 0; c < cm.num_classes; ++c) correct += cm.at(c, c);
    return static_cast<double>(correct) / static_cast<double>(n);
}

PrecisionRecallF1 precision_recall_f1(const ConfusionMatrix& cm, Averaging averaging) {
    const long n = cm.total();
    if (n == 0) throw DomainError("precision_recall_f1: empty confusion matrix");

    PrecisionRecallF1 out;
    const std::size_t c_count = cm.num_classes;
    for (std::size_t c = 0; c < c_count; ++c) {
        long tp = cm.at(c, c);
        long fp = 0;
        long fn = 0;
        for (std::size_t other = 0; other < c_count; ++other) {
            if (other == c) continue;
            fp += cm.at(other, c);
            fn += cm.at(c, other);
        }
        const double p = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
        const double r = (tp + fn) > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
        const double f1 = (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;

        const double weight = averaging == Averaging::Macro
                                  ? 1.0 / static_cast<double>(c_count)
                                  : static_cast<double>(tp + fn) / static_cast<double>(n);
        out.precision += weight * p;
        out.recall += weight * r;
        out.f1 += weight * f1;
    }
    return out;
}

double time_avg(const std::vector<double>& seconds) {
    if (seconds.empty()) throw DomainError("time_avg: no measurements");
    return mean_of(seconds);
}

MetricsReport aggregate(const std::vector<RunMetrics>& runs) {
    if (runs.empty()) throw DomainError("aggregate: no runs");

    const auto column = [&](double RunMetrics::* field) {
        std::vector<double> xs;
        xs.reserve(runs.size());
        for (const auto& r : runs) xs.push_back(r.*field);
        return xs;
    };

    MetricsReport report;
    report.runs = runs;
    report.single_run = runs.size() == 1;

    const auto fill = [&](double RunMetrics::* field, double& mean_out, double& std_out) {
        const std::vector<double> xs = column(field);
        mean_out = mean_of(xs);
        std_out = sample_std(xs, mean_out);
    };
    fill(&RunMetrics::loss, report.loss_mean, report.loss_std);
    fill(&RunMetrics::accuracy, report.accuracy_mean, report.accuracy_std);
    fill(&RunMetrics::precision, report.precision_mean, report.precision_std);
    fill(&RunMetrics::recall, report.recall_mean, report.recall_std);
    fill(&RunMetrics::f1, report.f1_mean, report.f1_std);
    fill(&RunMetrics::time_s, report.time_mean_s, report.time_std_s);
    return report;
}

WilcoxonResult wilcoxon_exact(const std::vector<double>& paired_diffs) {
    std::vector<double> diffs;
    for (double d : paired_diffs) {
        if (d != 0.0) diffs.push_back(d);
    }
    if (diffs.empty()) {
        throw DomainError("wilcoxon_exact: every paired difference is zero");
    }
    const std::size_t n = diffs.size();
    if (n < 2 || n > 20) {
        std::ostringstream msg;
        msg << "wilcoxon_exact: " << n
            << " nonzero differences outside the exact range [2, 20]";
        throw DomainError(msg.str());
    }

    // Rank |d| ascending with average ranks on ties. Ranks are stored
    // doubled so tied (half-integer) ranks stay exact integers.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(diffs[a]) < std::abs(diffs[b]);
    });
    std::vector<long> rank2(n, 0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]])) ++j;
        // Positions i..j (0-based) share the average of ranks i+1..j+1.
        const long doubled = static_cast<long>(i + 1 + j + 1);  // 2 * average rank
        for (std::size_t k = i; k <= j; ++k) rank2[order[k]] = doubled;
        i = j + 1;
    }

    long w_plus2 = 0;
    long total2 = 0;
    for (std::size_t k = 0; k < n; ++k) {
        total2 += rank2[k];
        if (diffs[k] > 0.0) w_plus2 += rank2[k];
    }
    const long w_minus2 = total2 - w_plus2;
    const long w2 = std::min(w_plus2, w_minus2);

    // Null distribution of the doubled positive-rank sum via subset-sum
    // counting: dp[s] = number of sign assignments with sum s.
    std::vector<std::uint64_t> dp(static_cast<std::size_t>(total2) + 1, 0);
    dp[0] = 1;
    for (std::size_t k = 0; k < n; ++k) {
        for (long s = total2; s >= rank2[k]; --s) {
            dp[static_cast<std::size_t>(s)] += dp[static_cast<std::size_t>(s - rank2[k])];
        }
    }
    std::uint64_t extreme = 0;
    for (long s = 0; s <= total2; ++s) {
        if (std::min(s, total2 - s) <= w2) extreme += dp[static_cast<std::size_t>(s)];
    }

    WilcoxonResult result;
    result.w = static_cast<double>(w2) / 2.0;
    result.p = static_cast<double>(extreme) / std::pow(2.0, static_cast<double>(n));
    result.n = n;
    return result;
}

Direction metric_direction(const std::string& metric_key) {
    const auto starts_with = [&](const char* prefix) {
        return metric_key.rfind(prefix, 0) == 0;
    };
    if (starts_with("loss") || starts_with("time")) return Direction::LowerIsBetter;
    if (starts_with("accuracy") || starts_with("precision") || starts_with("recall") ||
        starts_with("f1")) {
        return Direction::HigherIsBetter;
    }
    throw DomainError("metric_direction: unknown metric " + metric_key);
}

double percentage_improvement(double baseline, double candidate, Direction direction) {
    if (baseline == 0.0) throw DomainError("percentage_improvement: zero baseline");
    const double delta = direction == Direction::LowerIsBetter ? baseline - candidate
                                                               : candidate - baseline;
    return delta / baseline * 100.0;
}

std::vector<MetricRow> report_rows(const MetricsReport& report) {
    return {
        {"loss_mean", "Loss Mean", report.loss_mean},
        {"loss_std", "Loss StdDev", report.loss_std},
        {"accuracy_mean", "Accuracy Mean", report.accuracy_mean},
        {"accuracy_std", "Accuracy StdDev", report.accuracy_std},
        {"precision_mean", "Precision Mean", report.precision_mean},
        {"precision_std", "Precision StdDev", report.precision_std},
        {"recall_mean", "Recall Mean", report.recall_mean},
        {"recall_std", "Recall StdDev", report.recall_std},
        {"f1_mean", "F1-Score Mean", report.f1_mean},
        {"f1_std", "F1-Score StdDev", report.f1_std},
        {"time_mean_s", "Time Mean", report.time_mean_s},
        {"time_std_s", "Time StdDev", report.time_std_s},
    };
}

}  // namespace foxbench
