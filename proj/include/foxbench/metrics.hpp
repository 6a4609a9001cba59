#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace foxbench {

// C x C counts; entry (i, j) = samples of true class i predicted as class j.
struct ConfusionMatrix {
    std::size_t num_classes = 0;
    std::vector<long> counts;  // row-major

    ConfusionMatrix() = default;
    explicit ConfusionMatrix(std::size_t c) : num_classes(c), counts(c * c, 0) {}

    static ConfusionMatrix from_labels(const std::vector<int>& truth,
                                       const std::vector<int>& predicted, int num_classes);

    long& at(std::size_t i, std::size_t j) { return counts[i * num_classes + j]; }
    long at(std::size_t i, std::size_t j) const { return counts[i * num_classes + j]; }
    long total() const;
};

// Fraction of diagonal mass. Throws DomainError when the matrix is empty.
double accuracy(const ConfusionMatrix& cm);

enum class Averaging { Macro, Weighted };

struct PrecisionRecallF1 {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Per-class precision/recall/F1 averaged either uniformly (Macro) or by
// class support (Weighted). A class with an empty denominator contributes 0.
PrecisionRecallF1 precision_recall_f1(const ConfusionMatrix& cm, Averaging averaging);

// Arithmetic mean of per-run wall times. Throws DomainError when empty.
double time_avg(const std::vector<double>& seconds);

// Raw values of one run, the unit the cross-run statistics are built from.
struct RunMetrics {
    double loss = 0.0;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double time_s = 0.0;
};

struct MetricsReport {
    double loss_mean = 0.0, loss_std = 0.0;
    double accuracy_mean = 0.0, accuracy_std = 0.0;
    double precision_mean = 0.0, precision_std = 0.0;
    double recall_mean = 0.0, recall_std = 0.0;
    double f1_mean = 0.0, f1_std = 0.0;
    double time_mean_s = 0.0, time_std_s = 0.0;
    bool single_run = false;        // stds are 0 by convention, not evidence
    std::vector<RunMetrics> runs;   // raw per-run values retained
};

// Means and sample standard deviations (N-1 denominator) across runs.
// Throws DomainError when `runs` is empty; one run sets the single_run flag.
MetricsReport aggregate(const std::vector<RunMetrics>& runs);

struct WilcoxonResult {
    double w = 0.0;     // min of the signed-rank sums (half-integers possible)
    double p = 1.0;     // exact two-sided p-value
    std::size_t n = 0;  // pairs remaining after zero differences are dropped
};

// Exact Wilcoxon signed-rank test on paired differences. Zero differences
// are dropped; ties get average ranks; the two-sided p-value enumerates all
// 2^n sign assignments exactly, so n is capped at 20. Throws DomainError when
// every difference is zero or n falls outside [2, 20].
WilcoxonResult wilcoxon_exact(const std::vector<double>& paired_diffs);

enum class Direction { LowerIsBetter, HigherIsBetter };

// Direction registry keyed by metric name ("loss_mean", "accuracy_std", ...).
// Std columns inherit the direction of their mean. Throws DomainError for an
// unknown metric.
Direction metric_direction(const std::string& metric_key);

// Signed percentage improvement of `candidate` over `baseline`:
// (b - c)/b * 100 when lower is better, (c - b)/b * 100 when higher is
// better. Throws DomainError when baseline is 0.
double percentage_improvement(double baseline, double candidate, Direction direction);

// Flat serialization of a report: canonical key, table-style display name,
// value — one row per metric column.
struct MetricRow {
    std::string key;
    std::string display;
    double value = 0.0;
};
std::vector<MetricRow> report_rows(const MetricsReport& report);

}  // namespace foxbench
