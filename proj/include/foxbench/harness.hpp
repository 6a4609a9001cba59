#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "foxbench/dataset.hpp"
#include "foxbench/metrics.hpp"
#include "foxbench/model.hpp"
#include "foxbench/optimizer.hpp"

namespace foxbench {

// Everything one experiment cell needs, loadable from a flat key=value file
// with CLI overrides on top (overrides win). See config_items() for the full
// key list.
struct ExperimentConfig {
    // dataset
    std::string dataset = "synth";  // synth | csv | mnist
    std::string images_path;        // mnist pool (or train file when test files given)
    std::string labels_path;
    std::string test_images_path;   // optional canonical test pair
    std::string test_labels_path;
    std::string csv_path;
    std::size_t subsample_n = 0;    // 0 = keep everything
    double split_fraction = 0.8;    // used when no canonical test pair exists
    std::size_t synth_n = 2000;
    std::size_t synth_d = 20;
    double synth_separation = 3.0;

    // model
    std::string model = "logreg";   // logreg | mlp | logreg_dropout
    std::size_t hidden1 = 128;
    std::size_t hidden2 = 128;
    double dropout_rate = 0.5;

    // optimizer
    std::string optimizer = "foxtsage";  // foxtsage | sgd | adam
    int setting = 1;                     // 1: I=5,P=10; 2: I=50,P=30; 0: custom
    FoxtsageConfig fox;
    AdamConfig adam;
    double sgd_lr = 0.01;

    // budgets and repetition
    std::size_t epochs = 0;         // baseline epochs; 0 = follow the budget rule
    bool equal_budget = false;      // baselines get I*P epochs instead of I
    std::size_t batch_size = 64;
    std::size_t runs = 5;
    std::uint64_t seed = 42;
    std::string out_dir = "runs/cell";

    void validate() const;

    // Setting presets expanded into fox.iterations / fox.population_size.
    void apply_setting();

    // Baseline epoch count after the budget rule.
    std::size_t baseline_epochs() const;
};

// Canonical (key, value) serialization — the fingerprint hashes exactly this.
std::vector<std::pair<std::string, std::string>> config_items(const ExperimentConfig& cfg);

// Parse a flat key=value file ('#' comments, blank lines ignored).
ExperimentConfig load_config(const std::string& path);

// Apply one key=value override; throws DomainError for unknown keys.
void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value);

// Stable FNV-1a hash of the canonical serialization, as a hex string.
std::string config_fingerprint(const ExperimentConfig& cfg);

// Resolve a data file path: as given if it exists, else relative to the
// FOXBENCH_DATA_DIR environment variable. Throws IoError naming every
// location tried when the file exists in neither place.
std::string resolve_data_path(const std::string& path);

// One seeded training run. Effective seed = root seed XOR run index; inside
// a run, parameter init, the optimizer, and the baseline batch stream each
// get their own derived substream.
struct RunRecord {
    std::string fingerprint;
    std::string optimizer;
    std::size_t run_index = 0;
    std::uint64_t seed = 0;  // effective seed
    bool failed = false;
    std::string error;
    std::string started_at;  // UTC, ISO 8601
    double wall_time_s = 0.0;
    double best_lr = 0.0;                  // foxtsage only
    std::vector<double> epoch_losses;      // per epoch (baselines) / per iteration best (foxtsage)
    std::vector<double> epoch_loss_sums;
    RunMetrics metrics;  // loss on train split, classification metrics on test split
    std::vector<TraceRecord> trace;  // foxtsage candidate log
};

// Train/test data resolved from a config.
Split prepare_data(const ExperimentConfig& cfg);

// Execute runs-per-cell seeded runs and persist records + plot series under
// cfg.out_dir (records.json, metrics.csv, curves.csv, config.txt).
std::vector<RunRecord> run_cell(const ExperimentConfig& cfg);

// Records persisted by run_cell, reloaded for comparison.
std::vector<RunRecord> load_records(const std::string& dir);

struct ComparisonRow {
    std::string key;
    std::string display;
    double baseline = 0.0;
    double candidate = 0.0;
    double improvement_pct = 0.0;  // NaN when baseline is 0 and candidate differs
};

struct PairedTest {
    std::string key;
    double w = 0.0;
    double p = 1.0;
    std::size_t n = 0;
    bool degenerate = false;  // all paired differences zero -> p fixed at 1
};

struct Comparison {
    std::string label_baseline;
    std::string label_candidate;
    MetricsReport baseline;
    MetricsReport candidate;
    std::vector<ComparisonRow> rows;    // direction-aware percentage improvements
    std::vector<PairedTest> tests;      // exact Wilcoxon per metric, paired by run
    double time_ratio = 0.0;            // candidate mean wall time / baseline's
};

// Aggregate both cells, compute improvement rows, and run the paired exact
// Wilcoxon per metric over runs that succeeded on both sides. Throws
// PairingError when the cells hold different run counts.
Comparison compare(const std::vector<RunRecord>& baseline,
                   const std::vector<RunRecord>& candidate);

// Write comparison.{csv|json|md} into out_dir; returns the file path.
std::string emit_report(const Comparison& comparison, const std::string& format,
                        const std::string& out_dir);

// Fast end-to-end sanity checks (determinism, gradient probe, known test
// statistics). Prints one line per check; returns the number of failures.
int selftest(std::ostream& out);

}  // namespace foxbench
