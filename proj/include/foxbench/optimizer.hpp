#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "foxbench/dataset.hpp"
#include "foxbench/model.hpp"
#include "foxbench/rng.hpp"

namespace foxbench {

// theta <- theta - lr * grad, every tensor. Throws ShapeError on mismatch.
ParamSet sgd_step(const ParamSet& params, const Gradient& grad, double lr);

struct AdamConfig {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    void validate() const;  // BoundsError on values outside their ranges
};

struct AdamState {
    ParamSet m;  // first-moment accumulator
    ParamSet v;  // second-moment accumulator, elementwise >= 0
    long t = 0;  // completed steps

    static AdamState zeros_like(const ParamSet& params);
};

// One Adam update: decay both moment estimates, bias-correct them, then move
// the parameters by lr * m_hat / (sqrt(v_hat) + epsilon). Returns the new
// parameters and the state with t advanced by one.
std::pair<ParamSet, AdamState> adam_step(const ParamSet& params, const Gradient& grad,
                                         const AdamConfig& cfg, const AdamState& state);

// Whether every candidate in an iteration trains a clone of the
// iteration-start best parameters (Snapshot) or the candidates mutate one
// shared parameter vector in population order (Sequential).
enum class CandidateStart { Snapshot, Sequential };

struct FoxtsageConfig {
    std::size_t population_size = 10;  // P
    std::size_t iterations = 5;       // I
    double lr_min = 1e-4;
    double lr_max = 0.1;
    double lr_base = 0.01;       // eta_base, also the plain-SGD baseline rate
    double alpha = 1.0;          // decay control when apply_lr_decay is on
    double gaussian_sigma = 1.0; // scale of the perturbation g
    double denom_floor = 0.1;    // minimum |1+g| in the exploitation division
    CandidateStart candidate_start = CandidateStart::Snapshot;
    bool apply_lr_decay = false; // off: the population update alone moves rates
    bool parallel = false;       // worker threads per candidate; Snapshot mode only

    void validate() const;
};

struct FoxtsageState {
    std::vector<double> population;  // P learning rates, each within bounds
    double best_lr = 0.0;
    double best_loss = std::numeric_limits<double>::infinity();
    std::size_t iteration = 0;  // completed evaluation rounds
    ParamSet best_params;
};

struct TraceRecord {
    std::size_t iteration = 0;     // 1-based
    std::size_t candidate_index = 0;
    double lr = 0.0;
    double epoch_loss = 0.0;       // sample-weighted mean of per-batch losses
    double epoch_loss_sum = 0.0;   // plain sum of per-batch losses
    bool is_best = false;          // candidate became the new best
    bool failed = false;           // non-finite loss; skipped for best-update
    double wall_time_s = 0.0;
};

// Everything one candidate epoch produces.
struct EpochResult {
    ParamSet params;
    double epoch_loss = 0.0;
    double epoch_loss_sum = 0.0;
};

// Trains for one epoch from `start` at rate `lr`. Every stochastic choice
// (batch order, dropout) must come from `rng`, so a candidate's work is a
// pure function of (start, lr, rng seed) and may run on any thread.
using EpochFn = std::function<EpochResult(const ParamSet& start, double lr, Rng& rng)>;

struct FoxtsageResult {
    ParamSet best_params;
    double best_lr = 0.0;
    double best_loss = 0.0;
    std::vector<TraceRecord> trace;
};

// Raised when every candidate of one iteration produced a non-finite loss;
// carries the trace accumulated up to and including that iteration.
struct AllCandidatesFailed : std::runtime_error {
    std::vector<TraceRecord> trace;
    AllCandidatesFailed(const std::string& msg, std::vector<TraceRecord> trace_so_far)
        : std::runtime_error(msg), trace(std::move(trace_so_far)) {}
};

// Population of P rates drawn uniformly from [lr_min, lr_max];
// best_lr starts at population[0], best_loss at infinity.
FoxtsageState foxtsage_init(const FoxtsageConfig& cfg, Rng& rng);

// One evaluation round: each candidate (index order) trains one epoch and
// the best (loss, lr, params) triple is updated on strict improvement.
// Candidate i of round t uses the dedicated rng stream 2 + (t-1)*P + i under
// root_seed, so serial and parallel evaluation produce identical states.
// Returns the number of candidates with finite loss.
std::size_t foxtsage_evaluate_candidates(FoxtsageState& state, const FoxtsageConfig& cfg,
                                         const EpochFn& epoch, std::uint64_t root_seed,
                                         std::vector<TraceRecord>& trace);

// Per candidate: draw r ~ U[0,1) then g ~ N(0, sigma); r < 0.5 explores with
// best_lr * (1+g), otherwise exploits with best_lr / (1+g) (|1+g| floored at
// denom_floor); the result is clipped to [lr_min, lr_max].
void foxtsage_update_population(FoxtsageState& state, const FoxtsageConfig& cfg, Rng& rng);

// lr_base / (1 + alpha * f_best). Throws DomainError if f_best < 0 or alpha < 0.
double lr_decay(double lr_base, double alpha, double f_best);

// Full run: I rounds of evaluate + population update, starting from
// `initial` parameters. Streams under `seed`: 0 = population init,
// 1 = population updates, 2.. = candidate epochs (see evaluate).
// When apply_lr_decay is set, best_lr is re-centered to
// clip(lr_decay(lr_base, alpha, best_loss)) after each evaluation round.
FoxtsageResult foxtsage_run(const FoxtsageConfig& cfg, const ParamSet& initial,
                            const EpochFn& epoch, std::uint64_t seed);

// Mini-batch SGD epoch over `data` (captured by reference — keep it alive):
// shuffle sample order, then for each batch compute loss and gradient at the
// current parameters and step. epoch_loss is the sample-weighted mean of the
// pre-step batch losses; epoch_loss_sum their plain sum.
EpochFn make_sgd_epoch(const ModelSpec& spec, const LabeledDataset& data,
                       std::size_t batch_size);

// Fixed-epoch baseline trainers built on the same epoch loop.
struct TrainResult {
    ParamSet params;
    std::vector<double> epoch_losses;
    std::vector<double> epoch_loss_sums;
};

TrainResult train_sgd(const ModelSpec& spec, const LabeledDataset& data,
                      const ParamSet& initial, double lr, std::size_t epochs,
                      std::size_t batch_size, Rng& rng);
TrainResult train_adam(const ModelSpec& spec, const LabeledDataset& data,
                       const ParamSet& initial, const AdamConfig& cfg, std::size_t epochs,
                       std::size_t batch_size, Rng& rng);

}  // namespace foxbench
