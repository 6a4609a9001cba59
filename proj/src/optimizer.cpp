#include "foxbench/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include "foxbench/error.hpp"

namespace foxbench {

namespace {

void require_congruent(const ParamSet& params, const Gradient& grad, const char* where) {
    if (params.tensors.size() != grad.tensors.size()) {
        std::ostringstream msg;
        msg << where << ": " << grad.tensors.size() << " gradient tensors for "
            << params.tensors.size() << " parameter tensors";
        throw ShapeError(msg.str());
    }
    for (std::size_t i = 0; i < params.tensors.size(); ++i) {
        require_same_shape(params.tensors[i].value, grad.tensors[i].value, where);
    }
}

using ApplyFn = std::function<void(ParamSet&, const Gradient&)>;

// Shared mini-batch loop: shuffle, then per batch compute loss/gradient at
// the current parameters and hand the gradient to `apply`.
EpochResult run_epoch(const ModelSpec& spec, const LabeledDataset& data,
                      const Matrix& y_onehot, std::size_t batch_size, ParamSet params,
                      Rng& rng, const ApplyFn& apply) {
    const std::size_t n = data.size();
    if (n == 0) throw DomainError("run_epoch: empty dataset");
    if (batch_size == 0) throw BoundsError("run_epoch: batch_size must be positive");

    const std::vector<std::size_t> order = shuffled_indices(n, rng);
    double loss_weighted = 0.0;
    double loss_sum = 0.0;
    for (std::size_t begin = 0; begin < n; begin += batch_size) {
        const std::size_t end = std::min(begin + batch_size, n);
        const std::size_t rows = end - begin;
        Matrix xb(rows, data.dim());
        Matrix yb(rows, y_onehot.cols);
        for (std::size_t r = 0; r < rows; ++r) {
            const std::size_t src = order[begin + r];
            std::copy(data.features.row_ptr(src), data.features.row_ptr(src) + data.dim(),
                      xb.row_ptr(r));
            std::copy(y_onehot.row_ptr(src), y_onehot.row_ptr(src) + y_onehot.cols,
                      yb.row_ptr(r));
        }
        const BackwardResult br = backward(spec, params, xb, yb, Mode::Train, rng);
        apply(params, br.grad);
        loss_weighted += br.loss * static_cast<double>(rows);
        loss_sum += br.loss;
    }
    EpochResult result;
    result.params = std::move(params);
    result.epoch_loss = loss_weighted / static_cast<double>(n);
    result.epoch_loss_sum = loss_sum;
    return result;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

ParamSet sgd_step(const ParamSet& params, const Gradient& grad, double lr) {
    require_congruent(params, grad, "sgd_step");
    ParamSet next = params;
    for (std::size_t i = 0; i < next.tensors.size(); ++i) {
        auto& out = next.tensors[i].value.data;
        const auto& g = grad.tensors[i].value.data;
        for (std::size_t k = 0; k < out.size(); ++k) out[k] -= lr * g[k];
    }
    return next;
}

void AdamConfig::validate() const {
    if (!(lr > 0.0)) throw BoundsError("AdamConfig: lr must be positive");
    if (!(beta1 >= 0.0 && beta1 < 1.0)) throw BoundsError("AdamConfig: beta1 outside [0,1)");
    if (!(beta2 >= 0.0 && beta2 < 1.0)) throw BoundsError("AdamConfig: beta2 outside [0,1)");
    if (!(epsilon > 0.0)) throw BoundsError("AdamConfig: epsilon must be positive");
}

AdamState AdamState::zeros_like(const ParamSet& params) {
    AdamState state;
    state.m = params;
    state.v = params;
    for (auto& t : state.m.tensors) std::fill(t.value.data.begin(), t.value.data.end(), 0.0);
    for (auto& t : state.v.tensors) std::fill(t.value.data.begin(), t.value.data.end(), 0.0);
    return state;
}

std::pair<ParamSet, AdamState> adam_step(const ParamSet& params, const Gradient& grad,
                                         const AdamConfig& cfg, const AdamState& state) {
    cfg.validate();
    require_congruent(params, grad, "adam_step");
    require_congruent(params, state.m, "adam_step (m)");
    require_congruent(params, state.v, "adam_step (v)");

    AdamState next = state;
    next.t = state.t + 1;
    const double bias1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(next.t));
    const double bias2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(next.t));

    ParamSet theta = params;
    for (std::size_t i = 0; i < theta.tensors.size(); ++i) {
        auto& out = theta.tensors[i].value.data;
        auto& m = next.m.tensors[i].value.data;
        auto& v = next.v.tensors[i].value.data;
        const auto& g = grad.tensors[i].value.data;
        for (std::size_t k = 0; k < out.size(); ++k) {
            m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * g[k];
            v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * g[k] * g[k];
            const double m_hat = m[k] / bias1;
            const double v_hat = v[k] / bias2;
            out[k] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
        }
    }
    return {std::move(theta), std::move(next)};
}

void FoxtsageConfig::validate() const {
    if (population_size < 1) throw BoundsError("FoxtsageConfig: population_size must be >= 1");
    if (iterations < 1) throw BoundsError("FoxtsageConfig: iterations must be >= 1");
    if (!(lr_min > 0.0 && lr_min < lr_max)) {
        std::ostringstream msg;
        msg << "FoxtsageConfig: need 0 < lr_min < lr_max, got [" << lr_min << ", " << lr_max
            << "]";
        throw BoundsError(msg.str());
    }
    if (!(lr_base > 0.0)) throw BoundsError("FoxtsageConfig: lr_base must be positive");
    if (!(alpha >= 0.0)) throw BoundsError("FoxtsageConfig: alpha must be >= 0");
    if (!(gaussian_sigma >= 0.0)) throw BoundsError("FoxtsageConfig: gaussian_sigma must be >= 0");
    if (!(denom_floor > 0.0)) throw BoundsError("FoxtsageConfig: denom_floor must be positive");
}

FoxtsageState foxtsage_init(const FoxtsageConfig& cfg, Rng& rng) {
    cfg.validate();
    FoxtsageState state;
    state.population.reserve(cfg.population_size);
    for (std::size_t i = 0; i < cfg.population_size; ++i) {
        state.population.push_back(rng.uniform(cfg.lr_min, cfg.lr_max));
    }
    state.best_lr = state.population.front();
    return state;
}

std::size_t foxtsage_evaluate_candidates(FoxtsageState& state, const FoxtsageConfig& cfg,
                                         const EpochFn& epoch, std::uint64_t root_seed,
                                         std::vector<TraceRecord>& trace) {
    const std::size_t t = state.iteration + 1;
    const std::size_t p = state.population.size();
    const auto stream_index = [&](std::size_t i) {
        return 2 + (static_cast<std::uint64_t>(t) - 1) * p + i;
    };

    std::vector<EpochResult> results(p);
    std::vector<double> times(p, 0.0);
    const bool parallel =
        cfg.parallel && cfg.candidate_start == CandidateStart::Snapshot && p > 1;

    if (parallel) {
        std::vector<std::exception_ptr> errors(p);
        std::vector<std::thread> workers;
        workers.reserve(p);
        for (std::size_t i = 0; i < p; ++i) {
            workers.emplace_back([&, i] {
                try {
                    Rng candidate_rng = Rng::stream(root_seed, stream_index(i));
                    const auto started = std::chrono::steady_clock::now();
                    results[i] = epoch(state.best_params, state.population[i], candidate_rng);
                    times[i] = seconds_since(started);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            });
        }
        for (auto& w : workers) w.join();
        for (const auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    } else {
        // Sequential mode threads one parameter vector through the
        // candidates; snapshot mode restarts each from the iteration-start
        // best.
        ParamSet current = state.best_params;
        for (std::size_t i = 0; i < p; ++i) {
            Rng candidate_rng = Rng::stream(root_seed, stream_index(i));
            const ParamSet& start =
                cfg.candidate_start == CandidateStart::Sequential ? current
                                                                  : state.best_params;
            const auto started = std::chrono::steady_clock::now();
            results[i] = epoch(start, state.population[i], candidate_rng);
            times[i] = seconds_since(started);
            if (cfg.candidate_start == CandidateStart::Sequential) {
                current = results[i].params;
            }
        }
    }

    // Merge in candidate-index order so ties and best-updates are identical
    // for serial and parallel evaluation.
    std::size_t successes = 0;
    for (std::size_t i = 0; i < p; ++i) {
        TraceRecord rec;
        rec.iteration = t;
        rec.candidate_index = i;
        rec.lr = state.population[i];
        rec.epoch_loss = results[i].epoch_loss;
        rec.epoch_loss_sum = results[i].epoch_loss_sum;
        rec.wall_time_s = times[i];
        if (!std::isfinite(results[i].epoch_loss)) {
            rec.failed = true;
        } else {
            ++successes;
            if (results[i].epoch_loss < state.best_loss) {
                state.best_loss = results[i].epoch_loss;
                state.best_lr = state.population[i];
                state.best_params = std::move(results[i].params);
                rec.is_best = true;
            }
        }
        trace.push_back(rec);
    }
    state.iteration = t;
    return successes;
}

void foxtsage_update_population(FoxtsageState& state, const FoxtsageConfig& cfg, Rng& rng) {
    for (double& candidate : state.population) {
        const double r = rng.next_unit();
        const double g = rng.gaussian() * cfg.gaussian_sigma;
        double next;
        if (r < 0.5) {
            next = state.best_lr * (1.0 + g);  // exploration
        } else {
            double denom = 1.0 + g;  // exploitation
            if (std::abs(denom) < cfg.denom_floor) {
                denom = std::copysign(cfg.denom_floor, denom);
            }
            next = state.best_lr / denom;
        }
        candidate = clip(next, cfg.lr_min, cfg.lr_max);
    }
}

double lr_decay(double lr_base, double alpha, double f_best) {
    if (alpha < 0.0) throw DomainError("lr_decay: alpha must be >= 0");
    if (f_best < 0.0) throw DomainError("lr_decay: f_best must be >= 0");
    return lr_base / (1.0 + alpha * f_best);
}

FoxtsageResult foxtsage_run(const FoxtsageConfig& cfg, const ParamSet& initial,
                            const EpochFn& epoch, std::uint64_t seed) {
    cfg.validate();
    Rng init_rng = Rng::stream(seed, 0);
    FoxtsageState state = foxtsage_init(cfg, init_rng);
    state.best_params = initial;
    Rng update_rng = Rng::stream(seed, 1);

    std::vector<TraceRecord> trace;
    trace.reserve(cfg.iterations * cfg.population_size);
    for (std::size_t t = 1; t <= cfg.iterations; ++t) {
        const std::size_t ok = foxtsage_evaluate_candidates(state, cfg, epoch, seed, trace);
        if (ok == 0) {
            std::ostringstream msg;
            msg << "foxtsage: every candidate diverged in iteration " << t;
            throw AllCandidatesFailed(msg.str(), std::move(trace));
        }
        if (cfg.apply_lr_decay) {
            state.best_lr =
                clip(lr_decay(cfg.lr_base, cfg.alpha, state.best_loss), cfg.lr_min, cfg.lr_max);
        }
        foxtsage_update_population(state, cfg, update_rng);
    }

    FoxtsageResult result;
    result.best_params = std::move(state.best_params);
    result.best_lr = state.best_lr;
    result.best_loss = state.best_loss;
    result.trace = std::move(trace);
    return result;
}

EpochFn make_sgd_epoch(const ModelSpec& spec, const LabeledDataset& data,
                       std::size_t batch_size) {
    Matrix y_onehot = one_hot(data.labels, data.num_classes);
    return [spec, &data, y = std::move(y_onehot), batch_size](const ParamSet& start, double lr,
                                                              Rng& rng) {
        return run_epoch(spec, data, y, batch_size, start, rng,
                         [lr](ParamSet& params, const Gradient& grad) {
                             params = sgd_step(params, grad, lr);
                         });
    };
}

TrainResult train_sgd(const ModelSpec& spec, const LabeledDataset& data,
                      const ParamSet& initial, double lr, std::size_t epochs,
                      std::size_t batch_size, Rng& rng) {
    const Matrix y_onehot = one_hot(data.labels, data.num_classes);
    TrainResult result;
    result.params = initial;
    for (std::size_t e = 0; e < epochs; ++e) {
        EpochResult er = run_epoch(spec, data, y_onehot, batch_size, std::move(result.params),
                                   rng, [lr](ParamSet& params, const Gradient& grad) {
                                       params = sgd_step(params, grad, lr);
                                   });
        result.params = std::move(er.params);
        result.epoch_losses.push_back(er.epoch_loss);
        result.epoch_loss_sums.push_back(er.epoch_loss_sum);
    }
    return result;
}

TrainResult train_adam(const ModelSpec& spec, const LabeledDataset& data,
                       const ParamSet& initial, const AdamConfig& cfg, std::size_t epochs,
                       std::size_t batch_size, Rng& rng) {
    cfg.validate();
    const Matrix y_onehot = one_hot(data.labels, data.num_classes);
    TrainResult result;
    result.params = initial;
    AdamState state = AdamState::zeros_like(initial);
    for (std::size_t e = 0; e < epochs; ++e) {
        EpochResult er =
            run_epoch(spec, data, y_onehot, batch_size, std::move(result.params), rng,
                      [&cfg, &state](ParamSet& params, const Gradient& grad) {
                          auto stepped = adam_step(params, grad, cfg, state);
                          params = std::move(stepped.first);
                          state = std::move(stepped.second);
                      });
        result.params = std::move(er.params);
        result.epoch_losses.push_back(er.epoch_loss);
        result.epoch_loss_sums.push_back(er.epoch_loss_sum);
    }
    return result;
}

}  // namespace foxbench
