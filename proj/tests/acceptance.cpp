// Acceptance gate: eight go/no-go checks against the published reference
// numbers and the toolkit's own invariants. Each criterion prints exactly
// one [PASS]/[FAIL] line; the exit status is the number of failures.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "foxbench/dataset.hpp"
#include "foxbench/error.hpp"
#include "foxbench/harness.hpp"
#include "foxbench/matrix.hpp"
#include "foxbench/metrics.hpp"
#include "foxbench/model.hpp"
#include "foxbench/optimizer.hpp"
#include "foxbench/rng.hpp"

using namespace foxbench;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

// Collects sub-checks for one criterion; the first failure is reported.
struct Checker {
    bool ok = true;
    std::string first_failure;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            first_failure = what;
        }
    }
};

void run_criterion(int index, const std::string& name, double budget_s,
                   void (*body)(Checker&)) {
    Checker c;
    const auto start = Clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.require(false, std::string("exception: ") + e.what());
    }
    const double elapsed =
        std::chrono::duration<double>(Clock::now() - start).count();
    if (budget_s > 0.0 && elapsed > budget_s) {
        std::ostringstream over;
        over << "runtime " << elapsed << " s exceeds budget " << budget_s << " s";
        c.require(false, over.str());
    }

    std::cout << (c.ok ? "[PASS]" : "[FAIL]") << " criterion " << index << ": " << name;
    std::cout << " (" << std::fixed;
    std::cout.precision(2);
    std::cout << elapsed << " s)";
    std::cout.unsetf(std::ios::fixed);
    std::cout.precision(6);
    const std::string extra = c.detail.str();
    if (!extra.empty()) std::cout << " — " << extra;
    if (!c.ok) std::cout << "\n       first failure: " << c.first_failure;
    std::cout << std::endl;
    if (!c.ok) ++failures;
}

// ---------------------------------------------------------------------------
// 1. Exact Wilcoxon p-values for n = 10 at W = 4, 7, 8, cross-checked by a
//    full enumeration of all 2^10 sign assignments.

void criterion_wilcoxon(Checker& c) {
    struct Case {
        std::vector<double> diffs;
        double w;
        double exact_p;   // dyadic rational, representable without rounding
        double table_p;   // published 6-decimal value
    };
    const std::vector<Case> cases{
        {{-1, 2, -3, 4, 5, 6, 7, 8, 9, 10}, 4.0, 14.0 / 1024.0, 0.013672},
        {{1, 2, -3, -4, 5, 6, 7, 8, 9, 10}, 7.0, 38.0 / 1024.0, 0.037109},
        {{1, 2, -3, 4, -5, 6, 7, 8, 9, 10}, 8.0, 50.0 / 1024.0, 0.048828},
    };

    for (const Case& cs : cases) {
        const WilcoxonResult res = wilcoxon_exact(cs.diffs);
        c.require(res.n == 10, "n != 10 after zero drop");
        c.require(res.w == cs.w, "unexpected W statistic");
        std::ostringstream bit;
        bit << "p for W=" << cs.w << " is " << res.p << ", want exactly " << cs.exact_p;
        c.require(res.p == cs.exact_p, bit.str());
        c.require(std::abs(res.p - cs.table_p) < 5e-7, "p drifted from the table value");

        // Independent enumeration: ranks are 1..10 (all magnitudes unique).
        std::size_t extreme = 0;
        for (std::size_t mask = 0; mask < 1024; ++mask) {
            double t_plus = 0.0;
            for (int k = 0; k < 10; ++k)
                if (mask & (std::size_t{1} << k)) t_plus += static_cast<double>(k + 1);
            if (std::min(t_plus, 55.0 - t_plus) <= cs.w) ++extreme;
        }
        c.require(res.p == static_cast<double>(extreme) / 1024.0,
                  "library p disagrees with the 2^10 enumeration");
    }
    c.detail << "p = 14/1024, 38/1024, 50/1024 exactly";
}

// ---------------------------------------------------------------------------
// 2. The twelve percentage-improvement entries of the published
//    Adam-vs-Foxtsage summary table, each within +/- 0.01.

void criterion_improvement_table(Checker& c) {
    struct Row {
        const char* key;
        double adam;
        double fox;
        double published;
    };
    const std::vector<Row> rows{
        {"loss_mean", 16.402, 9.508, 42.03},
        {"loss_std", 36.085, 20.86, 42.19},
        {"accuracy_mean", 0.899, 0.906, 0.78},
        {"accuracy_std", 0.087, 0.092, 5.75},
        {"precision_mean", 0.881, 0.889, 0.91},
        {"precision_std", 0.088, 0.095, 7.95},
        {"recall_mean", 0.88, 0.889, 1.02},
        {"recall_std", 0.089, 0.096, 7.87},
        {"f1_mean", 0.898, 0.906, 0.89},
        {"f1_std", 0.087, 0.092, 5.75},
        {"time_mean_s", 9.177, 39.541, -330.87},
        {"time_std_s", 5.578, 20.423, -266.13},
    };
    double worst = 0.0;
    for (const Row& row : rows) {
        const double got =
            percentage_improvement(row.adam, row.fox, metric_direction(row.key));
        const double err = std::abs(got - row.published);
        worst = std::max(worst, err);
        std::ostringstream msg;
        msg << row.key << ": got " << got << ", published " << row.published;
        c.require(err <= 0.01, msg.str());
    }
    c.detail << "12/12 rows, worst |error| " << worst;
}

// ---------------------------------------------------------------------------
// 3. Analytic gradients vs central finite differences on both architectures.

void criterion_gradients(Checker& c) {
    const double h = 1e-5;
    std::size_t coords = 0;
    double worst = 0.0;

    const auto check_model = [&](const ModelSpec& spec, std::uint64_t seed,
                                 std::size_t samples) {
        Rng rng(seed);
        ParamSet params = init_params(spec, rng);
        Matrix x(samples, spec.input_dim);
        for (double& v : x.data) v = rng.gaussian();
        std::vector<int> labels(samples);
        for (auto& l : labels)
            l = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(spec.num_classes)));
        const Matrix y = one_hot(labels, spec.num_classes);

        Rng unused(0);
        const BackwardResult res = backward(spec, params, x, y, Mode::Eval, unused);
        for (std::size_t k = 0; k < params.flat_size(); ++k) {
            const double saved = params.flat(k);
            params.flat(k) = saved + h;
            const double up = cross_entropy_loss(forward_eval(spec, params, x), y);
            params.flat(k) = saved - h;
            const double down = cross_entropy_loss(forward_eval(spec, params, x), y);
            params.flat(k) = saved;
            const double fd = (up - down) / (2.0 * h);
            const double analytic = res.grad.flat(k);
            const double rel = std::abs(analytic - fd) /
                               std::max({std::abs(analytic), std::abs(fd), 1e-8});
            worst = std::max(worst, rel);
            ++coords;
        }
    };

    check_model(ModelSpec::logreg(8, 4), 1001, 6);       // 36 coordinates
    check_model(ModelSpec::mlp(6, 5, 4, 3), 1002, 5);    // 74 coordinates

    std::ostringstream msg;
    msg << "max relative error " << worst << " over " << coords << " coordinates";
    c.require(coords >= 100, "fewer than 100 coordinates sampled");
    c.require(worst < 1e-5, msg.str());
    c.detail << msg.str();
}

// ---------------------------------------------------------------------------
// 4. Adam against an independent straight-line re-implementation, plus the
//    first-step magnitude property.

void criterion_adam_oracle(Checker& c) {
    const AdamConfig cfg;

    // 10 steps on f(x) = x^2, oracle written with plain scalars.
    {
        double x = 0.7, m = 0.0, v = 0.0;
        std::vector<double> want;
        for (int t = 1; t <= 10; ++t) {
            const double g = 2.0 * x;
            m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
            v = cfg.beta2 * v + (1.0 - cfg.beta2) * g * g;
            const double m_hat = m / (1.0 - std::pow(cfg.beta1, t));
            const double v_hat = v / (1.0 - std::pow(cfg.beta2, t));
            x -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
            want.push_back(x);
        }

        ParamSet p;
        p.tensors.push_back({"W1", Matrix(1, 1, 0.7)});
        AdamState st = AdamState::zeros_like(p);
        for (int t = 0; t < 10; ++t) {
            ParamSet g;
            g.tensors.push_back({"W1", Matrix(1, 1, 2.0 * p.flat(0))});
            auto [next, nst] = adam_step(p, g, cfg, st);
            p = next;
            st = nst;
            std::ostringstream msg;
            msg << "step " << t + 1 << ": " << p.flat(0) << " != oracle "
                << want[static_cast<std::size_t>(t)];
            c.require(p.flat(0) == want[static_cast<std::size_t>(t)], msg.str());
        }
    }

    // First-step magnitude: bias correction makes step one exactly
    // lr * |g| / (|g| + eps), i.e. within lr * eps / (|g| + eps) of lr.
    // That deviation is at most 1e-8 (absolute) for |g| >= 1e-3 — far inside
    // the 1e-6 window — and shrinks to a 1e-6 relative deviation by 1e-2.
    double worst_abs = 0.0, worst_rel_large = 0.0;
    for (const double g0 : {1e-3, 3e-3, 1e-2, 0.05, 0.1, 0.5, 1.0, 10.0}) {
        ParamSet p;
        p.tensors.push_back({"W1", Matrix(1, 1, 0.0)});
        ParamSet g;
        g.tensors.push_back({"W1", Matrix(1, 1, g0)});
        auto [next, nst] = adam_step(p, g, cfg, AdamState::zeros_like(p));
        const double mag = std::abs(next.flat(0));
        worst_abs = std::max(worst_abs, std::abs(mag - cfg.lr));
        if (g0 >= 1e-2)
            worst_rel_large = std::max(worst_rel_large, std::abs(mag - cfg.lr) / cfg.lr);
    }
    std::ostringstream msg;
    msg << "first-step |mag - lr|: worst " << worst_abs << " (|g| >= 1e-3), worst relative "
        << worst_rel_large << " (|g| >= 1e-2)";
    c.require(worst_abs < 1e-6, msg.str());
    c.require(worst_rel_large < 1e-6, msg.str());
    c.detail << "10-step trajectory bit-exact; " << msg.str();
}

// ---------------------------------------------------------------------------
// 5. MNIST logistic regression, Setting 1, five paired seeds.

void criterion_mnist_trend(Checker& c) {
    namespace fs = std::filesystem;
    const auto out_root = fs::temp_directory_path() / "foxbench_acceptance";
    fs::create_directories(out_root);

    ExperimentConfig base;
    base.dataset = "mnist";
    base.images_path = "data/mnist10k/mnist10k-images-idx3-ubyte";
    base.labels_path = "data/mnist10k/mnist10k-labels-idx1-ubyte";
    base.split_fraction = 0.8;
    base.model = "logreg";
    base.setting = 1;
    base.batch_size = 64;
    base.runs = 5;
    base.seed = 42;

    ExperimentConfig fox_cfg = base;
    fox_cfg.optimizer = "foxtsage";
    fox_cfg.out_dir = (out_root / "fox").string();
    ExperimentConfig adam_cfg = base;
    adam_cfg.optimizer = "adam";
    adam_cfg.out_dir = (out_root / "adam").string();

    const std::vector<RunRecord> fox = run_cell(fox_cfg);
    const std::vector<RunRecord> adam = run_cell(adam_cfg);
    c.require(fox.size() == 5 && adam.size() == 5, "expected 5 runs per cell");

    int fox_wins = 0;
    double acc_sum = 0.0, fox_loss_sum = 0.0, adam_loss_sum = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
        c.require(!fox[i].failed, "foxtsage run failed: " + fox[i].error);
        c.require(!adam[i].failed, "adam run failed: " + adam[i].error);
        if (fox[i].failed || adam[i].failed) return;
        if (fox[i].metrics.loss <= adam[i].metrics.loss) ++fox_wins;
        acc_sum += fox[i].metrics.accuracy;
        fox_loss_sum += fox[i].metrics.loss;
        adam_loss_sum += adam[i].metrics.loss;
    }
    const double fox_acc = acc_sum / 5.0;
    std::ostringstream msg;
    msg << "fox train loss <= adam in " << fox_wins << "/5 (fox mean "
        << fox_loss_sum / 5.0 << ", adam mean " << adam_loss_sum / 5.0
        << "); fox test accuracy " << fox_acc;
    c.require(fox_wins >= 4, msg.str());
    c.require(fox_acc >= 0.89, msg.str());
    c.detail << msg.str();
}

// ---------------------------------------------------------------------------
// 6. Foxtsage invariants over 200 randomized short runs.

void criterion_fox_invariants(Checker& c) {
    Rng meta(20240817);
    int parallel_runs = 0;

    for (int trial = 0; trial < 200 && c.ok; ++trial) {
        FoxtsageConfig cfg;
        cfg.population_size = 1 + meta.next_below(6);
        cfg.iterations = 1 + meta.next_below(6);
        cfg.gaussian_sigma = meta.uniform(0.2, 1.5);
        cfg.candidate_start =
            meta.next_unit() < 0.5 ? CandidateStart::Snapshot : CandidateStart::Sequential;

        const std::size_t dims = 1 + meta.next_below(4);
        std::vector<double> curvature(dims);
        for (auto& v : curvature) v = meta.uniform(0.1, 12.0);
        const int steps = 1 + static_cast<int>(meta.next_below(5));
        ParamSet initial;
        {
            Matrix m(1, dims);
            for (auto& v : m.data) v = meta.uniform(-3.0, 3.0);
            initial.tensors.push_back({"W1", std::move(m)});
        }
        const EpochFn epoch = [curvature, steps](const ParamSet& start, double lr, Rng&) {
            ParamSet p = start;
            for (int s = 0; s < steps; ++s)
                for (std::size_t k = 0; k < p.flat_size(); ++k)
                    p.flat(k) -= lr * 2.0 * curvature[k] * p.flat(k);
            double loss = 0.0;
            for (std::size_t k = 0; k < p.flat_size(); ++k)
                loss += curvature[k] * p.flat(k) * p.flat(k);
            EpochResult res;
            res.params = std::move(p);
            res.epoch_loss = loss;
            res.epoch_loss_sum = loss;
            return res;
        };

        const std::uint64_t seed = meta.next_u64();
        const FoxtsageResult a = foxtsage_run(cfg, initial, epoch, seed);
        const FoxtsageResult b = foxtsage_run(cfg, initial, epoch, seed);

        // Bounds for every evaluated rate, and a non-increasing running best:
        // a candidate is marked best exactly when it strictly improves.
        double running = std::numeric_limits<double>::infinity();
        for (const auto& rec : a.trace) {
            c.require(rec.lr >= cfg.lr_min && rec.lr <= cfg.lr_max,
                      "trace lr escaped the bounds");
            const bool improves = !rec.failed && rec.epoch_loss < running;
            c.require(rec.is_best == improves, "is_best flag out of step");
            if (improves) running = rec.epoch_loss;
        }
        c.require(a.best_loss == running, "result best_loss != trace running best");

        // Identical seed, identical numbers.
        c.require(a.trace.size() == b.trace.size(), "trace sizes differ");
        for (std::size_t i = 0; i < a.trace.size() && c.ok; ++i) {
            c.require(a.trace[i].lr == b.trace[i].lr &&
                          a.trace[i].epoch_loss == b.trace[i].epoch_loss &&
                          a.trace[i].is_best == b.trace[i].is_best &&
                          a.trace[i].failed == b.trace[i].failed,
                      "same-seed traces differ");
        }
        c.require(a.best_lr == b.best_lr && a.best_loss == b.best_loss,
                  "same-seed results differ");

        // Parallel evaluation must not change any emitted number.
        if (cfg.candidate_start == CandidateStart::Snapshot && cfg.population_size > 1) {
            FoxtsageConfig par = cfg;
            par.parallel = true;
            const FoxtsageResult pr = foxtsage_run(par, initial, epoch, seed);
            ++parallel_runs;
            c.require(pr.best_lr == a.best_lr && pr.best_loss == a.best_loss,
                      "parallel result differs from serial");
            c.require(pr.trace.size() == a.trace.size(), "parallel trace size differs");
            for (std::size_t i = 0; i < a.trace.size() && c.ok; ++i) {
                c.require(pr.trace[i].lr == a.trace[i].lr &&
                              pr.trace[i].epoch_loss == a.trace[i].epoch_loss &&
                              pr.trace[i].epoch_loss_sum == a.trace[i].epoch_loss_sum &&
                              pr.trace[i].is_best == a.trace[i].is_best,
                          "parallel trace differs from serial");
            }
            for (std::size_t k = 0; k < a.best_params.flat_size() && c.ok; ++k)
                c.require(pr.best_params.flat(k) == a.best_params.flat(k),
                          "parallel best params differ");
        }
    }
    c.detail << "200 runs, " << parallel_runs << " with a parallel twin";
}

// ---------------------------------------------------------------------------
// 7. Metric identities on 1,000 random confusion matrices.

void criterion_metric_identities(Checker& c) {
    Rng rng(777);
    for (int trial = 0; trial < 1000 && c.ok; ++trial) {
        const int classes = 2 + static_cast<int>(rng.next_below(5));
        const std::size_t n = 20 + rng.next_below(180);
        std::vector<int> truth(n), pred(n);
        for (std::size_t i = 0; i < n; ++i) {
            truth[i] = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(classes)));
            // Bias predictions toward the truth so diagonals dominate.
            pred[i] = rng.next_unit() < 0.6
                          ? truth[i]
                          : static_cast<int>(rng.next_below(static_cast<std::uint64_t>(classes)));
        }
        const ConfusionMatrix cm = ConfusionMatrix::from_labels(truth, pred, classes);

        // Accuracy against a per-sample count.
        long hits = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (truth[i] == pred[i]) ++hits;
        c.require(accuracy(cm) == static_cast<double>(hits) / static_cast<double>(n),
                  "accuracy != per-sample fraction");

        // Per-class F1 recomputed from first principles (harmonic mean of
        // the per-class precision and recall), macro averaged.
        double macro_f = 0.0;
        bool any_pr_equal = false;
        for (int k = 0; k < classes; ++k) {
            long tp = 0, fp = 0, fn = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (pred[i] == k && truth[i] == k) ++tp;
                if (pred[i] == k && truth[i] != k) ++fp;
                if (pred[i] != k && truth[i] == k) ++fn;
            }
            const double p = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp);
            const double r = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn);
            const double f = p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
            macro_f += f;
            if (p == r && p > 0.0) any_pr_equal = true;
            (void)any_pr_equal;
        }
        const PrecisionRecallF1 got = precision_recall_f1(cm, Averaging::Macro);
        c.require(std::abs(got.f1 - macro_f / classes) < 1e-12,
                  "macro F1 != hand computation");
    }

    // f1 == p when p == r: symmetric confusion counts force equality.
    Rng sym_rng(778);
    for (int trial = 0; trial < 50 && c.ok; ++trial) {
        const std::size_t classes = 2 + sym_rng.next_below(4);
        ConfusionMatrix cm(classes);
        for (std::size_t i = 0; i < classes; ++i) {
            cm.at(i, i) = 3 + static_cast<long>(sym_rng.next_below(20));
            for (std::size_t j = i + 1; j < classes; ++j) {
                const long off = static_cast<long>(sym_rng.next_below(6));
                cm.at(i, j) = off;  // FP for j == FN for j, mirrored
                cm.at(j, i) = off;
            }
        }
        const PrecisionRecallF1 prf = precision_recall_f1(cm, Averaging::Macro);
        c.require(prf.precision == prf.recall, "symmetric matrix broke p == r");
        c.require(std::abs(prf.f1 - prf.precision) < 1e-15,
                  "f1 != p despite p == r");
    }
    c.detail << "1000 random matrices + 50 symmetric p==r cases";
}

// ---------------------------------------------------------------------------
// 8. Dataset integrity: IDX round-trip and 80/20 split partition laws.

void criterion_dataset_integrity(Checker& c) {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "foxbench_acceptance";
    fs::create_directories(dir);

    // Bit-exact IDX round-trip on random byte-valued features.
    Rng rng(888);
    LabeledDataset ds;
    ds.features = Matrix(32, 16);
    for (auto& v : ds.features.data)
        v = static_cast<double>(rng.next_below(256)) / 255.0;
    for (int i = 0; i < 32; ++i)
        ds.labels.push_back(static_cast<int>(rng.next_below(10)));
    ds.num_classes = 10;
    ds.name = "mnist";
    const std::string imgs = (dir / "rt-images-idx3-ubyte").string();
    const std::string labs = (dir / "rt-labels-idx1-ubyte").string();
    write_mnist_idx(ds, imgs, labs, 4, 4);
    const LabeledDataset back = load_mnist_idx(imgs, labs);
    c.require(back.size() == ds.size() && back.dim() == ds.dim(),
              "round-trip changed the shape");
    c.require(back.labels == ds.labels, "round-trip changed the labels");
    for (std::size_t i = 0; i < ds.features.size() && c.ok; ++i)
        c.require(back.features.data[i] == ds.features.data[i],
                  "round-trip changed a pixel");

    // 100 random datasets: the 80/20 split is disjoint, exhaustive, and
    // seed-deterministic. Rows are tagged through feature 0.
    for (int trial = 0; trial < 100 && c.ok; ++trial) {
        const std::size_t n = 10 + rng.next_below(240);
        LabeledDataset pool;
        pool.features = Matrix(n, 3);
        pool.num_classes = 4;
        for (std::size_t i = 0; i < n; ++i) {
            pool.features(i, 0) = static_cast<double>(i);
            pool.features(i, 1) = rng.gaussian();
            pool.features(i, 2) = rng.gaussian();
            pool.labels.push_back(static_cast<int>(i % 4));
        }
        const std::uint64_t seed = rng.next_u64();
        Rng s1(seed);
        const Split sp = split_train_test(pool, 0.8, s1);
        c.require(sp.train.size() ==
                      static_cast<std::size_t>(static_cast<double>(n) * 0.8),
                  "train size != floor(0.8 n)");
        c.require(sp.train.size() + sp.test.size() == n, "split lost samples");

        std::set<long> seen;
        for (std::size_t i = 0; i < sp.train.size(); ++i)
            seen.insert(static_cast<long>(sp.train.features(i, 0)));
        for (std::size_t i = 0; i < sp.test.size(); ++i) {
            const long tag = static_cast<long>(sp.test.features(i, 0));
            c.require(seen.find(tag) == seen.end(), "train and test overlap");
            seen.insert(tag);
            c.require(sp.test.labels[i] == static_cast<int>(tag % 4),
                      "label detached from its row");
        }
        c.require(seen.size() == n, "split is not exhaustive");

        Rng s2(seed);
        const Split sp2 = split_train_test(pool, 0.8, s2);
        c.require(sp2.train.labels == sp.train.labels &&
                      sp2.test.labels == sp.test.labels,
                  "same seed produced a different split");
        for (std::size_t i = 0; i < sp.train.features.size() && c.ok; ++i)
            c.require(sp2.train.features.data[i] == sp.train.features.data[i],
                      "same seed produced different train rows");
    }
    c.detail << "round-trip exact; 100 split partitions verified";
}

}  // namespace

int main() {
    std::cout << "foxbench acceptance gate\n";
    run_criterion(1, "exact Wilcoxon reproduction", 1.0, criterion_wilcoxon);
    run_criterion(2, "improvement-table arithmetic", 1.0, criterion_improvement_table);
    run_criterion(3, "gradient correctness", 30.0, criterion_gradients);
    run_criterion(4, "Adam oracle", 0.0, criterion_adam_oracle);
    run_criterion(5, "MNIST logistic-regression trend", 900.0, criterion_mnist_trend);
    run_criterion(6, "population-search invariants", 300.0, criterion_fox_invariants);
    run_criterion(7, "metric identities", 0.0, criterion_metric_identities);
    run_criterion(8, "dataset integrity", 0.0, criterion_dataset_integrity);

    if (failures == 0) {
        std::cout << "all 8 criteria passed\n";
    } else {
        std::cout << failures << " criterion(s) failed\n";
    }
    return failures;
}
