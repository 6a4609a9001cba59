#include "foxbench/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "foxbench/error.hpp"

namespace foxbench {

namespace {

using nlohmann::json;

std::string iso_now() {
    const std::time_t tt = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const std::uint64_t v = std::stoull(value, &used);
        if (used == value.size()) return v;
    } catch (const std::exception&) {
    }
    throw DomainError("config: " + key + " wants an unsigned integer, got '" + value + "'");
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used == value.size()) return v;
    } catch (const std::exception&) {
    }
    throw DomainError("config: " + key + " wants a number, got '" + value + "'");
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw DomainError("config: " + key + " wants true/false, got '" + value + "'");
}

std::string format_double(double v) {
    std::ostringstream out;
    out << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
    return out.str();
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

ModelSpec make_model_spec(const ExperimentConfig& cfg, const LabeledDataset& train) {
    if (cfg.model == "logreg") return ModelSpec::logreg(train.dim(), train.num_classes);
    if (cfg.model == "mlp") {
        return ModelSpec::mlp(train.dim(), cfg.hidden1, cfg.hidden2, train.num_classes);
    }
    if (cfg.model == "logreg_dropout") {
        return ModelSpec::logreg_dropout(train.dim(), train.num_classes, cfg.dropout_rate);
    }
    throw DomainError("config: unknown model '" + cfg.model + "'");
}

// Per-iteration running-best curve (mean and sum form) from a foxtsage trace.
void best_curve_from_trace(const std::vector<TraceRecord>& trace,
                           std::vector<double>& best_by_iter,
                           std::vector<double>& best_sum_by_iter) {
    double best = std::numeric_limits<double>::infinity();
    double best_sum = std::numeric_limits<double>::infinity();
    std::size_t current_iter = 0;
    for (const auto& rec : trace) {
        if (rec.iteration != current_iter) {
            if (current_iter != 0) {
                best_by_iter.push_back(best);
                best_sum_by_iter.push_back(best_sum);
            }
            current_iter = rec.iteration;
        }
        if (rec.is_best) {
            best = rec.epoch_loss;
            best_sum = rec.epoch_loss_sum;
        }
    }
    if (current_iter != 0) {
        best_by_iter.push_back(best);
        best_sum_by_iter.push_back(best_sum);
    }
}

void to_json(json& j, const TraceRecord& rec) {
    j = json{{"iteration", rec.iteration},
             {"candidate_index", rec.candidate_index},
             {"lr", rec.lr},
             {"epoch_loss", rec.epoch_loss},
             {"epoch_loss_sum", rec.epoch_loss_sum},
             {"is_best", rec.is_best},
             {"failed", rec.failed},
             {"wall_time_s", rec.wall_time_s}};
}

void from_json(const json& j, TraceRecord& rec) {
    j.at("iteration").get_to(rec.iteration);
    j.at("candidate_index").get_to(rec.candidate_index);
    j.at("lr").get_to(rec.lr);
    j.at("epoch_loss").get_to(rec.epoch_loss);
    j.at("epoch_loss_sum").get_to(rec.epoch_loss_sum);
    j.at("is_best").get_to(rec.is_best);
    j.at("failed").get_to(rec.failed);
    j.at("wall_time_s").get_to(rec.wall_time_s);
}

json run_to_json(const RunRecord& rec) {
    json trace = json::array();
    for (const auto& t : rec.trace) {
        json jt;
        to_json(jt, t);
        trace.push_back(std::move(jt));
    }
    return json{{"fingerprint", rec.fingerprint},
                {"optimizer", rec.optimizer},
                {"run_index", rec.run_index},
                {"seed", rec.seed},
                {"failed", rec.failed},
                {"error", rec.error},
                {"started_at", rec.started_at},
                {"wall_time_s", rec.wall_time_s},
                {"best_lr", rec.best_lr},
                {"epoch_losses", rec.epoch_losses},
                {"epoch_loss_sums", rec.epoch_loss_sums},
                {"metrics",
                 json{{"loss", rec.metrics.loss},
                      {"accuracy", rec.metrics.accuracy},
                      {"precision", rec.metrics.precision},
                      {"recall", rec.metrics.recall},
                      {"f1", rec.metrics.f1},
                      {"time_s", rec.metrics.time_s}}},
                {"trace", std::move(trace)}};
}

RunRecord run_from_json(const json& j) {
    RunRecord rec;
    j.at("fingerprint").get_to(rec.fingerprint);
    j.at("optimizer").get_to(rec.optimizer);
    j.at("run_index").get_to(rec.run_index);
    j.at("seed").get_to(rec.seed);
    j.at("failed").get_to(rec.failed);
    j.at("error").get_to(rec.error);
    j.at("started_at").get_to(rec.started_at);
    j.at("wall_time_s").get_to(rec.wall_time_s);
    j.at("best_lr").get_to(rec.best_lr);
    j.at("epoch_losses").get_to(rec.epoch_losses);
    j.at("epoch_loss_sums").get_to(rec.epoch_loss_sums);
    const json& m = j.at("metrics");
    m.at("loss").get_to(rec.metrics.loss);
    m.at("accuracy").get_to(rec.metrics.accuracy);
    m.at("precision").get_to(rec.metrics.precision);
    m.at("recall").get_to(rec.metrics.recall);
    m.at("f1").get_to(rec.metrics.f1);
    m.at("time_s").get_to(rec.metrics.time_s);
    for (const auto& jt : j.at("trace")) {
        TraceRecord t;
        from_json(jt, t);
        rec.trace.push_back(t);
    }
    return rec;
}

RunRecord execute_run(const ExperimentConfig& cfg, const ModelSpec& spec, const Split& split,
                      const std::string& fingerprint, std::size_t run_index) {
    RunRecord rec;
    rec.fingerprint = fingerprint;
    rec.optimizer = cfg.optimizer;
    rec.run_index = run_index;
    rec.seed = cfg.seed ^ static_cast<std::uint64_t>(run_index);
    rec.started_at = iso_now();

    const auto started = std::chrono::steady_clock::now();
    try {
        Rng init_rng = Rng::stream(rec.seed, 1);
        ParamSet params = init_params(spec, init_rng);

        if (cfg.optimizer == "foxtsage") {
            const EpochFn epoch = make_sgd_epoch(spec, split.train, cfg.batch_size);
            FoxtsageResult fox =
                foxtsage_run(cfg.fox, params, epoch, derive_stream_seed(rec.seed, 2));
            params = std::move(fox.best_params);
            rec.best_lr = fox.best_lr;
            rec.trace = std::move(fox.trace);
            best_curve_from_trace(rec.trace, rec.epoch_losses, rec.epoch_loss_sums);
        } else if (cfg.optimizer == "sgd") {
            Rng train_rng = Rng::stream(rec.seed, 3);
            TrainResult tr = train_sgd(spec, split.train, params, cfg.sgd_lr,
                                       cfg.baseline_epochs(), cfg.batch_size, train_rng);
            params = std::move(tr.params);
            rec.epoch_losses = std::move(tr.epoch_losses);
            rec.epoch_loss_sums = std::move(tr.epoch_loss_sums);
        } else if (cfg.optimizer == "adam") {
            Rng train_rng = Rng::stream(rec.seed, 3);
            TrainResult tr = train_adam(spec, split.train, params, cfg.adam,
                                        cfg.baseline_epochs(), cfg.batch_size, train_rng);
            params = std::move(tr.params);
            rec.epoch_losses = std::move(tr.epoch_losses);
            rec.epoch_loss_sums = std::move(tr.epoch_loss_sums);
        } else {
            throw DomainError("config: unknown optimizer '" + cfg.optimizer + "'");
        }
        rec.wall_time_s = seconds_since(started);

        // Training loss at the final parameters (full train split), the
        // classification metrics on the held-out test split.
        const Matrix y_train = one_hot(split.train.labels, split.train.num_classes);
        const double train_loss =
            cross_entropy_loss(forward_eval(spec, params, split.train.features), y_train);
        if (!std::isfinite(train_loss)) {
            throw DomainError("training diverged: non-finite final loss");
        }
        const std::vector<int> predicted =
            predict_labels(forward_eval(spec, params, split.test.features));
        const ConfusionMatrix cm = ConfusionMatrix::from_labels(
            split.test.labels, predicted, split.test.num_classes);
        const PrecisionRecallF1 prf = precision_recall_f1(cm, Averaging::Macro);

        rec.metrics.loss = train_loss;
        rec.metrics.accuracy = accuracy(cm);
        rec.metrics.precision = prf.precision;
        rec.metrics.recall = prf.recall;
        rec.metrics.f1 = prf.f1;
        rec.metrics.time_s = rec.wall_time_s;
    } catch (const AllCandidatesFailed& e) {
        rec.failed = true;
        rec.error = e.what();
        rec.trace = e.trace;
        rec.wall_time_s = seconds_since(started);
    } catch (const std::exception& e) {
        rec.failed = true;
        rec.error = e.what();
        rec.wall_time_s = seconds_since(started);
    }
    return rec;
}

void persist_cell(const ExperimentConfig& cfg, const std::vector<RunRecord>& records) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);

    {
        json all = json::array();
        for (const auto& rec : records) all.push_back(run_to_json(rec));
        std::ofstream out(cfg.out_dir + "/records.json");
        if (!out) throw IoError("cannot write " + cfg.out_dir + "/records.json");
        out << all.dump(2) << '\n';
    }
    {
        std::ofstream out(cfg.out_dir + "/metrics.csv");
        if (!out) throw IoError("cannot write " + cfg.out_dir + "/metrics.csv");
        out << "run,seed,failed,loss,accuracy,precision,recall,f1,time_s,best_lr\n";
        for (const auto& rec : records) {
            out << rec.run_index << ',' << rec.seed << ',' << (rec.failed ? 1 : 0) << ','
                << format_double(rec.metrics.loss) << ',' << format_double(rec.metrics.accuracy)
                << ',' << format_double(rec.metrics.precision) << ','
                << format_double(rec.metrics.recall) << ',' << format_double(rec.metrics.f1)
                << ',' << format_double(rec.metrics.time_s) << ','
                << format_double(rec.best_lr) << '\n';
        }
    }
    {
        std::ofstream out(cfg.out_dir + "/curves.csv");
        if (!out) throw IoError("cannot write " + cfg.out_dir + "/curves.csv");
        out << "run,epoch,loss_mean,loss_sum\n";
        for (const auto& rec : records) {
            for (std::size_t e = 0; e < rec.epoch_losses.size(); ++e) {
                out << rec.run_index << ',' << e + 1 << ','
                    << format_double(rec.epoch_losses[e]) << ','
                    << format_double(rec.epoch_loss_sums[e]) << '\n';
            }
        }
    }
    {
        std::ofstream out(cfg.out_dir + "/config.txt");
        if (!out) throw IoError("cannot write " + cfg.out_dir + "/config.txt");
        out << "# fingerprint " << config_fingerprint(cfg) << '\n';
        for (const auto& [key, value] : config_items(cfg)) {
            out << key << " = " << value << '\n';
        }
    }
}

}  // namespace

void ExperimentConfig::validate() const {
    if (dataset != "synth" && dataset != "csv" && dataset != "mnist") {
        throw DomainError("config: unknown dataset '" + dataset + "'");
    }
    if (model != "logreg" && model != "mlp" && model != "logreg_dropout") {
        throw DomainError("config: unknown model '" + model + "'");
    }
    if (optimizer != "foxtsage" && optimizer != "sgd" && optimizer != "adam") {
        throw DomainError("config: unknown optimizer '" + optimizer + "'");
    }
    if (setting != 0 && setting != 1 && setting != 2) {
        throw DomainError("config: setting must be 0 (custom), 1, or 2");
    }
    if (dataset == "mnist" && (images_path.empty() || labels_path.empty())) {
        throw DomainError("config: mnist needs dataset.images and dataset.labels");
    }
    if (dataset == "csv" && csv_path.empty()) {
        throw DomainError("config: csv needs dataset.csv");
    }
    if (runs < 1) throw BoundsError("config: runs must be >= 1");
    if (batch_size < 1) throw BoundsError("config: batch must be >= 1");
    if (!(split_fraction > 0.0 && split_fraction < 1.0)) {
        throw BoundsError("config: dataset.split must lie in (0,1)");
    }
    if (!(sgd_lr > 0.0)) throw BoundsError("config: sgd.lr must be positive");
    fox.validate();
    adam.validate();
}

void ExperimentConfig::apply_setting() {
    if (setting == 1) {
        fox.iterations = 5;
        fox.population_size = 10;
    } else if (setting == 2) {
        fox.iterations = 50;
        fox.population_size = 30;
    } else if (setting != 0) {
        throw DomainError("config: setting must be 0 (custom), 1, or 2");
    }
    // setting 0 keeps the fox.* values as configured
}

std::size_t ExperimentConfig::baseline_epochs() const {
    if (epochs > 0) return epochs;
    if (equal_budget) return fox.iterations * fox.population_size;
    return fox.iterations;
}

std::vector<std::pair<std::string, std::string>> config_items(const ExperimentConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> items;
    const auto add = [&](const std::string& k, const std::string& v) {
        items.emplace_back(k, v);
    };
    add("dataset", cfg.dataset);
    add("dataset.images", cfg.images_path);
    add("dataset.labels", cfg.labels_path);
    add("dataset.test_images", cfg.test_images_path);
    add("dataset.test_labels", cfg.test_labels_path);
    add("dataset.csv", cfg.csv_path);
    add("dataset.subsample", std::to_string(cfg.subsample_n));
    add("dataset.split", format_double(cfg.split_fraction));
    add("synth.n", std::to_string(cfg.synth_n));
    add("synth.d", std::to_string(cfg.synth_d));
    add("synth.separation", format_double(cfg.synth_separation));
    add("model", cfg.model);
    add("model.hidden1", std::to_string(cfg.hidden1));
    add("model.hidden2", std::to_string(cfg.hidden2));
    add("model.dropout", format_double(cfg.dropout_rate));
    add("optimizer", cfg.optimizer);
    add("setting", std::to_string(cfg.setting));
    add("fox.iterations", std::to_string(cfg.fox.iterations));
    add("fox.population", std::to_string(cfg.fox.population_size));
    add("fox.lr_min", format_double(cfg.fox.lr_min));
    add("fox.lr_max", format_double(cfg.fox.lr_max));
    add("fox.lr_base", format_double(cfg.fox.lr_base));
    add("fox.alpha", format_double(cfg.fox.alpha));
    add("fox.sigma", format_double(cfg.fox.gaussian_sigma));
    add("fox.denom_floor", format_double(cfg.fox.denom_floor));
    add("fox.candidate_start",
        cfg.fox.candidate_start == CandidateStart::Snapshot ? "snapshot" : "sequential");
    add("fox.lr_decay", cfg.fox.apply_lr_decay ? "true" : "false");
    add("fox.parallel", cfg.fox.parallel ? "true" : "false");
    add("adam.lr", format_double(cfg.adam.lr));
    add("adam.beta1", format_double(cfg.adam.beta1));
    add("adam.beta2", format_double(cfg.adam.beta2));
    add("adam.epsilon", format_double(cfg.adam.epsilon));
    add("sgd.lr", format_double(cfg.sgd_lr));
    add("epochs", std::to_string(cfg.epochs));
    add("equal_budget", cfg.equal_budget ? "true" : "false");
    add("batch", std::to_string(cfg.batch_size));
    add("runs", std::to_string(cfg.runs));
    add("seed", std::to_string(cfg.seed));
    add("out", cfg.out_dir);
    return items;
}

void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "dataset") cfg.dataset = value;
    else if (key == "dataset.images") cfg.images_path = value;
    else if (key == "dataset.labels") cfg.labels_path = value;
    else if (key == "dataset.test_images") cfg.test_images_path = value;
    else if (key == "dataset.test_labels") cfg.test_labels_path = value;
    else if (key == "dataset.csv") cfg.csv_path = value;
    else if (key == "dataset.subsample") cfg.subsample_n = parse_u64(key, value);
    else if (key == "dataset.split") cfg.split_fraction = parse_double(key, value);
    else if (key == "synth.n") cfg.synth_n = parse_u64(key, value);
    else if (key == "synth.d") cfg.synth_d = parse_u64(key, value);
    else if (key == "synth.separation") cfg.synth_separation = parse_double(key, value);
    else if (key == "model") cfg.model = value;
    else if (key == "model.hidden1") cfg.hidden1 = parse_u64(key, value);
    else if (key == "model.hidden2") cfg.hidden2 = parse_u64(key, value);
    else if (key == "model.dropout") cfg.dropout_rate = parse_double(key, value);
    else if (key == "optimizer") cfg.optimizer = value;
    else if (key == "setting") cfg.setting = static_cast<int>(parse_u64(key, value));
    else if (key == "fox.iterations") cfg.fox.iterations = parse_u64(key, value);
    else if (key == "fox.population") cfg.fox.population_size = parse_u64(key, value);
    else if (key == "fox.lr_min") cfg.fox.lr_min = parse_double(key, value);
    else if (key == "fox.lr_max") cfg.fox.lr_max = parse_double(key, value);
    else if (key == "fox.lr_base") cfg.fox.lr_base = parse_double(key, value);
    else if (key == "fox.alpha") cfg.fox.alpha = parse_double(key, value);
    else if (key == "fox.sigma") cfg.fox.gaussian_sigma = parse_double(key, value);
    else if (key == "fox.denom_floor") cfg.fox.denom_floor = parse_double(key, value);
    else if (key == "fox.candidate_start") {
        if (value == "snapshot") cfg.fox.candidate_start = CandidateStart::Snapshot;
        else if (value == "sequential") cfg.fox.candidate_start = CandidateStart::Sequential;
        else throw DomainError("config: fox.candidate_start wants snapshot|sequential");
    } else if (key == "fox.lr_decay") cfg.fox.apply_lr_decay = parse_bool(key, value);
    else if (key == "fox.parallel") cfg.fox.parallel = parse_bool(key, value);
    else if (key == "adam.lr") cfg.adam.lr = parse_double(key, value);
    else if (key == "adam.beta1") cfg.adam.beta1 = parse_double(key, value);
    else if (key == "adam.beta2") cfg.adam.beta2 = parse_double(key, value);
    else if (key == "adam.epsilon") cfg.adam.epsilon = parse_double(key, value);
    else if (key == "sgd.lr") cfg.sgd_lr = parse_double(key, value);
    else if (key == "epochs") cfg.epochs = parse_u64(key, value);
    else if (key == "equal_budget") cfg.equal_budget = parse_bool(key, value);
    else if (key == "batch") cfg.batch_size = parse_u64(key, value);
    else if (key == "runs") cfg.runs = parse_u64(key, value);
    else if (key == "seed") cfg.seed = parse_u64(key, value);
    else if (key == "out") cfg.out_dir = value;
    else throw DomainError("config: unknown key '" + key + "'");
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    ExperimentConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            std::ostringstream msg;
            msg << path << ": line " << line_no << " is not key = value";
            throw FormatError(msg.str());
        }
        apply_override(cfg, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
    return cfg;
}

std::string config_fingerprint(const ExperimentConfig& cfg) {
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a 64
    const auto mix = [&](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ULL;
        }
    };
    for (const auto& [key, value] : config_items(cfg)) {
        mix(key);
        mix("=");
        mix(value);
        mix("\n");
    }
    std::ostringstream out;
    out << std::hex << std::setfill('0') << std::setw(16) << h;
    return out.str();
}

std::string resolve_data_path(const std::string& path) {
    namespace fs = std::filesystem;
    if (path.empty() || fs::exists(path)) return path;
    if (const char* base = std::getenv("FOXBENCH_DATA_DIR")) {
        const fs::path joined = fs::path(base) / path;
        if (fs::exists(joined)) return joined.string();
        throw IoError("data file not found: '" + path + "' (also tried '" +
                      joined.string() + "')");
    }
    throw IoError("data file not found: '" + path +
                  "' (set FOXBENCH_DATA_DIR to search another root)");
}

Split prepare_data(const ExperimentConfig& cfg) {
    Rng data_rng = Rng::stream(cfg.seed, 0);
    if (cfg.dataset == "mnist" && !cfg.test_images_path.empty()) {
        // Canonical pre-split files; subsampling shrinks only the train side.
        Split split;
        split.train = load_mnist_idx(resolve_data_path(cfg.images_path),
                                     resolve_data_path(cfg.labels_path));
        split.test = load_mnist_idx(resolve_data_path(cfg.test_images_path),
                                    resolve_data_path(cfg.test_labels_path));
        split.fraction =
            static_cast<double>(split.train.size()) /
            static_cast<double>(split.train.size() + split.test.size());
        if (cfg.subsample_n > 0) {
            split.train = subsample(split.train, cfg.subsample_n, data_rng);
        }
        return split;
    }

    LabeledDataset pool;
    if (cfg.dataset == "mnist") {
        pool = load_mnist_idx(resolve_data_path(cfg.images_path),
                              resolve_data_path(cfg.labels_path));
    } else if (cfg.dataset == "csv") {
        pool = load_csv(resolve_data_path(cfg.csv_path));
    } else {
        pool = synth_binary(cfg.synth_n, cfg.synth_d, cfg.synth_separation, data_rng);
    }
    if (cfg.subsample_n > 0) pool = subsample(pool, cfg.subsample_n, data_rng);
    return split_train_test(pool, cfg.split_fraction, data_rng);
}

std::vector<RunRecord> run_cell(const ExperimentConfig& raw) {
    ExperimentConfig cfg = raw;
    cfg.apply_setting();
    cfg.validate();

    const Split split = prepare_data(cfg);
    const ModelSpec spec = make_model_spec(cfg, split.train);
    const std::string fingerprint = config_fingerprint(cfg);

    std::vector<RunRecord> records;
    records.reserve(cfg.runs);
    for (std::size_t i = 0; i < cfg.runs; ++i) {
        records.push_back(execute_run(cfg, spec, split, fingerprint, i));
    }
    persist_cell(cfg, records);
    return records;
}

std::vector<RunRecord> load_records(const std::string& dir) {
    const std::string path = dir + "/records.json";
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    json all;
    try {
        in >> all;
    } catch (const json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
    std::vector<RunRecord> records;
    for (const auto& j : all) records.push_back(run_from_json(j));
    return records;
}

Comparison compare(const std::vector<RunRecord>& baseline,
                   const std::vector<RunRecord>& candidate) {
    if (baseline.empty() || candidate.empty()) {
        throw DomainError("compare: both cells need at least one run");
    }
    if (baseline.size() != candidate.size()) {
        std::ostringstream msg;
        msg << "compare: cell sizes differ (" << baseline.size() << " vs "
            << candidate.size() << "), runs cannot be paired";
        throw PairingError(msg.str());
    }

    const auto successful = [](const std::vector<RunRecord>& records) {
        std::vector<RunMetrics> out;
        for (const auto& r : records) {
            if (!r.failed) out.push_back(r.metrics);
        }
        return out;
    };
    const std::vector<RunMetrics> metrics_a = successful(baseline);
    const std::vector<RunMetrics> metrics_b = successful(candidate);
    if (metrics_a.empty() || metrics_b.empty()) {
        throw DomainError("compare: a cell has no successful runs");
    }

    Comparison cmp;
    cmp.label_baseline = baseline.front().optimizer;
    cmp.label_candidate = candidate.front().optimizer;
    cmp.baseline = aggregate(metrics_a);
    cmp.candidate = aggregate(metrics_b);

    const std::vector<MetricRow> rows_a = report_rows(cmp.baseline);
    const std::vector<MetricRow> rows_b = report_rows(cmp.candidate);
    for (std::size_t i = 0; i < rows_a.size(); ++i) {
        ComparisonRow row;
        row.key = rows_a[i].key;
        row.display = rows_a[i].display;
        row.baseline = rows_a[i].value;
        row.candidate = rows_b[i].value;
        if (row.baseline == 0.0) {
            row.improvement_pct =
                row.candidate == 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
        } else {
            row.improvement_pct = percentage_improvement(row.baseline, row.candidate,
                                                         metric_direction(row.key));
        }
        cmp.rows.push_back(row);
    }

    cmp.time_ratio = cmp.baseline.time_mean_s > 0.0
                         ? cmp.candidate.time_mean_s / cmp.baseline.time_mean_s
                         : std::numeric_limits<double>::quiet_NaN();

    // Paired tests over runs where both sides succeeded, matched by index.
    const struct {
        const char* key;
        double RunMetrics::* field;
    } paired_fields[] = {
        {"loss", &RunMetrics::loss},       {"accuracy", &RunMetrics::accuracy},
        {"precision", &RunMetrics::precision}, {"recall", &RunMetrics::recall},
        {"f1", &RunMetrics::f1},           {"time_s", &RunMetrics::time_s},
    };
    for (const auto& field : paired_fields) {
        std::vector<double> diffs;
        for (std::size_t i = 0; i < baseline.size(); ++i) {
            if (baseline[i].failed || candidate[i].failed) continue;
            diffs.push_back(candidate[i].metrics.*field.field -
                            baseline[i].metrics.*field.field);
        }
        if (diffs.size() < 2) continue;
        PairedTest test;
        test.key = field.key;
        try {
            const WilcoxonResult w = wilcoxon_exact(diffs);
            test.w = w.w;
            test.p = w.p;
            test.n = w.n;
        } catch (const DomainError&) {
            // All differences zero (or too few nonzero): no evidence either way.
            test.degenerate = true;
            test.p = 1.0;
            test.n = diffs.size();
        }
        cmp.tests.push_back(test);
    }
    return cmp;
}

std::string emit_report(const Comparison& cmp, const std::string& format,
                        const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    if (format == "json") {
        json rows = json::array();
        for (const auto& row : cmp.rows) {
            rows.push_back(json{{"key", row.key},
                                {"display", row.display},
                                {"baseline", row.baseline},
                                {"candidate", row.candidate},
                                {"improvement_pct", row.improvement_pct}});
        }
        json tests = json::array();
        for (const auto& t : cmp.tests) {
            tests.push_back(json{{"key", t.key},
                                 {"w", t.w},
                                 {"p", t.p},
                                 {"n", t.n},
                                 {"degenerate", t.degenerate}});
        }
        const json doc{{"baseline", cmp.label_baseline},
                       {"candidate", cmp.label_candidate},
                       {"time_ratio", cmp.time_ratio},
                       {"rows", std::move(rows)},
                       {"tests", std::move(tests)}};
        const std::string path = out_dir + "/comparison.json";
        std::ofstream out(path);
        if (!out) throw IoError("cannot write " + path);
        out << doc.dump(2) << '\n';
        return path;
    }

    if (format == "csv") {
        const std::string path = out_dir + "/comparison.csv";
        std::ofstream out(path);
        if (!out) throw IoError("cannot write " + path);
        out << "metric," << cmp.label_baseline << ',' << cmp.label_candidate
            << ",improvement_pct\n";
        for (const auto& row : cmp.rows) {
            out << row.key << ',' << format_double(row.baseline) << ','
                << format_double(row.candidate) << ',' << format_double(row.improvement_pct)
                << '\n';
        }
        const std::string tests_path = out_dir + "/comparison_tests.csv";
        std::ofstream tests(tests_path);
        if (!tests) throw IoError("cannot write " + tests_path);
        tests << "metric,w,p,n,degenerate\n";
        for (const auto& t : cmp.tests) {
            tests << t.key << ',' << format_double(t.w) << ',' << format_double(t.p) << ','
                  << t.n << ',' << (t.degenerate ? 1 : 0) << '\n';
        }
        return path;
    }

    if (format == "md") {
        const std::string path = out_dir + "/comparison.md";
        std::ofstream out(path);
        if (!out) throw IoError("cannot write " + path);
        out << "| Metric | " << cmp.label_baseline << " | " << cmp.label_candidate
            << " | Improvement (%) |\n|---|---|---|---|\n";
        out << std::setprecision(6);
        for (const auto& row : cmp.rows) {
            out << "| " << row.display << " | " << row.baseline << " | " << row.candidate
                << " | " << row.improvement_pct << " |\n";
        }
        out << "\nTime ratio (" << cmp.label_candidate << " / " << cmp.label_baseline
            << "): " << cmp.time_ratio << "\n";
        if (!cmp.tests.empty()) {
            out << "\n| Paired test | W | p | n |\n|---|---|---|---|\n";
            for (const auto& t : cmp.tests) {
                out << "| " << t.key << " | " << t.w << " | " << t.p << " | " << t.n
                    << (t.degenerate ? " (degenerate)" : "") << " |\n";
            }
        }
        return path;
    }

    throw DomainError("emit_report: unknown format '" + format + "' (csv|json|md)");
}

int selftest(std::ostream& out) {
    int failures = 0;
    const auto check = [&](const char* name, bool ok) {
        out << (ok ? "ok   " : "FAIL ") << name << '\n';
        if (!ok) ++failures;
    };

    {
        Rng a(7), b(7);
        bool same = true;
        for (int i = 0; i < 5; ++i) same = same && a.next_u64() == b.next_u64();
        check("rng determinism", same);
    }
    {
        // Gradient probe: analytic vs central finite differences.
        const ModelSpec spec = ModelSpec::logreg(5, 3);
        Rng rng(11);
        ParamSet params = init_params(spec, rng);
        Matrix x(4, 5);
        for (double& v : x.data) v = rng.gaussian();
        const Matrix y = one_hot({0, 2, 1, 0}, 3);
        Rng unused(0);
        const BackwardResult br = backward(spec, params, x, y, Mode::Eval, unused);
        double max_rel = 0.0;
        const double h = 1e-5;
        for (std::size_t k = 0; k < params.flat_size(); ++k) {
            const double saved = params.flat(k);
            params.flat(k) = saved + h;
            const double up = cross_entropy_loss(forward_eval(spec, params, x), y);
            params.flat(k) = saved - h;
            const double down = cross_entropy_loss(forward_eval(spec, params, x), y);
            params.flat(k) = saved;
            const double fd = (up - down) / (2.0 * h);
            const double denom = std::max(std::abs(fd), 1e-8);
            max_rel = std::max(max_rel, std::abs(br.grad.flat(k) - fd) / denom);
        }
        check("gradient matches finite differences", max_rel < 1e-5);
    }
    {
        const WilcoxonResult w = wilcoxon_exact({-1, 2, -3, 4, 5, 6, 7, 8, 9, 10});
        check("wilcoxon exact statistic", w.w == 4.0 && std::abs(w.p - 0.013672) < 1e-6);
    }
    {
        const MetricsReport r = aggregate({{0.2, 0, 0, 0, 0, 0}, {0.4, 0, 0, 0, 0, 0}});
        check("aggregate mean/std", std::abs(r.loss_mean - 0.3) < 1e-12 &&
                                        std::abs(r.loss_std - 0.1414213562373095) < 1e-12);
    }
    {
        // One tiny deterministic foxtsage run on a quadratic, twice.
        FoxtsageConfig cfg;
        cfg.population_size = 4;
        cfg.iterations = 3;
        const EpochFn epoch = [](const ParamSet& start, double lr, Rng&) {
            ParamSet p = start;
            double& x = p.tensors[0].value(0, 0);
            for (int i = 0; i < 10; ++i) x -= lr * 2.0 * x;  // d/dx x^2
            EpochResult r;
            r.params = std::move(p);
            r.epoch_loss = r.params.tensors[0].value(0, 0) *
                           r.params.tensors[0].value(0, 0);
            r.epoch_loss_sum = r.epoch_loss;
            return r;
        };
        ParamSet initial;
        initial.tensors.push_back({"x", Matrix(1, 1, 3.0)});
        const FoxtsageResult r1 = foxtsage_run(cfg, initial, epoch, 99);
        const FoxtsageResult r2 = foxtsage_run(cfg, initial, epoch, 99);
        check("foxtsage determinism",
              r1.best_loss == r2.best_loss && r1.best_lr == r2.best_lr &&
                  r1.best_loss < 9.0);
    }
    out << (failures == 0 ? "selftest passed" : "selftest FAILED") << '\n';
    return failures;
}

}  // namespace foxbench
