#include "foxbench/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "foxbench/error.hpp"

namespace foxbench {

namespace {

// Dense affine layer: x (N x D) * w (D x C) + b (1 x C), row-broadcast bias.
Matrix affine(const Matrix& x, const Matrix& w, const Matrix& b) {
    Matrix out = matmul(x, w);
    for (std::size_t i = 0; i < out.rows; ++i) {
        for (std::size_t j = 0; j < out.cols; ++j) out(i, j) += b(0, j);
    }
    return out;
}

Matrix column_sums(const Matrix& m) {
    Matrix out(1, m.cols);
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) out(0, j) += m(i, j);
    }
    return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "hadamard");
    Matrix out = a;
    for (std::size_t k = 0; k < out.size(); ++k) out.data[k] *= b.data[k];
    return out;
}

// Inverted dropout mask: entries are 0 (dropped) or 1/(1-rate), so eval mode
// needs no rescaling.
Matrix dropout_mask(std::size_t rows, std::size_t cols, double rate, Rng& rng) {
    Matrix mask(rows, cols, 1.0);
    if (rate <= 0.0) return mask;
    const double keep_scale = 1.0 / (1.0 - rate);
    for (std::size_t k = 0; k < mask.size(); ++k) {
        mask.data[k] = rng.next_unit() < rate ? 0.0 : keep_scale;
    }
    return mask;
}

// Activations kept around for the backward pass.
struct ForwardCache {
    Matrix input;                  // x after any dropout
    std::vector<Matrix> pre;       // hidden pre-activations z_l
    std::vector<Matrix> hidden;    // relu(z_l)
    Matrix probs;                  // softmax output
};

ForwardCache forward_pass(const ModelSpec& spec, const ParamSet& params, const Matrix& x,
                          Mode mode, Rng& rng) {
    spec.validate();
    if (x.cols != spec.input_dim) {
        std::ostringstream msg;
        msg << "forward: input has " << x.cols << " features, model expects "
            << spec.input_dim;
        throw ShapeError(msg.str());
    }
    ForwardCache cache;
    cache.input = x;
    if (spec.arch == Arch::LogregDropout && mode == Mode::Train) {
        cache.input = hadamard(x, dropout_mask(x.rows, x.cols, spec.dropout_rate, rng));
    }

    const Matrix* current = &cache.input;
    const std::size_t n_hidden = spec.hidden_dims.size();
    for (std::size_t l = 0; l < n_hidden; ++l) {
        const std::string idx = std::to_string(l + 1);
        cache.pre.push_back(affine(*current, params.find("W" + idx), params.find("b" + idx)));
        cache.hidden.push_back(relu(cache.pre.back()));
        current = &cache.hidden.back();
    }
    const std::string out_idx = std::to_string(n_hidden + 1);
    cache.probs = softmax_rows(
        affine(*current, params.find("W" + out_idx), params.find("b" + out_idx)));
    return cache;
}

void write_le_u32(std::ofstream& out, std::uint32_t v) {
    unsigned char buf[4];
    for (int i = 0; i < 4; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(buf), 4);
}

void write_le_u64(std::ofstream& out, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t read_le_u64(std::ifstream& in, const std::string& path, std::size_t offset,
                          std::size_t width) {
    unsigned char buf[8] = {};
    if (!in.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(width))) {
        std::ostringstream msg;
        msg << path << ": truncated at byte " << offset;
        throw FormatError(msg.str());
    }
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < width; ++i) v |= std::uint64_t(buf[i]) << (8 * i);
    return v;
}

constexpr char kCheckpointMagic[4] = {'F', 'X', 'P', '1'};

}  // namespace

ModelSpec ModelSpec::logreg(std::size_t input_dim, int num_classes) {
    ModelSpec spec;
    spec.arch = Arch::Logreg;
    spec.input_dim = input_dim;
    spec.num_classes = num_classes;
    spec.validate();
    return spec;
}

ModelSpec ModelSpec::mlp(std::size_t input_dim, std::size_t hidden1, std::size_t hidden2,
                         int num_classes) {
    ModelSpec spec;
    spec.arch = Arch::Mlp;
    spec.input_dim = input_dim;
    spec.hidden_dims = {hidden1, hidden2};
    spec.num_classes = num_classes;
    spec.validate();
    return spec;
}

ModelSpec ModelSpec::logreg_dropout(std::size_t input_dim, int num_classes,
                                    double dropout_rate) {
    ModelSpec spec;
    spec.arch = Arch::LogregDropout;
    spec.input_dim = input_dim;
    spec.num_classes = num_classes;
    spec.dropout_rate = dropout_rate;
    spec.validate();
    return spec;
}

void ModelSpec::validate() const {
    if (input_dim == 0) throw ShapeError("ModelSpec: input_dim must be positive");
    if (num_classes < 2) throw ShapeError("ModelSpec: need at least 2 classes");
    if (arch == Arch::Mlp) {
        if (hidden_dims.size() != 2) {
            std::ostringstream msg;
            msg << "ModelSpec: mlp takes exactly two hidden layers, got "
                << hidden_dims.size();
            throw ShapeError(msg.str());
        }
        if (hidden_dims[0] == 0 || hidden_dims[1] == 0) {
            throw ShapeError("ModelSpec: hidden widths must be positive");
        }
    } else if (!hidden_dims.empty()) {
        throw ShapeError("ModelSpec: only mlp has hidden layers");
    }
    if (arch == Arch::LogregDropout && !(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
        std::ostringstream msg;
        msg << "ModelSpec: dropout_rate " << dropout_rate << " outside [0,1)";
        throw BoundsError(msg.str());
    }
}

std::vector<std::size_t> ModelSpec::layer_dims() const {
    std::vector<std::size_t> dims;
    dims.push_back(input_dim);
    dims.insert(dims.end(), hidden_dims.begin(), hidden_dims.end());
    dims.push_back(static_cast<std::size_t>(num_classes));
    return dims;
}

std::size_t ParamSet::flat_size() const {
    std::size_t total = 0;
    for (const auto& t : tensors) total += t.value.size();
    return total;
}

double& ParamSet::flat(std::size_t k) {
    for (auto& t : tensors) {
        if (k < t.value.size()) return t.value.data[k];
        k -= t.value.size();
    }
    throw BoundsError("ParamSet::flat: index past end");
}

double ParamSet::flat(std::size_t k) const {
    return const_cast<ParamSet*>(this)->flat(k);
}

std::vector<double> ParamSet::flatten() const {
    std::vector<double> out;
    out.reserve(flat_size());
    for (const auto& t : tensors) {
        out.insert(out.end(), t.value.data.begin(), t.value.data.end());
    }
    return out;
}

void ParamSet::unflatten(const std::vector<double>& values) {
    if (values.size() != flat_size()) {
        std::ostringstream msg;
        msg << "ParamSet::unflatten: " << values.size() << " values for "
            << flat_size() << " parameters";
        throw ShapeError(msg.str());
    }
    std::size_t k = 0;
    for (auto& t : tensors) {
        std::copy(values.begin() + k, values.begin() + k + t.value.size(),
                  t.value.data.begin());
        k += t.value.size();
    }
}

Matrix& ParamSet::find(const std::string& name) {
    for (auto& t : tensors) {
        if (t.name == name) return t.value;
    }
    throw BoundsError("ParamSet: no tensor named " + name);
}

const Matrix& ParamSet::find(const std::string& name) const {
    return const_cast<ParamSet*>(this)->find(name);
}

ParamSet init_params(const ModelSpec& spec, Rng& rng) {
    spec.validate();
    const std::vector<std::size_t> dims = spec.layer_dims();
    ParamSet params;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const std::size_t fan_in = dims[l];
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        Matrix w(dims[l], dims[l + 1]);
        for (double& v : w.data) v = rng.uniform(-bound, bound);
        const std::string idx = std::to_string(l + 1);
        params.tensors.push_back({"W" + idx, std::move(w)});
        params.tensors.push_back({"b" + idx, Matrix(1, dims[l + 1])});
    }
    return params;
}

Matrix forward(const ModelSpec& spec, const ParamSet& params, const Matrix& x, Mode mode,
               Rng& rng) {
    return forward_pass(spec, params, x, mode, rng).probs;
}

Matrix forward_eval(const ModelSpec& spec, const ParamSet& params, const Matrix& x) {
    Rng unused(0);
    return forward_pass(spec, params, x, Mode::Eval, unused).probs;
}

double cross_entropy_loss(const Matrix& y_hat, const Matrix& y_onehot) {
    require_same_shape(y_hat, y_onehot, "cross_entropy_loss");
    double total = 0.0;
    for (std::size_t k = 0; k < y_hat.size(); ++k) {
        if (y_onehot.data[k] != 0.0) {
            const double p = std::clamp(y_hat.data[k], 1e-12, 1.0);
            total -= y_onehot.data[k] * std::log(p);
        }
    }
    return total / static_cast<double>(y_hat.rows);
}

BackwardResult backward(const ModelSpec& spec, const ParamSet& params, const Matrix& x,
                        const Matrix& y_onehot, Mode mode, Rng& rng) {
    const ForwardCache cache = forward_pass(spec, params, x, mode, rng);
    require_same_shape(cache.probs, y_onehot, "backward");

    BackwardResult result;
    result.loss = cross_entropy_loss(cache.probs, y_onehot);

    // Softmax + cross-entropy: d(scores) = (probs - y) / N.
    Matrix delta = cache.probs;
    const double inv_n = 1.0 / static_cast<double>(x.rows);
    for (std::size_t k = 0; k < delta.size(); ++k) {
        delta.data[k] = (delta.data[k] - y_onehot.data[k]) * inv_n;
    }

    const std::size_t n_hidden = spec.hidden_dims.size();
    result.grad.tensors.resize(params.tensors.size());
    for (std::size_t l = n_hidden + 1; l >= 1; --l) {
        const std::string idx = std::to_string(l);
        const Matrix& layer_input = (l == 1) ? cache.input : cache.hidden[l - 2];
        result.grad.tensors[2 * (l - 1)] = {"W" + idx, matmul(transpose(layer_input), delta)};
        result.grad.tensors[2 * (l - 1) + 1] = {"b" + idx, column_sums(delta)};
        if (l == 1) break;
        delta = hadamard(matmul(delta, transpose(params.find("W" + idx))),
                         relu_grad(cache.pre[l - 2]));
    }
    return result;
}

std::vector<int> predict_labels(const Matrix& y_hat) {
    std::vector<int> labels(y_hat.rows);
    for (std::size_t i = 0; i < y_hat.rows; ++i) {
        const double* row = y_hat.row_ptr(i);
        std::size_t best = 0;
        for (std::size_t j = 1; j < y_hat.cols; ++j) {
            if (row[j] > row[best]) best = j;
        }
        labels[i] = static_cast<int>(best);
    }
    return labels;
}

void save_params(const ParamSet& params, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out.write(kCheckpointMagic, 4);
    write_le_u32(out, static_cast<std::uint32_t>(params.tensors.size()));
    for (const auto& t : params.tensors) {
        write_le_u32(out, static_cast<std::uint32_t>(t.name.size()));
        out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
        write_le_u64(out, t.value.rows);
        write_le_u64(out, t.value.cols);
        for (double v : t.value.data) write_le_u64(out, std::bit_cast<std::uint64_t>(v));
    }
    if (!out) throw IoError("write failed for " + path);
}

ParamSet load_params(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    char magic[4];
    if (!in.read(magic, 4) || !std::equal(magic, magic + 4, kCheckpointMagic)) {
        throw FormatError(path + ": bad checkpoint magic at byte 0 (want FXP1)");
    }
    std::size_t offset = 4;
    const auto count = read_le_u64(in, path, offset, 4);
    offset += 4;
    ParamSet params;
    for (std::uint64_t i = 0; i < count; ++i) {
        const auto name_len = read_le_u64(in, path, offset, 4);
        offset += 4;
        std::string name(name_len, '\0');
        if (!in.read(name.data(), static_cast<std::streamsize>(name_len))) {
            std::ostringstream msg;
            msg << path << ": truncated tensor name at byte " << offset;
            throw FormatError(msg.str());
        }
        offset += name_len;
        const auto rows = read_le_u64(in, path, offset, 8);
        offset += 8;
        const auto cols = read_le_u64(in, path, offset, 8);
        offset += 8;
        Matrix value(rows, cols);
        for (double& v : value.data) {
            v = std::bit_cast<double>(read_le_u64(in, path, offset, 8));
            offset += 8;
        }
        params.tensors.push_back({std::move(name), std::move(value)});
    }
    return params;
}

}  // namespace foxbench
