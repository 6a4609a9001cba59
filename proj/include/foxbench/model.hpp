#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "foxbench/matrix.hpp"
#include "foxbench/rng.hpp"

namespace foxbench {

enum class Arch { Logreg, Mlp, LogregDropout };
enum class Mode { Train, Eval };

// Architecture description. The MLP always has exactly two hidden ReLU
// layers; the dropout variant applies inverted dropout to the inputs of a
// plain logistic regression, in train mode only.
struct ModelSpec {
    Arch arch = Arch::Logreg;
    std::size_t input_dim = 0;
    std::vector<std::size_t> hidden_dims;  // exactly two entries for Mlp, else empty
    int num_classes = 0;
    double dropout_rate = 0.5;  // used by LogregDropout only

    static ModelSpec logreg(std::size_t input_dim, int num_classes);
    static ModelSpec mlp(std::size_t input_dim, std::size_t hidden1, std::size_t hidden2,
                         int num_classes);
    static ModelSpec logreg_dropout(std::size_t input_dim, int num_classes,
                                    double dropout_rate);

    // Throws ShapeError / BoundsError on an inconsistent spec.
    void validate() const;

    // Layer widths including input and output, e.g. [D, h1, h2, C].
    std::vector<std::size_t> layer_dims() const;
};

struct NamedTensor {
    std::string name;
    Matrix value;
};

// Ordered collection of per-layer weights and biases (W1, b1, W2, b2, ...).
// flat(k) aliases the k-th scalar across tensors in order, so the flat and
// shaped views always agree.
struct ParamSet {
    std::vector<NamedTensor> tensors;

    std::size_t flat_size() const;
    double& flat(std::size_t k);
    double flat(std::size_t k) const;
    std::vector<double> flatten() const;
    void unflatten(const std::vector<double>& values);

    Matrix& find(const std::string& name);
    const Matrix& find(const std::string& name) const;
};

// Gradients carry the exact shape structure of their ParamSet.
using Gradient = ParamSet;

struct BackwardResult {
    double loss = 0.0;
    Gradient grad;
};

// Fan-in-scaled uniform weights (U[-1/sqrt(fan_in), 1/sqrt(fan_in)]),
// zero biases. Deterministic given the rng state.
ParamSet init_params(const ModelSpec& spec, Rng& rng);

// Class probabilities, one simplex row per sample. Train mode draws a fresh
// dropout mask from rng (dropout variant only); eval mode never touches rng.
Matrix forward(const ModelSpec& spec, const ParamSet& params, const Matrix& x, Mode mode,
               Rng& rng);
// Eval-mode forward without threading an rng through.
Matrix forward_eval(const ModelSpec& spec, const ParamSet& params, const Matrix& x);

// Mean categorical cross-entropy with probabilities clamped to >= 1e-12;
// the two-class case is the usual binary form.
double cross_entropy_loss(const Matrix& y_hat, const Matrix& y_onehot);

// Loss and its exact gradient in one pass. The dropout mask is drawn once
// and shared between the forward evaluation and the gradient.
BackwardResult backward(const ModelSpec& spec, const ParamSet& params, const Matrix& x,
                        const Matrix& y_onehot, Mode mode, Rng& rng);

// Per-row argmax; ties go to the lowest class index.
std::vector<int> predict_labels(const Matrix& y_hat);

// Checkpoint I/O: named tensors with shapes, little-endian f64 payload,
// versioned header. load_params throws FormatError (with byte offset) on a
// corrupt file.
void save_params(const ParamSet& params, const std::string& path);
ParamSet load_params(const std::string& path);

}  // namespace foxbench
