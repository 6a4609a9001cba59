#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "foxbench/matrix.hpp"
#include "foxbench/rng.hpp"

namespace foxbench {

struct LabeledDataset {
    Matrix features;          // N x D; image features scaled to [0,1]
    std::vector<int> labels;  // class indices, each < num_classes
    int num_classes = 0;
    std::string name;

    std::size_t size() const { return labels.size(); }
    std::size_t dim() const { return features.cols; }
};

struct Split {
    LabeledDataset train;
    LabeledDataset test;
    double fraction = 0.0;
};

// Canonical IDX pair: images magic 0x00000803 with dims [N, rows, cols],
// labels magic 0x00000801 with dims [N], all big-endian. Pixels are
// divided by 255. Throws FormatError (with byte offset) on bad magic,
// truncation, or image/label count mismatch.
LabeledDataset load_mnist_idx(const std::string& images_path, const std::string& labels_path);

// Inverse of load_mnist_idx: pixels written as round(v*255). Requires
// img_rows*img_cols == feature dim.
void write_mnist_idx(const LabeledDataset& ds, const std::string& images_path,
                     const std::string& labels_path, std::size_t img_rows,
                     std::size_t img_cols);

// Deterministic shuffled split; train gets floor(fraction*N) samples.
Split split_train_test(const LabeledDataset& ds, double fraction, Rng& rng);

// N x C indicator matrix, one 1 per row.
Matrix one_hot(const std::vector<int>& labels, int num_classes);

// Two spherical unit-variance Gaussian clusters whose means are
// `separation` apart along the first axis; labels balanced to within one.
LabeledDataset synth_binary(std::size_t n, std::size_t d, double separation, Rng& rng);

// Comma-separated numeric rows, '.' decimal point, last column integer
// class label; one optional header row (detected by non-numeric fields).
LabeledDataset load_csv(const std::string& path);

// Seeded random subset of n samples (all samples if n >= size).
LabeledDataset subsample(const LabeledDataset& ds, std::size_t n, Rng& rng);

}  // namespace foxbench
