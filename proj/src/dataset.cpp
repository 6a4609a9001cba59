#include "foxbench/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "foxbench/error.hpp"

namespace foxbench {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::uint32_t read_be_u32(std::ifstream& in, const std::string& path, std::size_t offset) {
    unsigned char buf[4];
    if (!in.read(reinterpret_cast<char*>(buf), 4)) {
        std::ostringstream msg;
        msg << path << ": truncated at byte " << offset << " (expected 4-byte big-endian word)";
        throw FormatError(msg.str());
    }
    return (std::uint32_t(buf[0]) << 24) | (std::uint32_t(buf[1]) << 16) |
           (std::uint32_t(buf[2]) << 8) | std::uint32_t(buf[3]);
}

void write_be_u32(std::ofstream& out, std::uint32_t v) {
    unsigned char buf[4] = {static_cast<unsigned char>(v >> 24),
                            static_cast<unsigned char>(v >> 16),
                            static_cast<unsigned char>(v >> 8),
                            static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char*>(buf), 4);
}

LabeledDataset take_rows(const LabeledDataset& ds, const std::vector<std::size_t>& rows,
                         const std::string& name) {
    LabeledDataset out;
    out.features = Matrix(rows.size(), ds.features.cols);
    out.labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double* src = ds.features.row_ptr(rows[i]);
        std::copy(src, src + ds.features.cols, out.features.row_ptr(i));
        out.labels.push_back(ds.labels[rows[i]]);
    }
    out.num_classes = ds.num_classes;
    out.name = name;
    return out;
}

}  // namespace

LabeledDataset load_mnist_idx(const std::string& images_path, const std::string& labels_path) {
    std::ifstream images(images_path, std::ios::binary);
    if (!images) throw IoError("cannot open " + images_path);
    std::size_t off = 0;
    const std::uint32_t img_magic = read_be_u32(images, images_path, off);
    if (img_magic != kImagesMagic) {
        std::ostringstream msg;
        msg << images_path << ": bad magic 0x" << std::hex << img_magic << " at byte 0"
            << " (want 0x" << kImagesMagic << ")";
        throw FormatError(msg.str());
    }
    off = 4;
    const std::uint32_t n = read_be_u32(images, images_path, off);
    const std::uint32_t img_rows = read_be_u32(images, images_path, off += 4);
    const std::uint32_t img_cols = read_be_u32(images, images_path, off += 4);
    off = 16;

    const std::size_t dim = std::size_t(img_rows) * img_cols;
    std::vector<unsigned char> pixels(std::size_t(n) * dim);
    if (!images.read(reinterpret_cast<char*>(pixels.data()),
                     static_cast<std::streamsize>(pixels.size()))) {
        std::ostringstream msg;
        msg << images_path << ": truncated pixel data at byte "
            << off + static_cast<std::size_t>(images.gcount()) << " (want "
            << off + pixels.size() << " bytes total)";
        throw FormatError(msg.str());
    }

    std::ifstream labels(labels_path, std::ios::binary);
    if (!labels) throw IoError("cannot open " + labels_path);
    const std::uint32_t lab_magic = read_be_u32(labels, labels_path, 0);
    if (lab_magic != kLabelsMagic) {
        std::ostringstream msg;
        msg << labels_path << ": bad magic 0x" << std::hex << lab_magic << " at byte 0"
            << " (want 0x" << kLabelsMagic << ")";
        throw FormatError(msg.str());
    }
    const std::uint32_t n_labels = read_be_u32(labels, labels_path, 4);
    if (n_labels != n) {
        std::ostringstream msg;
        msg << labels_path << ": label count " << n_labels << " does not match image count "
            << n << " (header byte 4)";
        throw FormatError(msg.str());
    }
    std::vector<unsigned char> raw_labels(n);
    if (!labels.read(reinterpret_cast<char*>(raw_labels.data()), n)) {
        std::ostringstream msg;
        msg << labels_path << ": truncated label data at byte "
            << 8 + static_cast<std::size_t>(labels.gcount());
        throw FormatError(msg.str());
    }

    LabeledDataset ds;
    ds.features = Matrix(n, dim);
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        ds.features.data[i] = pixels[i] / 255.0;
    }
    ds.labels.assign(raw_labels.begin(), raw_labels.end());
    ds.num_classes = 10;
    ds.name = "mnist";
    return ds;
}

void write_mnist_idx(const LabeledDataset& ds, const std::string& images_path,
                     const std::string& labels_path, std::size_t img_rows,
                     std::size_t img_cols) {
    if (img_rows * img_cols != ds.features.cols) {
        std::ostringstream msg;
        msg << "write_mnist_idx: " << img_rows << "x" << img_cols
            << " does not match feature dim " << ds.features.cols;
        throw ShapeError(msg.str());
    }
    std::ofstream images(images_path, std::ios::binary);
    if (!images) throw IoError("cannot open " + images_path + " for writing");
    write_be_u32(images, kImagesMagic);
    write_be_u32(images, static_cast<std::uint32_t>(ds.size()));
    write_be_u32(images, static_cast<std::uint32_t>(img_rows));
    write_be_u32(images, static_cast<std::uint32_t>(img_cols));
    for (double v : ds.features.data) {
        const unsigned char byte = static_cast<unsigned char>(std::lround(v * 255.0));
        images.write(reinterpret_cast<const char*>(&byte), 1);
    }

    std::ofstream labels(labels_path, std::ios::binary);
    if (!labels) throw IoError("cannot open " + labels_path + " for writing");
    write_be_u32(labels, kLabelsMagic);
    write_be_u32(labels, static_cast<std::uint32_t>(ds.size()));
    for (int label : ds.labels) {
        const unsigned char byte = static_cast<unsigned char>(label);
        labels.write(reinterpret_cast<const char*>(&byte), 1);
    }
}

Split split_train_test(const LabeledDataset& ds, double fraction, Rng& rng) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        std::ostringstream msg;
        msg << "split_train_test: fraction " << fraction << " outside (0,1)";
        throw BoundsError(msg.str());
    }
    const std::vector<std::size_t> idx = shuffled_indices(ds.size(), rng);
    const auto n_train = static_cast<std::size_t>(fraction * static_cast<double>(ds.size()));
    const std::vector<std::size_t> train_rows(idx.begin(), idx.begin() + n_train);
    const std::vector<std::size_t> test_rows(idx.begin() + n_train, idx.end());

    Split split;
    split.train = take_rows(ds, train_rows, ds.name + "/train");
    split.test = take_rows(ds, test_rows, ds.name + "/test");
    split.fraction = fraction;
    return split;
}

Matrix one_hot(const std::vector<int>& labels, int num_classes) {
    Matrix y(labels.size(), static_cast<std::size_t>(num_classes));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= num_classes) {
            std::ostringstream msg;
            msg << "one_hot: label " << labels[i] << " at row " << i
                << " outside [0," << num_classes << ")";
            throw BoundsError(msg.str());
        }
        y(i, static_cast<std::size_t>(labels[i])) = 1.0;
    }
    return y;
}

LabeledDataset synth_binary(std::size_t n, std::size_t d, double separation, Rng& rng) {
    if (n < 2 || d < 1) throw BoundsError("synth_binary: need n >= 2 and d >= 1");
    LabeledDataset ds;
    ds.features = Matrix(n, d);
    ds.labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int label = static_cast<int>(i % 2);
        const double mean0 = (label == 0 ? -0.5 : 0.5) * separation;
        double* row = ds.features.row_ptr(i);
        row[0] = mean0 + rng.gaussian();
        for (std::size_t j = 1; j < d; ++j) row[j] = rng.gaussian();
        ds.labels.push_back(label);
    }
    ds.num_classes = 2;
    ds.name = "synth_binary";
    return ds;
}

LabeledDataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);

    auto parse_field = [](const std::string& field, double& out) {
        const char* begin = field.data();
        const char* end = begin + field.size();
        while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
        while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
        const auto [ptr, ec] = std::from_chars(begin, end, out);
        return ec == std::errc{} && ptr == end && begin != end;
    };

    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::vector<double> fields;
        std::stringstream ss(line);
        std::string field;
        bool numeric = true;
        while (std::getline(ss, field, ',')) {
            double v = 0.0;
            if (!parse_field(field, v)) {
                numeric = false;
                break;
            }
            fields.push_back(v);
        }
        if (!numeric) {
            if (line_no == 1) continue;  // header row
            std::ostringstream msg;
            msg << path << ": non-numeric field at line " << line_no;
            throw FormatError(msg.str());
        }
        if (width == 0) {
            width = fields.size();
            if (width < 2) {
                std::ostringstream msg;
                msg << path << ": line " << line_no << " has " << width
                    << " columns, need features plus a label";
                throw FormatError(msg.str());
            }
        } else if (fields.size() != width) {
            std::ostringstream msg;
            msg << path << ": line " << line_no << " has " << fields.size()
                << " columns, expected " << width;
            throw FormatError(msg.str());
        }
        rows.push_back(std::move(fields));
    }
    if (rows.empty()) throw FormatError(path + ": no data rows");

    LabeledDataset ds;
    ds.features = Matrix(rows.size(), width - 1);
    ds.labels.reserve(rows.size());
    int max_label = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::copy(rows[i].begin(), rows[i].end() - 1, ds.features.row_ptr(i));
        const double raw = rows[i].back();
        const int label = static_cast<int>(std::lround(raw));
        if (std::abs(raw - label) > 1e-9 || label < 0) {
            std::ostringstream msg;
            msg << path << ": label column value " << raw << " at data row " << i
                << " is not a non-negative integer";
            throw FormatError(msg.str());
        }
        ds.labels.push_back(label);
        max_label = std::max(max_label, label);
    }
    ds.num_classes = max_label + 1;
    ds.name = "csv";
    return ds;
}

LabeledDataset subsample(const LabeledDataset& ds, std::size_t n, Rng& rng) {
    if (n >= ds.size()) return ds;
    std::vector<std::size_t> idx = shuffled_indices(ds.size(), rng);
    idx.resize(n);
    return take_rows(ds, idx, ds.name);
}

}  // namespace foxbench
