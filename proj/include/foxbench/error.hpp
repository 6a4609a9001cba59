#pragma once

#include <stdexcept>
#include <string>

namespace foxbench {

// Shape mismatch between matrices or parameter sets.
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside its allowed interval (lo > hi, fraction out of (0,1), ...).
struct BoundsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed file content; message carries the byte or line offset.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Mathematically invalid input (empty sample, zero baseline, negative fitness).
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Paired comparison requested over cells of different run counts.
struct PairingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace foxbench
