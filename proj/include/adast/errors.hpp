#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace adast {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Tensor shapes are incompatible with the requested operation.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A hyperparameter or argument lies outside its admissible range.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A class label is outside [0, K).
class LabelError : public Error {
public:
    using Error::Error;
};

/// Optimizer state does not match the parameters it is asked to update.
class StateError : public Error {
public:
    using Error::Error;
};

/// Batch statistics cannot be estimated from fewer than two values.
class DegenerateBatchError : public Error {
public:
    using Error::Error;
};

class GradCheckError : public Error {
public:
    GradCheckError(const std::string& what, std::size_t coordinate)
        : Error(what + " (coordinate " + std::to_string(coordinate) + ")"), coordinate_(coordinate) {}
    std::size_t coordinate() const noexcept { return coordinate_; }

private:
    std::size_t coordinate_;
};

/// Malformed input file. `line()` is 1-based, 0 when not line-specific.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ConflictError : public Error {
public:
    using Error::Error;
};

class TooShortError : public Error {
public:
    using Error::Error;
};

class FitError : public Error {
public:
    using Error::Error;
};

/// A training loss became NaN or infinite.
class TrainingDivergence : public Error {
public:
    TrainingDivergence(std::size_t epoch, std::size_t batch, double loss)
        : Error("non-finite loss " + std::to_string(loss) + " at epoch " + std::to_string(epoch) +
                ", batch " + std::to_string(batch)),
          epoch_(epoch),
          batch_(batch) {}
    std::size_t epoch() const noexcept { return epoch_; }
    std::size_t batch() const noexcept { return batch_; }

private:
    std::size_t epoch_;
    std::size_t batch_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace adast
