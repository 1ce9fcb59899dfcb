#pragma once

#include <stdexcept>
#include <string>

namespace nvgrad {

struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RangeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DetectionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MissingInputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace nvgrad
