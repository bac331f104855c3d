#pragma once

#include <stdexcept>
#include <string>

namespace opdet {

// Symbol touches or winds around zero; downstream factorization is undefined.
class IndexError : public std::runtime_error {
public:
    explicit IndexError(const std::string& what) : std::runtime_error(what) {}
};

// A resolvent (I + cK)^{-1} was requested at or too close to a spectral point.
class SingularError : public std::runtime_error {
public:
    explicit SingularError(const std::string& what) : std::runtime_error(what) {}
};

// An iterative refinement failed to meet its tolerance within its budget.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Report emission failed (unwritable path, stream error).
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace opdet
