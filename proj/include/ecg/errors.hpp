#ifndef ECG_ERRORS_HPP
#define ECG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ecg {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// File could not be opened, read or written.
struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

// File exists but its content does not match the documented format.
struct FormatError : Error {
    explicit FormatError(const std::string& msg) : Error(msg) {}
};

// An argument or configuration value is out of its allowed range.
struct ParameterError : Error {
    explicit ParameterError(const std::string& msg) : Error(msg) {}
};

// A domain object violates one of its invariants.
struct ValidationError : Error {
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

// The constrained least-squares wavelet fit degenerated.
struct FitError : Error {
    explicit FitError(const std::string& msg) : Error(msg) {}
};

} // namespace ecg

#endif // ECG_ERRORS_HPP
