#pragma once

#include <stdexcept>
#include <string>

namespace czlab {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/** Thrown when a scale is finer than the grid can resolve; carries the finest usable scale. */
class ScaleUnresolvable : public Error {
public:
    ScaleUnresolvable(const std::string& what, int max_scale)
        : Error(what), max_scale_(max_scale) {}
    int max_scale() const { return max_scale_; }

private:
    int max_scale_;
};

class NotAccretive : public Error {
public:
    using Error::Error;
};

class BranchViolation : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace czlab
