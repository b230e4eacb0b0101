#pragma once

#include <stdexcept>
#include <string>

namespace cvqt {

/// A state covariance stopped being usable (e.g. a homodyne target
/// quadrature with non-positive variance).
class corrupt_state_error : public std::runtime_error {
public:
    explicit corrupt_state_error(const std::string& what) : std::runtime_error(what) {}
};

/// Config-file problem: syntax, unknown key, missing key, bad enum value.
/// Carries the 1-based line number when known (0 otherwise).
class config_error : public std::runtime_error {
public:
    config_error(const std::string& what, int line = 0, std::string key = {})
        : std::runtime_error(what), line_(line), key_(std::move(key)) {}

    int line() const { return line_; }
    const std::string& key() const { return key_; }

private:
    int line_ = 0;
    std::string key_;
};

}  // namespace cvqt
