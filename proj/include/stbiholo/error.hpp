#pragma once

#include <stdexcept>
#include <string>

namespace stbiholo {

/// Bad input data or parameter combination (maps to CLI exit code 1).
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem / stream failure (maps to CLI exit code 2).
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace stbiholo
