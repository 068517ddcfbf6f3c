#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mvfs {

class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class InvalidState : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// A linear system stayed singular after the ridge retry. `view` is -1 for
// global (B) updates; `iteration` is -1 outside the main loop.
class NumericFailure : public std::runtime_error {
public:
    NumericFailure(const std::string& what, int view = -1, int iteration = -1)
        : std::runtime_error(what), view_(view), iteration_(iteration) {}

    int view() const noexcept { return view_; }
    int iteration() const noexcept { return iteration_; }

private:
    int view_;
    int iteration_;
};

class LoadError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t row, std::size_t column)
        : std::runtime_error(what), row_(row), column_(column) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

}  // namespace mvfs
