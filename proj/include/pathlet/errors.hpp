#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pathlet {

// Base for every recoverable error raised by the library. kind() is the
// stable machine-readable tag written into CLI error reports.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define PATHLET_DEFINE_ERROR(Name)                                           \
    class Name : public Error {                                              \
    public:                                                                  \
        explicit Name(const std::string& what) : Error(#Name, what) {}       \
    }

PATHLET_DEFINE_ERROR(ParseError);
PATHLET_DEFINE_ERROR(DuplicateEdge);
PATHLET_DEFINE_ERROR(DanglingReference);
PATHLET_DEFINE_ERROR(ShapeMismatch);
PATHLET_DEFINE_ERROR(IndexOutOfRange);
PATHLET_DEFINE_ERROR(InfeasibleSolution);
PATHLET_DEFINE_ERROR(MissingGeometry);
PATHLET_DEFINE_ERROR(ExpansionMismatch);
PATHLET_DEFINE_ERROR(UncoveredInput);
PATHLET_DEFINE_ERROR(EmptyCorpus);
PATHLET_DEFINE_ERROR(ConfigError);
PATHLET_DEFINE_ERROR(IoError);

#undef PATHLET_DEFINE_ERROR

// Consecutive edges that do not share a node. index is the position in the
// edge sequence of the second (offending) edge.
class NonContiguous : public Error {
public:
    NonContiguous(const std::string& what, std::size_t index)
        : Error("NonContiguous", what), index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

}  // namespace pathlet
