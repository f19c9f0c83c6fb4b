#pragma once

#include <stdexcept>
#include <string>

namespace flatcert {

struct SyntaxError : std::runtime_error {
    std::size_t position;
    SyntaxError(const std::string& what, std::size_t pos)
        : std::runtime_error(what + " (at position " + std::to_string(pos) + ")"),
          position(pos) {}
};

struct UnknownVariableError : std::runtime_error {
    std::string name;
    explicit UnknownVariableError(const std::string& n)
        : std::runtime_error("unknown variable '" + n + "'"), name(n) {}
};

struct ArityError : std::runtime_error {
    std::string function;
    int got;
    int want;
    ArityError(const std::string& fn, int g, int w)
        : std::runtime_error("function '" + fn + "' expects " + std::to_string(w) +
                             " argument(s), got " + std::to_string(g)),
          function(fn), got(g), want(w) {}
};

// Evaluation left the domain of an elementary function (ln/sqrt of a
// negative number, atan2(0,0), division by zero). component is the index
// of the map component being evaluated, or -1 for scalar contexts.
struct DomainError : std::runtime_error {
    int component;
    explicit DomainError(const std::string& what, int comp = -1)
        : std::runtime_error(what), component(comp) {}
};

struct NonFiniteError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularMatrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SpecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace flatcert
