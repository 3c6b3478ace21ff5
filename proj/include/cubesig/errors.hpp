#pragma once

#include <stdexcept>
#include <string>

namespace cubesig {

struct InvalidDimension : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidIndex : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidGrid : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct IncompatibleGrids : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NotComposable : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NumericDomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace cubesig
