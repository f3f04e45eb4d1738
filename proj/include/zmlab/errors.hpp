#pragma once

#include <stdexcept>
#include <string>

namespace zmlab {

// Quadrature self-check (doubled nodes) moved a matrix entry beyond the
// accepted drift, or a certified tail truncation could not be achieved.
struct ConvergenceFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Gram matrix eigenvalue fell under the floor 1e-12 * lambda_max.  The Gram
// operator is bounded below by exp(-2 sup phitilde) > 0, so this indicates a
// numerics bug or a grossly inadequate rule, not a real domain case.
struct NearSingularGram : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Point evaluation requested outside the trusted radius R(K) of the
// truncated basis.
struct EvaluationRadiusExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Compactly supported symbol extends past R(K); its spectrum cannot be
// resolved by the truncated basis.
struct SupportExceedsRadius : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent run configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace zmlab
