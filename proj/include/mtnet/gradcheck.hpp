#pragma once

#include <functional>

#include "mtnet/matrix.hpp"

namespace mtnet {

// Compares an analytic gradient against central finite differences of f.
//
// For each coordinate i of params, the numeric derivative is
//   (f(params + eps*e_i) - f(params - eps*e_i)) / (2*eps)
// and the reported error is
//   max_i |analytic_i - numeric_i| / max(1, |analytic_i|, |numeric_i|).
// The denominator clamp at 1 keeps the ratio stable near zero gradients.
//
// Every differentiable operation in the repo must pass this check.
// Throws EvaluationError if f returns a non-finite value at any probe point.
double grad_check(const std::function<double(const Matrix&)>& f,
                  const Matrix& params,
                  const Matrix& analytic_grad,
                  double eps = 1e-5);

}  // namespace mtnet
