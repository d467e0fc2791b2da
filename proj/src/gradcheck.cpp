#include "mtnet/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mtnet/errors.hpp"

namespace mtnet {

double grad_check(const std::function<double(const Matrix&)>& f,
                  const Matrix& params,
                  const Matrix& analytic_grad,
                  double eps) {
    if (eps <= 0.0) throw ParameterError("grad_check: eps must be positive");
    if (!params.same_shape(analytic_grad)) {
        throw ShapeError("grad_check: params " + params.shape_str() +
                         " vs analytic gradient " + analytic_grad.shape_str());
    }

    Matrix probe = params;
    double max_rel_err = 0.0;
    for (int r = 0; r < params.rows(); ++r) {
        for (int c = 0; c < params.cols(); ++c) {
            const double saved = probe(r, c);

            probe(r, c) = saved + eps;
            const double f_plus = f(probe);
            probe(r, c) = saved - eps;
            const double f_minus = f(probe);
            probe(r, c) = saved;

            if (!std::isfinite(f_plus) || !std::isfinite(f_minus)) {
                std::ostringstream os;
                os << "grad_check: non-finite objective at coordinate (" << r << "," << c << ")";
                throw EvaluationError(os.str());
            }

            const double numeric = (f_plus - f_minus) / (2.0 * eps);
            const double analytic = analytic_grad(r, c);
            const double denom = std::max({1.0, std::fabs(analytic), std::fabs(numeric)});
            max_rel_err = std::max(max_rel_err, std::fabs(analytic - numeric) / denom);
        }
    }
    return max_rel_err;
}

}  // namespace mtnet
