#include "mtnet/matrix.hpp"

#include <cmath>
#include <sstream>

#include "mtnet/errors.hpp"

namespace mtnet {

namespace {
void require_positive_dims(int rows, int cols) {
    if (rows <= 0 || cols <= 0) {
        std::ostringstream os;
        os << "matrix dimensions must be positive, got " << rows << "x" << cols;
        throw ShapeError(os.str());
    }
}
}  // namespace

Matrix::Matrix(int rows, int cols) : rows_(rows), cols_(cols) {
    require_positive_dims(rows, cols);
    values_.assign(static_cast<std::size_t>(rows) * cols, 0.0);
}

Matrix::Matrix(int rows, int cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    require_positive_dims(rows, cols);
    if (values_.size() != static_cast<std::size_t>(rows) * cols) {
        std::ostringstream os;
        os << "value count " << values_.size() << " does not match shape " << rows << "x" << cols;
        throw ShapeError(os.str());
    }
    assert_finite("Matrix construction");
}

Matrix::Matrix(int rows, int cols, std::initializer_list<double> values)
    : Matrix(rows, cols, std::vector<double>(values)) {}

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

void Matrix::fill(double v) {
    for (auto& x : values_) x = v;
}

void Matrix::assert_finite(const std::string& context) const {
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw ShapeError(context + ": non-finite value in " + shape_str() + " matrix");
        }
    }
}

std::string Matrix::shape_str() const {
    std::ostringstream os;
    os << rows_ << "x" << cols_;
    return os.str();
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        std::ostringstream os;
        os << "matmul shape mismatch: " << a.shape_str() << " x " << b.shape_str();
        throw ShapeError(os.str());
    }
    Matrix out(a.rows(), b.cols());
    // i-k-j order keeps the inner loop contiguous in both b and out.
    for (int i = 0; i < a.rows(); ++i) {
        double* out_row = out.row(i);
        const double* a_row = a.row(i);
        for (int k = 0; k < a.cols(); ++k) {
            const double aik = a_row[k];
            if (aik == 0.0) continue;
            const double* b_row = b.row(k);
            for (int j = 0; j < b.cols(); ++j) out_row[j] += aik * b_row[j];
        }
    }
    return out;
}

Matrix transpose(const Matrix& a) {
    Matrix out(a.cols(), a.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
    return out;
}

namespace {
Matrix zip(const Matrix& a, const Matrix& b, const char* op, double (*f)(double, double)) {
    if (!a.same_shape(b)) {
        std::ostringstream os;
        os << op << " shape mismatch: " << a.shape_str() << " vs " << b.shape_str();
        throw ShapeError(os.str());
    }
    Matrix out(a.rows(), a.cols());
    const double* pa = a.data();
    const double* pb = b.data();
    double* po = out.data();
    for (std::size_t i = 0; i < a.size(); ++i) po[i] = f(pa[i], pb[i]);
    return out;
}
}  // namespace

Matrix add(const Matrix& a, const Matrix& b) {
    return zip(a, b, "add", [](double x, double y) { return x + y; });
}

Matrix sub(const Matrix& a, const Matrix& b) {
    return zip(a, b, "sub", [](double x, double y) { return x - y; });
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    return zip(a, b, "hadamard", [](double x, double y) { return x * y; });
}

Matrix scale(const Matrix& a, double s) {
    Matrix out(a.rows(), a.cols());
    const double* pa = a.data();
    double* po = out.data();
    for (std::size_t i = 0; i < a.size(); ++i) po[i] = pa[i] * s;
    return out;
}

double sigmoid(double x) {
    return 1.0 / (1.0 + std::exp(-x));
}

double relu(double x) {
    return x > 0.0 ? x : 0.0;
}

Matrix activate(const Matrix& x, Activation kind) {
    Matrix out(x.rows(), x.cols());
    const double* px = x.data();
    double* po = out.data();
    switch (kind) {
        case Activation::sigmoid:
            for (std::size_t i = 0; i < x.size(); ++i) po[i] = sigmoid(px[i]);
            break;
        case Activation::tanh:
            for (std::size_t i = 0; i < x.size(); ++i) po[i] = std::tanh(px[i]);
            break;
        case Activation::relu:
            for (std::size_t i = 0; i < x.size(); ++i) po[i] = relu(px[i]);
            break;
    }
    return out;
}

DropoutResult dropout_apply(const Matrix& x, double rate, Rng& rng, Mode mode) {
    if (rate < 0.0 || rate >= 1.0) {
        std::ostringstream os;
        os << "dropout rate must lie in [0, 1), got " << rate;
        throw ParameterError(os.str());
    }
    DropoutResult res{Matrix(x.rows(), x.cols()), Matrix(x.rows(), x.cols())};
    if (mode == Mode::eval || rate == 0.0) {
        res.output = x;
        res.mask.fill(1.0);
        return res;
    }
    const double keep_scale = 1.0 / (1.0 - rate);
    const double* px = x.data();
    double* po = res.output.data();
    double* pm = res.mask.data();
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double m = rng.uniform01() < rate ? 0.0 : keep_scale;
        pm[i] = m;
        po[i] = px[i] * m;
    }
    return res;
}

double dot(const double* a, const double* b, int n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return ((s0 + s1) + (s2 + s3));
}

void gemv_acc(const double* w, int rows, int cols, const double* x, double* out) {
    for (int r = 0; r < rows; ++r) out[r] += dot(w + static_cast<std::size_t>(r) * cols, x, cols);
}

void gemv_t_acc(const double* w, int rows, int cols, const double* y, double* out) {
    for (int r = 0; r < rows; ++r) {
        const double yr = y[r];
        if (yr == 0.0) continue;
        const double* wr = w + static_cast<std::size_t>(r) * cols;
        for (int c = 0; c < cols; ++c) out[c] += yr * wr[c];
    }
}

void outer_acc(double* w, int rows, int cols, const double* y, const double* x) {
    for (int r = 0; r < rows; ++r) {
        const double yr = y[r];
        if (yr == 0.0) continue;
        double* wr = w + static_cast<std::size_t>(r) * cols;
        for (int c = 0; c < cols; ++c) wr[c] += yr * x[c];
    }
}

}  // namespace mtnet
