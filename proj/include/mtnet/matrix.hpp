#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "mtnet/rng.hpp"

namespace mtnet {

// Dense row-major matrix of doubles; the universal numeric carrier.
// Values are finite after every public operation; construction from
// explicit data validates finiteness, internal kernels preserve it.
// A returned Matrix is treated as immutable by convention: operations
// produce new values instead of mutating shared ones.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols);                               // zero-filled
    Matrix(int rows, int cols, std::vector<double> values);   // validates size + finiteness
    Matrix(int rows, int cols, std::initializer_list<double> values);

    static Matrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t size() const { return values_.size(); }

    double& operator()(int r, int c) { return values_[static_cast<std::size_t>(r) * cols_ + c]; }
    double operator()(int r, int c) const { return values_[static_cast<std::size_t>(r) * cols_ + c]; }

    double* data() { return values_.data(); }
    const double* data() const { return values_.data(); }

    double* row(int r) { return values_.data() + static_cast<std::size_t>(r) * cols_; }
    const double* row(int r) const { return values_.data() + static_cast<std::size_t>(r) * cols_; }

    void fill(double v);
    void assert_finite(const std::string& context) const;

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }
    std::string shape_str() const;

    bool operator==(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_ && values_ == other.values_;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> values_;
};

enum class Activation { sigmoid, tanh, relu };

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double s);
Matrix hadamard(const Matrix& a, const Matrix& b);

// Elementwise activation. sigmoid maps into (0,1), tanh into (-1,1), relu to [0,inf).
Matrix activate(const Matrix& x, Activation kind);

double sigmoid(double x);
double relu(double x);

// Inverted dropout. Train mode zeroes each entry independently with
// probability `rate` and scales survivors by 1/(1-rate); eval mode returns
// x unchanged with an all-ones mask and consumes no rng draws.
// The mask holds the applied factors, so dropped = hadamard(x, mask).
struct DropoutResult {
    Matrix output;
    Matrix mask;
};
enum class Mode { train, eval };
DropoutResult dropout_apply(const Matrix& x, double rate, Rng& rng, Mode mode);

// ---- Low-level kernels (raw pointers, fixed accumulation order) ----
// Hot paths in the network use these directly. All use a 4-way unrolled
// accumulation with a fixed summation order, so results are bitwise
// reproducible.

// out[r] += sum_c W[r,c] * x[c]; W is rows x cols row-major.
void gemv_acc(const double* w, int rows, int cols, const double* x, double* out);
// out[c] += sum_r W[r,c] * y[r]; transposed product.
void gemv_t_acc(const double* w, int rows, int cols, const double* y, double* out);
// W[r,c] += y[r] * x[c]; rank-1 accumulation.
void outer_acc(double* w, int rows, int cols, const double* y, const double* x);
// Fixed-order dot product (matches gemv_acc's per-row order).
double dot(const double* a, const double* b, int n);

}  // namespace mtnet
