#ifndef CAWCL_TENSOR_HPP
#define CAWCL_TENSOR_HPP

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "cawcl/errors.hpp"

namespace cawcl {

// Norms below this are treated as zero; normalizing such a vector throws
// NearZeroNorm instead of producing NaN.
inline constexpr double kNormFloor = 1e-12;

// Neumaier-compensated accumulator. All reductions in this library go
// through it so finite-difference gates reproduce across platforms.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double result() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

double csum(std::span<const double> xs);
double cdot(std::span<const double> a, std::span<const double> b);

// Dense row-major matrix of doubles. Vectors are 1 x n rows.
class Tensor2 {
public:
    Tensor2() = default;
    Tensor2(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, 0.0) {
        if (rows < 0 || cols < 0) throw ShapeMismatch("Tensor2: negative dimension");
    }
    Tensor2(int rows, int cols, std::vector<double> data) : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != static_cast<size_t>(rows) * cols)
            throw ShapeMismatch("Tensor2: data length does not match rows x cols");
    }

    static Tensor2 row(std::vector<double> v) {
        const int n = static_cast<int>(v.size());
        return Tensor2(1, n, std::move(v));
    }
    static Tensor2 from_rows(std::initializer_list<std::initializer_list<double>> rows);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int size() const { return rows_ * cols_; }

    double& at(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
    double at(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& vec() { return data_; }
    const std::vector<double>& vec() const { return data_; }

    std::span<const double> row_span(int r) const {
        return {data_.data() + static_cast<size_t>(r) * cols_, static_cast<size_t>(cols_)};
    }
    std::span<double> row_span(int r) {
        return {data_.data() + static_cast<size_t>(r) * cols_, static_cast<size_t>(cols_)};
    }

    bool same_shape(const Tensor2& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
    bool all_finite() const;
    void fill(double v) { data_.assign(data_.size(), v); }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

// Gradient paired with the identity of the parameter it belongs to.
struct GradRecord {
    const Tensor2* parameter = nullptr;
    Tensor2 gradient;
};

// ---- dense kernels (also used by the tape's backward rules) ----

Tensor2 matmul(const Tensor2& a, const Tensor2& b);    // a(m,k) * b(k,n)
Tensor2 matmul_nt(const Tensor2& a, const Tensor2& b); // a(m,k) * b(n,k)^T
Tensor2 matmul_tn(const Tensor2& a, const Tensor2& b); // a(k,m)^T * b(k,n)

void add_inplace(Tensor2& dst, const Tensor2& src);
void axpy_inplace(Tensor2& dst, double alpha, const Tensor2& src);

double l2_norm(std::span<const double> v);

// Unit-length copy of v; throws NearZeroNorm when ||v|| <= kNormFloor.
std::vector<double> l2_normalize(std::span<const double> v);

// Max-shifted log-softmax; exp of the result sums to 1.
std::vector<double> log_softmax(std::span<const double> logits);

// Euclidean distance between two vectors of equal length.
double euclidean(std::span<const double> a, std::span<const double> b);

} // namespace cawcl

#endif
