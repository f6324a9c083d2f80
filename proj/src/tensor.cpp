#include "cawcl/tensor.hpp"

#include <algorithm>
#include <limits>

namespace cawcl {

double csum(std::span<const double> xs) {
    CompensatedSum acc;
    for (double x : xs) acc.add(x);
    return acc.result();
}

double cdot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ShapeMismatch("cdot: length mismatch");
    CompensatedSum acc;
    for (size_t i = 0; i < a.size(); ++i) acc.add(a[i] * b[i]);
    return acc.result();
}

Tensor2 Tensor2::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const int r = static_cast<int>(rows.size());
    const int c = r > 0 ? static_cast<int>(rows.begin()->size()) : 0;
    Tensor2 out(r, c);
    int i = 0;
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != c) throw ShapeMismatch("from_rows: ragged rows");
        int j = 0;
        for (double v : row) out.at(i, j++) = v;
        ++i;
    }
    return out;
}

bool Tensor2::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Tensor2 matmul(const Tensor2& a, const Tensor2& b) {
    if (a.cols() != b.rows()) throw ShapeMismatch("matmul: inner dimensions differ");
    Tensor2 out(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < b.cols(); ++j) {
            CompensatedSum acc;
            for (int k = 0; k < a.cols(); ++k) acc.add(a.at(i, k) * b.at(k, j));
            out.at(i, j) = acc.result();
        }
    }
    return out;
}

Tensor2 matmul_nt(const Tensor2& a, const Tensor2& b) {
    if (a.cols() != b.cols()) throw ShapeMismatch("matmul_nt: inner dimensions differ");
    Tensor2 out(a.rows(), b.rows());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < b.rows(); ++j) {
            out.at(i, j) = cdot(a.row_span(i), b.row_span(j));
        }
    }
    return out;
}

Tensor2 matmul_tn(const Tensor2& a, const Tensor2& b) {
    if (a.rows() != b.rows()) throw ShapeMismatch("matmul_tn: inner dimensions differ");
    Tensor2 out(a.cols(), b.cols());
    for (int i = 0; i < a.cols(); ++i) {
        for (int j = 0; j < b.cols(); ++j) {
            CompensatedSum acc;
            for (int k = 0; k < a.rows(); ++k) acc.add(a.at(k, i) * b.at(k, j));
            out.at(i, j) = acc.result();
        }
    }
    return out;
}

void add_inplace(Tensor2& dst, const Tensor2& src) {
    if (!dst.same_shape(src)) throw ShapeMismatch("add_inplace: shape mismatch");
    for (int i = 0; i < dst.size(); ++i) dst.vec()[i] += src.vec()[i];
}

void axpy_inplace(Tensor2& dst, double alpha, const Tensor2& src) {
    if (!dst.same_shape(src)) throw ShapeMismatch("axpy_inplace: shape mismatch");
    for (int i = 0; i < dst.size(); ++i) dst.vec()[i] += alpha * src.vec()[i];
}

double l2_norm(std::span<const double> v) {
    CompensatedSum acc;
    for (double x : v) acc.add(x * x);
    return std::sqrt(acc.result());
}

std::vector<double> l2_normalize(std::span<const double> v) {
    const double n = l2_norm(v);
    if (!(n > kNormFloor)) throw NearZeroNorm("l2_normalize: norm below floor");
    std::vector<double> out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = v[i] / n;
    return out;
}

std::vector<double> log_softmax(std::span<const double> logits) {
    if (logits.empty()) throw ShapeMismatch("log_softmax: empty input");
    double mx = -std::numeric_limits<double>::infinity();
    for (double x : logits) mx = std::max(mx, x);
    CompensatedSum acc;
    for (double x : logits) acc.add(std::exp(x - mx));
    const double lse = mx + std::log(acc.result());
    std::vector<double> out(logits.size());
    for (size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
    return out;
}

double euclidean(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ShapeMismatch("euclidean: length mismatch");
    CompensatedSum acc;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc.add(d * d);
    }
    return std::sqrt(acc.result());
}

} // namespace cawcl
