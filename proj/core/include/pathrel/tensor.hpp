#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pathrel {

#ifdef PATHREL_REAL_FLOAT
using Real = float;
#else
using Real = double;
#endif

// Thrown for malformed or inconsistent input data (files, labels, headers).
// The CLI maps this to exit code 2; usage problems exit with 1.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Dense row-major tensor. Shapes are fixed at construction; all values must
// stay finite (NaN/Inf is a hard error wherever it is checked).
struct Tensor {
    std::vector<std::int64_t> shape;
    std::vector<Real> v;

    Tensor() = default;

    static Tensor zeros(std::vector<std::int64_t> shape);
    static Tensor scalar(Real x);
    static Tensor row(std::vector<Real> values);

    std::int64_t numel() const { return static_cast<std::int64_t>(v.size()); }
    bool empty() const { return v.empty(); }

    std::int64_t dim(std::size_t i) const { return shape.at(i); }
    std::int64_t rows() const { return shape.at(0); }
    std::int64_t cols() const { return shape.at(1); }

    Real& at(std::int64_t i) { return v[static_cast<std::size_t>(i)]; }
    Real at(std::int64_t i) const { return v[static_cast<std::size_t>(i)]; }
    Real& at(std::int64_t i, std::int64_t j) {
        return v[static_cast<std::size_t>(i * cols() + j)];
    }
    Real at(std::int64_t i, std::int64_t j) const {
        return v[static_cast<std::size_t>(i * cols() + j)];
    }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }
    std::string shape_str() const;

    void fill(Real x);
    void add_scaled(const Tensor& o, Real scale);  // this += scale * o
};

// Index of the first non-finite entry, or -1 if all entries are finite.
std::int64_t first_non_finite(const Tensor& t);

// Throws std::runtime_error naming `what` if any entry is NaN/Inf.
void check_finite(const Tensor& t, const std::string& what);

// Throws on shape mismatch, naming both shapes and the operation.
void check_same_shape(const Tensor& a, const Tensor& b, const std::string& op);

// A trainable tensor with its gradient and Adam state. All four tensors
// share one shape; adam_m/adam_v start at zero; step_count increments by
// exactly one per optimizer step.
struct Parameter {
    Tensor value;
    Tensor grad;
    Tensor adam_m;
    Tensor adam_v;
    std::int64_t step_count = 0;

    Parameter() = default;
    explicit Parameter(Tensor init);

    void zero_grad() { grad.fill(Real(0)); }
};

}  // namespace pathrel
