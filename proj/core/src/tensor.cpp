#include "pathrel/tensor.hpp"

#include <cmath>
#include <sstream>

namespace pathrel {

Tensor Tensor::zeros(std::vector<std::int64_t> shape) {
    Tensor t;
    std::int64_t n = 1;
    for (std::int64_t d : shape) {
        if (d <= 0) throw std::invalid_argument("Tensor: non-positive dimension");
        n *= d;
    }
    t.shape = std::move(shape);
    t.v.assign(static_cast<std::size_t>(n), Real(0));
    return t;
}

Tensor Tensor::scalar(Real x) {
    Tensor t = zeros({1});
    t.v[0] = x;
    return t;
}

Tensor Tensor::row(std::vector<Real> values) {
    Tensor t;
    t.shape = {static_cast<std::int64_t>(values.size())};
    t.v = std::move(values);
    return t;
}

std::string Tensor::shape_str() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << ",";
        os << shape[i];
    }
    os << "]";
    return os.str();
}

void Tensor::fill(Real x) {
    for (Real& e : v) e = x;
}

void Tensor::add_scaled(const Tensor& o, Real scale) {
    check_same_shape(*this, o, "add_scaled");
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += scale * o.v[i];
}

std::int64_t first_non_finite(const Tensor& t) {
    for (std::size_t i = 0; i < t.v.size(); ++i) {
        if (!std::isfinite(t.v[i])) return static_cast<std::int64_t>(i);
    }
    return -1;
}

void check_finite(const Tensor& t, const std::string& what) {
    std::int64_t i = first_non_finite(t);
    if (i >= 0) {
        throw std::runtime_error("non-finite value in " + what + " at flat index " +
                                 std::to_string(i));
    }
}

void check_same_shape(const Tensor& a, const Tensor& b, const std::string& op) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument(op + ": shape mismatch " + a.shape_str() + " vs " +
                                    b.shape_str());
    }
}

Parameter::Parameter(Tensor init)
    : value(std::move(init)),
      grad(Tensor::zeros(value.shape)),
      adam_m(Tensor::zeros(value.shape)),
      adam_v(Tensor::zeros(value.shape)) {}

}  // namespace pathrel
