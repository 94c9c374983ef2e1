#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "pathrel/tensor.hpp"

// Central finite-difference gradient oracle. Independent of any backward-pass
// code: it only re-evaluates the loss with perturbed values.
namespace gradcheck {

constexpr double kStep = 1e-5;

// rel error with a floor so near-zero gradient pairs compare on absolute terms
inline double rel_err(double analytic, double numeric) {
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-4});
    return std::abs(analytic - numeric) / denom;
}

struct Report {
    double max_rel_err = 0.0;
    std::string where;
};

// Compares `analytic_grad` for `values` against central differences of `loss`.
// `loss` must be a pure function of the current contents of `values`.
inline Report check_tensor(pathrel::Tensor& values, const pathrel::Tensor& analytic_grad,
                           const std::function<double()>& loss, const std::string& name,
                           double h = kStep) {
    Report rep;
    for (std::size_t i = 0; i < values.v.size(); ++i) {
        const pathrel::Real orig = values.v[i];
        values.v[i] = orig + static_cast<pathrel::Real>(h);
        const double fp = loss();
        values.v[i] = orig - static_cast<pathrel::Real>(h);
        const double fm = loss();
        values.v[i] = orig;
        const double numeric = (fp - fm) / (2.0 * h);
        const double e = rel_err(analytic_grad.v[i], numeric);
        if (e > rep.max_rel_err) {
            rep.max_rel_err = e;
            rep.where = name + "[" + std::to_string(i) + "]";
        }
    }
    return rep;
}

inline Report worst(const Report& a, const Report& b) {
    return (a.max_rel_err >= b.max_rel_err) ? a : b;
}

}  // namespace gradcheck
