#include "pathrel/nn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pathrel {

namespace {

void require_2d(const Tensor& t, const char* what) {
    if (t.shape.size() != 2) {
        throw std::invalid_argument(std::string(what) + ": expected 2-d tensor, got " +
                                    t.shape_str());
    }
}

}  // namespace

Tensor affine(const Tensor& x, const Tensor& w, const Tensor& b) {
    require_2d(x, "affine x");
    require_2d(w, "affine W");
    if (b.shape.size() != 1 || b.dim(0) != w.rows() || x.cols() != w.cols()) {
        throw std::invalid_argument("affine: shape mismatch x" + x.shape_str() + " W" +
                                    w.shape_str() + " b" + b.shape_str());
    }
    const std::int64_t n = x.rows(), din = x.cols(), dout = w.rows();
    Tensor y = Tensor::zeros({n, dout});
    for (std::int64_t i = 0; i < n; ++i) {
        const Real* xi = &x.v[static_cast<std::size_t>(i * din)];
        Real* yi = &y.v[static_cast<std::size_t>(i * dout)];
        for (std::int64_t o = 0; o < dout; ++o) {
            const Real* wo = &w.v[static_cast<std::size_t>(o * din)];
            Real acc = b.at(o);
            for (std::int64_t k = 0; k < din; ++k) acc += wo[k] * xi[k];
            yi[o] = acc;
        }
    }
    return y;
}

Tensor affine_backward(const Tensor& x, const Tensor& w, const Tensor& dy,
                       Tensor& dw_acc, Tensor& db_acc) {
    const std::int64_t n = x.rows(), din = x.cols(), dout = w.rows();
    if (dy.shape.size() != 2 || dy.rows() != n || dy.cols() != dout) {
        throw std::invalid_argument("affine_backward: dy shape " + dy.shape_str() +
                                    " does not match output [" + std::to_string(n) + "," +
                                    std::to_string(dout) + "]");
    }
    Tensor dx = Tensor::zeros({n, din});
    for (std::int64_t i = 0; i < n; ++i) {
        const Real* xi = &x.v[static_cast<std::size_t>(i * din)];
        const Real* dyi = &dy.v[static_cast<std::size_t>(i * dout)];
        Real* dxi = &dx.v[static_cast<std::size_t>(i * din)];
        for (std::int64_t o = 0; o < dout; ++o) {
            const Real g = dyi[o];
            if (g == Real(0)) continue;
            Real* dwo = &dw_acc.v[static_cast<std::size_t>(o * din)];
            const Real* wo = &w.v[static_cast<std::size_t>(o * din)];
            for (std::int64_t k = 0; k < din; ++k) {
                dwo[k] += g * xi[k];
                dxi[k] += g * wo[k];
            }
            db_acc.at(o) += g;
        }
    }
    return dx;
}

Tensor tanh_forward(const Tensor& x) {
    Tensor y = x;
    for (Real& e : y.v) e = std::tanh(e);
    return y;
}

Tensor tanh_backward(const Tensor& y, const Tensor& dy) {
    check_same_shape(y, dy, "tanh_backward");
    Tensor dx = y;
    for (std::size_t i = 0; i < dx.v.size(); ++i) {
        dx.v[i] = dy.v[i] * (Real(1) - y.v[i] * y.v[i]);
    }
    return dx;
}

double sigmoid(double x) {
    if (x >= 0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double log_sigmoid(double x) {
    // log(1/(1+exp(-x))) = -log1p(exp(-x)) for x>=0, x - log1p(exp(x)) otherwise
    if (x >= 0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

Tensor softmax_rows(const Tensor& logits) {
    require_2d(logits, "softmax");
    const std::int64_t n = logits.rows(), c = logits.cols();
    Tensor p = logits;
    for (std::int64_t i = 0; i < n; ++i) {
        Real* row = &p.v[static_cast<std::size_t>(i * c)];
        Real mx = row[0];
        for (std::int64_t j = 1; j < c; ++j) mx = std::max(mx, row[j]);
        Real sum = 0;
        for (std::int64_t j = 0; j < c; ++j) {
            row[j] = std::exp(row[j] - mx);
            sum += row[j];
        }
        for (std::int64_t j = 0; j < c; ++j) row[j] /= sum;
    }
    return p;
}

SoftmaxXentResult softmax_cross_entropy(const Tensor& logits,
                                        const std::vector<std::int64_t>& labels) {
    require_2d(logits, "softmax_cross_entropy");
    const std::int64_t n = logits.rows(), c = logits.cols();
    if (static_cast<std::int64_t>(labels.size()) != n) {
        throw std::invalid_argument("softmax_cross_entropy: " + std::to_string(labels.size()) +
                                    " labels for " + std::to_string(n) + " rows");
    }
    for (std::int64_t lab : labels) {
        if (lab < 0 || lab >= c) {
            throw std::out_of_range("softmax_cross_entropy: label " + std::to_string(lab) +
                                    " out of range [0," + std::to_string(c) + ")");
        }
    }
    SoftmaxXentResult r;
    r.probs = softmax_rows(logits);
    r.dlogits = r.probs;
    double loss = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        const Real p = r.probs.at(i, labels[static_cast<std::size_t>(i)]);
        loss -= std::log(std::max(static_cast<double>(p), 1e-300));
        r.dlogits.at(i, labels[static_cast<std::size_t>(i)]) -= Real(1);
    }
    const Real inv_n = Real(1) / static_cast<Real>(n);
    for (Real& e : r.dlogits.v) e *= inv_n;
    r.loss = loss / static_cast<double>(n);
    return r;
}

void adam_update(Parameter& p, const AdamConfig& cfg) {
    if (std::int64_t i = first_non_finite(p.grad); i >= 0) {
        throw std::runtime_error("adam_update: non-finite gradient at flat index " +
                                 std::to_string(i));
    }
    p.step_count += 1;
    const double t = static_cast<double>(p.step_count);
    const double bc1 = 1.0 - std::pow(cfg.beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.beta2, t);
    for (std::size_t i = 0; i < p.value.v.size(); ++i) {
        const double g = p.grad.v[i];
        const double m = cfg.beta1 * p.adam_m.v[i] + (1.0 - cfg.beta1) * g;
        const double v = cfg.beta2 * p.adam_v.v[i] + (1.0 - cfg.beta2) * g * g;
        p.adam_m.v[i] = static_cast<Real>(m);
        p.adam_v.v[i] = static_cast<Real>(v);
        const double mhat = m / bc1;
        const double vhat = v / bc2;
        p.value.v[i] -= static_cast<Real>(cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps));
    }
    p.zero_grad();
}

Tensor dropout_mask(const std::vector<std::int64_t>& shape, double rate, Rng& rng) {
    if (rate < 0.0 || rate >= 1.0) {
        throw std::invalid_argument("dropout_mask: rate " + std::to_string(rate) +
                                    " outside [0,1)");
    }
    Tensor m = Tensor::zeros(shape);
    if (rate == 0.0) {
        m.fill(Real(1));
        return m;
    }
    const Real keep_scale = static_cast<Real>(1.0 / (1.0 - rate));
    for (Real& e : m.v) e = (rng.uniform() < rate) ? Real(0) : keep_scale;
    return m;
}

Tensor init_glorot(std::int64_t rows, std::int64_t cols, Rng& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
    return init_uniform({rows, cols}, bound, rng);
}

Tensor init_embedding(std::int64_t rows, std::int64_t dim, Rng& rng) {
    return init_uniform({rows, dim}, 0.5 / static_cast<double>(dim), rng);
}

Tensor init_uniform(const std::vector<std::int64_t>& shape, double bound, Rng& rng) {
    Tensor t = Tensor::zeros(shape);
    for (Real& e : t.v) e = static_cast<Real>(rng.uniform(-bound, bound));
    return t;
}

}  // namespace pathrel
