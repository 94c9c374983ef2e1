#pragma once

#include <cstdint>
#include <vector>

#include "pathrel/rng.hpp"
#include "pathrel/tensor.hpp"

namespace pathrel {

// y[i] = W x[i] + b for a batch x of shape [n, d_in], W [d_out, d_in], b [d_out].
Tensor affine(const Tensor& x, const Tensor& w, const Tensor& b);

// Backward of affine: accumulates dL/dW and dL/db into the parameter grads and
// returns dL/dx. `dy` has the output shape [n, d_out].
Tensor affine_backward(const Tensor& x, const Tensor& w, const Tensor& dy,
                       Tensor& dw_acc, Tensor& db_acc);

inline Tensor affine(const Tensor& x, const Parameter& w, const Parameter& b) {
    return affine(x, w.value, b.value);
}
inline Tensor affine_backward(const Tensor& x, Parameter& w, Parameter& b,
                              const Tensor& dy) {
    return affine_backward(x, w.value, dy, w.grad, b.grad);
}

Tensor tanh_forward(const Tensor& x);
// dL/dx given the forward output y = tanh(x) and upstream dL/dy.
Tensor tanh_backward(const Tensor& y, const Tensor& dy);

double sigmoid(double x);
// log(sigmoid(x)) computed without overflow for large |x|.
double log_sigmoid(double x);

// Row-wise softmax with max-subtraction; rows sum to 1.
Tensor softmax_rows(const Tensor& logits);

struct SoftmaxXentResult {
    double loss = 0.0;   // mean negative log-likelihood over the batch
    Tensor probs;        // [n, C]
    Tensor dlogits;      // (softmax - one_hot) / n
};

// Mean cross-entropy over a batch of logits [n, C] and class labels in [0, C).
SoftmaxXentResult softmax_cross_entropy(const Tensor& logits,
                                        const std::vector<std::int64_t>& labels);

struct AdamConfig {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// One bias-corrected Adam step on p using p.grad; zeroes the grad afterwards.
// Non-finite gradient entries are a hard error.
void adam_update(Parameter& p, const AdamConfig& cfg);

// Inverted-dropout mask: entries are 0 with probability rate, else 1/(1-rate).
// rate must lie in [0, 1). rate == 0 yields the all-ones mask without
// consuming randomness.
Tensor dropout_mask(const std::vector<std::int64_t>& shape, double rate, Rng& rng);

// Uniform in [-sqrt(6/(fan_in+fan_out)), +sqrt(6/(fan_in+fan_out))].
Tensor init_glorot(std::int64_t rows, std::int64_t cols, Rng& rng);
// Uniform in [-0.5/dim, 0.5/dim], the embedding-table init.
Tensor init_embedding(std::int64_t rows, std::int64_t dim, Rng& rng);
// Uniform in [-bound, bound].
Tensor init_uniform(const std::vector<std::int64_t>& shape, double bound, Rng& rng);

}  // namespace pathrel
