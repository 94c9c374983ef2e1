#pragma once

#include <cstdint>
#include <vector>

#include "pathrel/nn.hpp"
#include "pathrel/tensor.hpp"

namespace pathrel {

// One LSTM layer: gate pre-activations are Wx*x + Wh*h_prev + b with the four
// gates packed in the row order [input, forget, candidate, output].
struct LstmLayerParams {
    Parameter wx;  // [4H, input_width]
    Parameter wh;  // [4H, H]
    Parameter b;   // [4H]
};

// Stacked LSTM. Layer 0 consumes input_dim-wide vectors, higher layers consume
// the hidden state of the layer below.
struct LstmStack {
    std::int64_t num_layers = 0;
    std::int64_t input_dim = 0;
    std::int64_t hidden_dim = 0;
    std::vector<LstmLayerParams> layers;

    static LstmStack make(std::int64_t num_layers, std::int64_t input_dim,
                          std::int64_t hidden_dim, Rng& rng);

    std::vector<Parameter*> parameters();
};

// Per-layer hidden and cell states.
struct LstmState {
    std::vector<Tensor> h;
    std::vector<Tensor> c;

    static LstmState zero(const LstmStack& stack);
    const Tensor& top_hidden() const { return h.back(); }
};

// Cached activations for backpropagation through time.
struct LstmTrace {
    struct StepLayer {
        Tensor x;       // input to the layer at this step
        Tensor h_prev;
        Tensor c_prev;
        Tensor gate_i, gate_f, gate_g, gate_o;
        Tensor c;
    };
    // steps[t][l]
    std::vector<std::vector<StepLayer>> steps;
};

// Advances all layers by one input vector e_t (width input_dim). When `trace`
// is non-null the step's activations are appended for a later backward pass.
LstmState lstm_step(const LstmStack& stack, const LstmState& prev, const Tensor& e_t,
                    LstmTrace* trace = nullptr);

// Runs the full sequence from the zero state and returns the final top-layer
// hidden state (the path vector).
Tensor lstm_forward(const LstmStack& stack, const std::vector<Tensor>& seq,
                    LstmTrace* trace = nullptr);

// Backpropagation through time. `d_top` is dL/d(final top hidden). Parameter
// grads accumulate in the stack; per-step input gradients are written to
// `dinputs` when non-null.
void lstm_backward(LstmStack& stack, const LstmTrace& trace, const Tensor& d_top,
                   std::vector<Tensor>* dinputs = nullptr);

}  // namespace pathrel
