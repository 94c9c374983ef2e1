#include "pathrel/lstm.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pathrel {

namespace {

// pre = Wx*x + Wh*h + b, packed [4H].
Tensor gate_preactivations(const LstmLayerParams& lp, const Tensor& x, const Tensor& h) {
    const std::int64_t rows = lp.wx.value.rows();
    const std::int64_t in_w = lp.wx.value.cols();
    const std::int64_t hid = lp.wh.value.cols();
    Tensor pre = Tensor::zeros({rows});
    for (std::int64_t r = 0; r < rows; ++r) {
        const Real* wx = &lp.wx.value.v[static_cast<std::size_t>(r * in_w)];
        const Real* wh = &lp.wh.value.v[static_cast<std::size_t>(r * hid)];
        Real acc = lp.b.value.at(r);
        for (std::int64_t k = 0; k < in_w; ++k) acc += wx[k] * x.at(k);
        for (std::int64_t k = 0; k < hid; ++k) acc += wh[k] * h.at(k);
        pre.at(r) = acc;
    }
    return pre;
}

}  // namespace

LstmStack LstmStack::make(std::int64_t num_layers, std::int64_t input_dim,
                          std::int64_t hidden_dim, Rng& rng) {
    if (num_layers < 1 || input_dim < 1 || hidden_dim < 1) {
        throw std::invalid_argument("LstmStack: non-positive dimension");
    }
    LstmStack s;
    s.num_layers = num_layers;
    s.input_dim = input_dim;
    s.hidden_dim = hidden_dim;
    for (std::int64_t l = 0; l < num_layers; ++l) {
        const std::int64_t in_w = (l == 0) ? input_dim : hidden_dim;
        LstmLayerParams lp;
        lp.wx = Parameter(init_glorot(4 * hidden_dim, in_w, rng));
        lp.wh = Parameter(init_glorot(4 * hidden_dim, hidden_dim, rng));
        lp.b = Parameter(Tensor::zeros({4 * hidden_dim}));
        s.layers.push_back(std::move(lp));
    }
    return s;
}

std::vector<Parameter*> LstmStack::parameters() {
    std::vector<Parameter*> ps;
    for (auto& lp : layers) {
        ps.push_back(&lp.wx);
        ps.push_back(&lp.wh);
        ps.push_back(&lp.b);
    }
    return ps;
}

LstmState LstmState::zero(const LstmStack& stack) {
    LstmState st;
    for (std::int64_t l = 0; l < stack.num_layers; ++l) {
        st.h.push_back(Tensor::zeros({stack.hidden_dim}));
        st.c.push_back(Tensor::zeros({stack.hidden_dim}));
    }
    return st;
}

LstmState lstm_step(const LstmStack& stack, const LstmState& prev, const Tensor& e_t,
                    LstmTrace* trace) {
    if (e_t.numel() != stack.input_dim) {
        throw std::invalid_argument("lstm_step: input width " + std::to_string(e_t.numel()) +
                                    " != " + std::to_string(stack.input_dim));
    }
    if (static_cast<std::int64_t>(prev.h.size()) != stack.num_layers) {
        throw std::invalid_argument("lstm_step: state has " + std::to_string(prev.h.size()) +
                                    " layers, stack has " + std::to_string(stack.num_layers));
    }
    const std::int64_t hid = stack.hidden_dim;
    LstmState next = prev;
    std::vector<LstmTrace::StepLayer> step_trace;
    Tensor x = e_t;
    for (std::int64_t l = 0; l < stack.num_layers; ++l) {
        const auto& lp = stack.layers[static_cast<std::size_t>(l)];
        const Tensor& h_prev = prev.h[static_cast<std::size_t>(l)];
        const Tensor& c_prev = prev.c[static_cast<std::size_t>(l)];
        if (h_prev.numel() != hid || c_prev.numel() != hid) {
            throw std::invalid_argument("lstm_step: state width mismatch at layer " +
                                        std::to_string(l));
        }
        Tensor pre = gate_preactivations(lp, x, h_prev);
        Tensor gi = Tensor::zeros({hid}), gf = Tensor::zeros({hid});
        Tensor gg = Tensor::zeros({hid}), go = Tensor::zeros({hid});
        Tensor c = Tensor::zeros({hid}), h = Tensor::zeros({hid});
        for (std::int64_t k = 0; k < hid; ++k) {
            gi.at(k) = static_cast<Real>(sigmoid(pre.at(k)));
            gf.at(k) = static_cast<Real>(sigmoid(pre.at(hid + k)));
            gg.at(k) = std::tanh(pre.at(2 * hid + k));
            go.at(k) = static_cast<Real>(sigmoid(pre.at(3 * hid + k)));
            c.at(k) = gf.at(k) * c_prev.at(k) + gi.at(k) * gg.at(k);
            h.at(k) = go.at(k) * std::tanh(c.at(k));
        }
        if (trace) {
            LstmTrace::StepLayer sl;
            sl.x = x;
            sl.h_prev = h_prev;
            sl.c_prev = c_prev;
            sl.gate_i = gi;
            sl.gate_f = gf;
            sl.gate_g = gg;
            sl.gate_o = go;
            sl.c = c;
            step_trace.push_back(std::move(sl));
        }
        next.h[static_cast<std::size_t>(l)] = h;
        next.c[static_cast<std::size_t>(l)] = c;
        x = next.h[static_cast<std::size_t>(l)];
    }
    if (trace) trace->steps.push_back(std::move(step_trace));
    return next;
}

Tensor lstm_forward(const LstmStack& stack, const std::vector<Tensor>& seq,
                    LstmTrace* trace) {
    if (seq.empty()) throw std::invalid_argument("lstm_forward: empty sequence");
    LstmState st = LstmState::zero(stack);
    for (const Tensor& e : seq) st = lstm_step(stack, st, e, trace);
    return st.top_hidden();
}

void lstm_backward(LstmStack& stack, const LstmTrace& trace, const Tensor& d_top,
                   std::vector<Tensor>* dinputs) {
    const std::int64_t hid = stack.hidden_dim;
    const std::int64_t num_layers = stack.num_layers;
    const std::int64_t steps = static_cast<std::int64_t>(trace.steps.size());
    if (steps == 0) throw std::invalid_argument("lstm_backward: empty trace");
    if (d_top.numel() != hid) {
        throw std::invalid_argument("lstm_backward: d_top width " +
                                    std::to_string(d_top.numel()));
    }
    if (dinputs) dinputs->assign(static_cast<std::size_t>(steps), Tensor());

    std::vector<Tensor> dh, dc;
    for (std::int64_t l = 0; l < num_layers; ++l) {
        dh.push_back(Tensor::zeros({hid}));
        dc.push_back(Tensor::zeros({hid}));
    }
    dh[static_cast<std::size_t>(num_layers - 1)] = d_top;

    for (std::int64_t t = steps - 1; t >= 0; --t) {
        Tensor dx_from_above;
        for (std::int64_t l = num_layers - 1; l >= 0; --l) {
            const auto& sl = trace.steps[static_cast<std::size_t>(t)][static_cast<std::size_t>(l)];
            auto& lp = stack.layers[static_cast<std::size_t>(l)];
            Tensor& dh_l = dh[static_cast<std::size_t>(l)];
            Tensor& dc_l = dc[static_cast<std::size_t>(l)];
            if (l < num_layers - 1) dh_l.add_scaled(dx_from_above, Real(1));

            const std::int64_t in_w = lp.wx.value.cols();
            Tensor dpre = Tensor::zeros({4 * hid});
            Tensor dh_prev = Tensor::zeros({hid});
            Tensor dc_prev = Tensor::zeros({hid});
            for (std::int64_t k = 0; k < hid; ++k) {
                const Real tc = std::tanh(sl.c.at(k));
                const Real d_o = dh_l.at(k) * tc;
                const Real dc_tot = dc_l.at(k) + dh_l.at(k) * sl.gate_o.at(k) * (Real(1) - tc * tc);
                const Real d_i = dc_tot * sl.gate_g.at(k);
                const Real d_f = dc_tot * sl.c_prev.at(k);
                const Real d_g = dc_tot * sl.gate_i.at(k);
                dc_prev.at(k) = dc_tot * sl.gate_f.at(k);
                dpre.at(k) = d_i * sl.gate_i.at(k) * (Real(1) - sl.gate_i.at(k));
                dpre.at(hid + k) = d_f * sl.gate_f.at(k) * (Real(1) - sl.gate_f.at(k));
                dpre.at(2 * hid + k) = d_g * (Real(1) - sl.gate_g.at(k) * sl.gate_g.at(k));
                dpre.at(3 * hid + k) = d_o * sl.gate_o.at(k) * (Real(1) - sl.gate_o.at(k));
            }
            Tensor dx = Tensor::zeros({in_w});
            for (std::int64_t r = 0; r < 4 * hid; ++r) {
                const Real g = dpre.at(r);
                if (g == Real(0)) continue;
                Real* dwx = &lp.wx.grad.v[static_cast<std::size_t>(r * in_w)];
                const Real* wx = &lp.wx.value.v[static_cast<std::size_t>(r * in_w)];
                for (std::int64_t k = 0; k < in_w; ++k) {
                    dwx[k] += g * sl.x.at(k);
                    dx.at(k) += g * wx[k];
                }
                Real* dwh = &lp.wh.grad.v[static_cast<std::size_t>(r * hid)];
                const Real* wh = &lp.wh.value.v[static_cast<std::size_t>(r * hid)];
                for (std::int64_t k = 0; k < hid; ++k) {
                    dwh[k] += g * sl.h_prev.at(k);
                    dh_prev.at(k) += g * wh[k];
                }
                lp.b.grad.at(r) += g;
            }
            dh_l = dh_prev;
            dc_l = dc_prev;
            dx_from_above = std::move(dx);
        }
        if (dinputs) (*dinputs)[static_cast<std::size_t>(t)] = std::move(dx_from_above);
    }
}

}  // namespace pathrel
