#include "aqa/lstm.hpp"

#include <cmath>
#include <string>

#include "aqa/errors.hpp"
#include "aqa/numeric.hpp"

namespace aqa {

namespace {

void check_weights(const LstmWeights& w) {
    std::size_t M = w.hidden_dim, D = w.input_dim;
    if (w.W.size() != 4 * M * D || w.U.size() != 4 * M * M || w.b.size() != 4 * M)
        throw ShapeError("lstm: parameter storage does not match M=" + std::to_string(M) +
                         ", D=" + std::to_string(D));
}

}  // namespace

const std::vector<double>& LstmTrace::hidden_at(std::size_t step) const {
    if (!valid || step >= steps.size())
        throw StateError("lstm trace: no cached hidden state for step " +
                         std::to_string(step));
    return steps[step].h;
}

LstmState lstm_cell_forward(const LstmWeights& w, std::span<const double> x,
                            std::span<const double> h_prev, std::span<const double> c_prev,
                            LstmStepCache* cache) {
    check_weights(w);
    std::size_t M = w.hidden_dim, D = w.input_dim;
    if (x.size() != D)
        throw ShapeError("lstm_cell_forward: input length " + std::to_string(x.size()) +
                         " != D=" + std::to_string(D));
    if (h_prev.size() != M || c_prev.size() != M)
        throw ShapeError("lstm_cell_forward: state length != M=" + std::to_string(M));

    // z = W x + U h_prev + b, all four gates at once
    std::vector<double> z(4 * M);
    matvec(w.W, x, z, 4 * M, D);
    std::vector<double> zu(4 * M);
    matvec(w.U, h_prev, zu, 4 * M, M);
    for (std::size_t r = 0; r < 4 * M; ++r) z[r] += zu[r] + w.b[r];

    LstmState state;
    state.h.resize(M);
    state.c.resize(M);
    std::vector<double> gi(M), gf(M), gg(M), go(M), tanh_c(M);
    for (std::size_t k = 0; k < M; ++k) {
        gi[k] = sigmoid(z[k]);
        gf[k] = sigmoid(z[M + k]);
        gg[k] = std::tanh(z[2 * M + k]);
        go[k] = sigmoid(z[3 * M + k]);
        state.c[k] = gf[k] * c_prev[k] + gi[k] * gg[k];
        tanh_c[k] = std::tanh(state.c[k]);
        state.h[k] = go[k] * tanh_c[k];
    }

    if (cache) {
        cache->x.assign(x.begin(), x.end());
        cache->h_prev.assign(h_prev.begin(), h_prev.end());
        cache->c_prev.assign(c_prev.begin(), c_prev.end());
        cache->i = std::move(gi);
        cache->f = std::move(gf);
        cache->g = std::move(gg);
        cache->o = std::move(go);
        cache->c = state.c;
        cache->tanh_c = std::move(tanh_c);
        cache->h = state.h;
    }
    return state;
}

std::vector<double> lstm_sequence_forward(const LstmWeights& w,
                                          const ClipFeatureSequence& seq,
                                          LstmTrace* trace) {
    check_weights(w);
    if (seq.clip_count() == 0)
        throw ShapeError("lstm_sequence_forward: empty sequence");
    if (seq.dim != w.input_dim)
        throw ShapeError("lstm_sequence_forward: clip dim " + std::to_string(seq.dim) +
                         " != D=" + std::to_string(w.input_dim));

    std::size_t M = w.hidden_dim;
    LstmState state{std::vector<double>(M, 0.0), std::vector<double>(M, 0.0)};
    if (trace) {
        trace->steps.clear();
        trace->steps.resize(seq.clip_count());
        trace->valid = false;
    }
    for (std::size_t t = 0; t < seq.clip_count(); ++t) {
        LstmStepCache* cache = trace ? &trace->steps[t] : nullptr;
        state = lstm_cell_forward(w, seq.clip(t), state.h, state.c, cache);
    }
    if (trace) trace->valid = true;
    return state.h;
}

void lstm_backward(const LstmWeights& w, const LstmTrace& trace,
                   std::span<const double> d_h_final, LstmGrads grads) {
    if (!trace.valid || trace.steps.empty())
        throw StateError("lstm_backward called without a completed forward trace");
    std::size_t M = w.hidden_dim, D = w.input_dim;
    if (d_h_final.size() != M)
        throw ShapeError("lstm_backward: output gradient length != M");
    if (grads.W.size() != w.W.size() || grads.U.size() != w.U.size() ||
        grads.b.size() != w.b.size())
        throw ShapeError("lstm_backward: gradient storage mismatch");

    std::vector<double> dh(d_h_final.begin(), d_h_final.end());
    std::vector<double> dc(M, 0.0);
    std::vector<double> dz(4 * M), dh_prev(M);

    for (std::size_t t = trace.steps.size(); t-- > 0;) {
        const LstmStepCache& s = trace.steps[t];
        for (std::size_t k = 0; k < M; ++k) {
            double tc = s.tanh_c[k];
            double d_o = dh[k] * tc;
            double dc_total = dc[k] + dh[k] * s.o[k] * (1.0 - tc * tc);
            double d_i = dc_total * s.g[k];
            double d_f = dc_total * s.c_prev[k];
            double d_g = dc_total * s.i[k];
            dz[k] = d_i * s.i[k] * (1.0 - s.i[k]);
            dz[M + k] = d_f * s.f[k] * (1.0 - s.f[k]);
            dz[2 * M + k] = d_g * (1.0 - s.g[k] * s.g[k]);
            dz[3 * M + k] = d_o * s.o[k] * (1.0 - s.o[k]);
            dc[k] = dc_total * s.f[k];
        }
        outer_accumulate(grads.W, dz, s.x);
        outer_accumulate(grads.U, dz, s.h_prev);
        for (std::size_t r = 0; r < 4 * M; ++r) grads.b[r] += dz[r];
        matvec_transposed(w.U, dz, dh_prev, 4 * M, M);
        dh = dh_prev;
    }
}

}  // namespace aqa
