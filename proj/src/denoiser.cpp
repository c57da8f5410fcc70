#include "skelgen/denoiser.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace skelgen {

ConditioningMode parse_conditioning_mode(const std::string& name) {
    if (name == "feature_concat") {
        return ConditioningMode::FeatureConcat;
    }
    if (name == "cross_attention") {
        return ConditioningMode::CrossAttention;
    }
    throw std::invalid_argument("unknown conditioning mode '" + name + "' (expected feature_concat or cross_attention)");
}

std::string to_string(ConditioningMode mode) {
    return mode == ConditioningMode::FeatureConcat ? "feature_concat" : "cross_attention";
}

void validate(const DenoiserConfig& c) {
    auto positive = [](int v, const char* name) {
        if (v <= 0) {
            throw std::invalid_argument(std::string("denoiser config: ") + name + " must be positive");
        }
    };
    positive(c.d_model, "d_model");
    positive(c.n_layers, "n_layers");
    positive(c.n_heads, "n_heads");
    positive(c.max_frames, "max_frames");
    positive(c.keypoint_dim, "keypoint_dim");
    positive(c.audio_dim, "audio_dim");
    positive(c.time_embed_dim, "time_embed_dim");
    positive(c.ff_mult, "ff_mult");
    if (c.d_model % c.n_heads != 0) {
        throw std::invalid_argument("denoiser config: d_model must be divisible by n_heads");
    }
    if (c.time_embed_dim % 2 != 0) {
        throw std::invalid_argument("denoiser config: time_embed_dim must be even");
    }
}

std::size_t DenoiserParams::parameter_count() const {
    std::size_t n = 0;
    for_each([&](const std::string&, const Matrix& m) { n += static_cast<std::size_t>(m.size()); });
    return n;
}

namespace {

Linear make_linear(int in, int out) {
    return {Matrix::Zero(in, out), Matrix::Zero(1, out)};
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

bool starts_with(const std::string& s, const std::string& prefix) {
    return s.compare(0, prefix.size(), prefix) == 0;
}

}  // namespace

DenoiserParams init_params(const DenoiserConfig& config, std::uint64_t seed) {
    validate(config);
    const int d = config.d_model;
    DenoiserParams p;
    p.config = config;
    p.input = make_linear(config.token_width(), d);
    p.time_in = make_linear(config.time_embed_dim, d);
    p.time_out = make_linear(d, d);
    if (config.conditioning == ConditioningMode::CrossAttention) {
        p.audio_in = make_linear(config.audio_dim, d);
    }
    p.blocks.resize(config.n_layers);
    for (auto& blk : p.blocks) {
        blk.modulation = make_linear(d, 6 * d);
        blk.qkv = make_linear(d, 3 * d);
        blk.attn_out = make_linear(d, d);
        blk.ff_in = make_linear(d, config.ff_mult * d);
        blk.ff_out = make_linear(config.ff_mult * d, d);
        if (config.conditioning == ConditioningMode::CrossAttention) {
            blk.cross_q = make_linear(d, d);
            blk.cross_kv = make_linear(d, 2 * d);
            blk.cross_out = make_linear(d, d);
        }
    }
    p.final_modulation = make_linear(d, 2 * d);
    p.output = make_linear(d, config.keypoint_dim);
    p.null_condition = Matrix::Zero(1, config.audio_dim);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    p.for_each([&](const std::string& name, Matrix& m) {
        if (ends_with(name, ".b")) {
            return;  // biases start at zero
        }
        if (name == "null_condition") {
            for (Eigen::Index i = 0; i < m.size(); ++i) {
                m.data()[i] = normal(rng);
            }
        } else if (name == "output.w") {
            for (Eigen::Index i = 0; i < m.size(); ++i) {
                m.data()[i] = 1e-3 * normal(rng);
            }
        } else if (starts_with(name, "time_") || name.find("modulation") != std::string::npos) {
            for (Eigen::Index i = 0; i < m.size(); ++i) {
                m.data()[i] = 0.02 * normal(rng);
            }
        } else {
            // Xavier-uniform.
            const double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
            for (Eigen::Index i = 0; i < m.size(); ++i) {
                m.data()[i] = limit * uniform(rng);
            }
        }
    });
    return p;
}

DenoiserParams zeros_like(const DenoiserParams& params) {
    DenoiserParams g = params;
    g.for_each([](const std::string&, Matrix& m) { m.setZero(); });
    return g;
}

Matrix assemble_tokens(const Matrix& x_t, const Matrix* reference, const Matrix* audio,
                       const Matrix& null_condition) {
    const auto frames = x_t.rows();
    const auto kd = x_t.cols();
    const auto ad = null_condition.cols();
    if (null_condition.rows() != 1) {
        throw std::invalid_argument("assemble_tokens: null condition must be a single row");
    }
    if (audio != nullptr && (audio->rows() != frames || audio->cols() != ad)) {
        throw std::invalid_argument("assemble_tokens: audio is " + std::to_string(audio->rows()) + "x" +
                                    std::to_string(audio->cols()) + ", expected " + std::to_string(frames) +
                                    "x" + std::to_string(ad));
    }
    if (reference != nullptr && (reference->rows() != 1 || reference->cols() != kd)) {
        throw std::invalid_argument("assemble_tokens: reference must be 1 x " + std::to_string(kd));
    }
    const Eigen::Index offset = reference != nullptr ? 1 : 0;
    Matrix tokens = Matrix::Zero(frames + offset, kd + ad);
    if (reference != nullptr) {
        tokens.block(0, 0, 1, kd) = *reference;
    }
    tokens.block(offset, 0, frames, kd) = x_t;
    if (audio != nullptr) {
        tokens.block(offset, kd, frames, ad) = *audio;
    } else {
        tokens.block(offset, kd, frames, ad) = null_condition.replicate(frames, 1);
    }
    return tokens;
}

DenoiserInput make_input(const DenoiserParams& params, const Matrix& x_t, const Matrix* reference,
                         const Matrix* audio, int step) {
    const auto& c = params.config;
    const auto frames = static_cast<int>(x_t.rows());
    if (x_t.cols() != c.keypoint_dim) {
        throw std::invalid_argument("denoiser input: x_t has " + std::to_string(x_t.cols()) + " columns, expected " +
                                    std::to_string(c.keypoint_dim));
    }
    if (frames < 1 || frames > c.max_frames) {
        throw std::invalid_argument("denoiser input: " + std::to_string(frames) + " frames outside [1, " +
                                    std::to_string(c.max_frames) + "]");
    }
    if (c.use_reference && reference == nullptr) {
        throw std::invalid_argument("denoiser input: model expects a reference skeleton");
    }
    const Matrix* ref = c.use_reference ? reference : nullptr;

    DenoiserInput in;
    in.step = step;
    in.unconditional = audio == nullptr;
    in.has_reference = ref != nullptr;
    if (c.conditioning == ConditioningMode::FeatureConcat) {
        in.tokens = assemble_tokens(x_t, ref, audio, params.null_condition);
        return in;
    }
    if (audio != nullptr && (audio->rows() != frames || audio->cols() != c.audio_dim)) {
        throw std::invalid_argument("denoiser input: audio not aligned to " + std::to_string(frames) + " frames");
    }
    const Eigen::Index offset = ref != nullptr ? 1 : 0;
    in.tokens.resize(frames + offset, c.keypoint_dim);
    if (ref != nullptr) {
        if (ref->rows() != 1 || ref->cols() != c.keypoint_dim) {
            throw std::invalid_argument("denoiser input: reference must be 1 x " + std::to_string(c.keypoint_dim));
        }
        in.tokens.row(0) = ref->row(0);
    }
    in.tokens.bottomRows(frames) = x_t;
    in.memory = audio != nullptr ? *audio : Matrix(params.null_condition.replicate(frames, 1));
    return in;
}

Matrix sinusoidal_positions(int count, int dim) {
    Matrix pe(count, dim);
    const int half = dim / 2;
    for (int pos = 0; pos < count; ++pos) {
        for (int i = 0; i < half; ++i) {
            const double freq = std::exp(-std::log(10000.0) * i / static_cast<double>(half));
            pe(pos, i) = std::sin(pos * freq);
            pe(pos, half + i) = std::cos(pos * freq);
        }
        if (dim % 2 == 1) {
            pe(pos, dim - 1) = 0.0;
        }
    }
    return pe;
}

RowVector timestep_embedding(int step, int dim) {
    RowVector e(dim);
    const int half = dim / 2;
    for (int i = 0; i < half; ++i) {
        const double freq = std::exp(-std::log(10000.0) * i / static_cast<double>(half));
        e(i) = std::cos(step * freq);
        e(half + i) = std::sin(step * freq);
    }
    return e;
}

namespace {

using detail::AttentionCache;
using detail::BlockCache;
using detail::LayerNormCache;

constexpr double kLayerNormEps = 1e-6;

Matrix affine(const Matrix& x, const Linear& l) {
    Matrix y = x * l.w;
    y.rowwise() += l.b.row(0);
    return y;
}

// Accumulates weight/bias gradients; writes dx when requested.
void affine_backward(const Matrix& x, const Linear& l, const Matrix& dy, Linear& g, Matrix* dx) {
    g.w.noalias() += x.transpose() * dy;
    g.b += dy.colwise().sum();
    if (dx != nullptr) {
        *dx = dy * l.w.transpose();
    }
}

LayerNormCache layer_norm(const Matrix& x) {
    LayerNormCache c;
    const auto n = static_cast<double>(x.cols());
    c.y.resize(x.rows(), x.cols());
    c.inv_std.resize(x.rows());
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        const double mean = x.row(r).sum() / n;
        const auto centred = (x.row(r).array() - mean).eval();
        const double var = centred.square().sum() / n;
        c.inv_std(r) = 1.0 / std::sqrt(var + kLayerNormEps);
        c.y.row(r) = centred * c.inv_std(r);
    }
    return c;
}

Matrix layer_norm_backward(const LayerNormCache& c, const Matrix& dy) {
    const auto n = static_cast<double>(dy.cols());
    Matrix dx(dy.rows(), dy.cols());
    for (Eigen::Index r = 0; r < dy.rows(); ++r) {
        const double mean_dy = dy.row(r).sum() / n;
        const double mean_dy_y = dy.row(r).dot(c.y.row(r)) / n;
        dx.row(r) = c.inv_std(r) * (dy.row(r).array() - mean_dy - c.y.row(r).array() * mean_dy_y);
    }
    return dx;
}

double sigmoid(double x) {
    return 1.0 / (1.0 + std::exp(-x));
}

Matrix silu(const Matrix& x) {
    return x.unaryExpr([](double v) { return v * sigmoid(v); });
}

Matrix silu_grad(const Matrix& x) {
    return x.unaryExpr([](double v) {
        const double s = sigmoid(v);
        return s * (1.0 + v * (1.0 - s));
    });
}

constexpr double kGeluC = 0.7978845608028654;  // sqrt(2 / pi)

Matrix gelu(const Matrix& x) {
    return x.unaryExpr([](double v) { return 0.5 * v * (1.0 + std::tanh(kGeluC * (v + 0.044715 * v * v * v))); });
}

Matrix gelu_grad(const Matrix& x) {
    return x.unaryExpr([](double v) {
        const double th = std::tanh(kGeluC * (v + 0.044715 * v * v * v));
        return 0.5 * (1.0 + th) + 0.5 * v * (1.0 - th * th) * kGeluC * (1.0 + 3.0 * 0.044715 * v * v);
    });
}

// x * (1 + scale) + shift with 1 x d modulation rows.
Matrix modulate(const Matrix& x, const Matrix& shift, const Matrix& scale) {
    Matrix y = x.array().rowwise() * (1.0 + scale.row(0).array());
    y.rowwise() += shift.row(0);
    return y;
}

Matrix multi_head_attention(const Matrix& q, const Matrix& k, const Matrix& v, int heads, AttentionCache& cache) {
    const auto d = q.cols();
    const auto dh = d / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    Matrix out(q.rows(), d);
    cache.probs.resize(heads);
    for (int h = 0; h < heads; ++h) {
        Matrix s = (q.middleCols(h * dh, dh) * k.middleCols(h * dh, dh).transpose()) * scale;
        for (Eigen::Index r = 0; r < s.rows(); ++r) {
            const double mx = s.row(r).maxCoeff();
            s.row(r) = (s.row(r).array() - mx).exp();
            s.row(r) /= s.row(r).sum();
        }
        out.middleCols(h * dh, dh).noalias() = s * v.middleCols(h * dh, dh);
        cache.probs[h] = std::move(s);
    }
    return out;
}

void multi_head_attention_backward(const Matrix& q, const Matrix& k, const Matrix& v, const AttentionCache& cache,
                                   const Matrix& dout, Matrix& dq, Matrix& dk, Matrix& dv) {
    const auto heads = static_cast<int>(cache.probs.size());
    const auto d = q.cols();
    const auto dh = d / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    dq.setZero(q.rows(), d);
    dk.setZero(k.rows(), d);
    dv.setZero(v.rows(), d);
    for (int h = 0; h < heads; ++h) {
        const Matrix& p = cache.probs[h];
        const auto dout_h = dout.middleCols(h * dh, dh);
        dv.middleCols(h * dh, dh).noalias() = p.transpose() * dout_h;
        Matrix dp = dout_h * v.middleCols(h * dh, dh).transpose();
        const Vector row_dot = (dp.array() * p.array()).rowwise().sum();
        Matrix ds = p.array() * (dp.array().colwise() - row_dot.array());
        dq.middleCols(h * dh, dh).noalias() = ds * k.middleCols(h * dh, dh) * scale;
        dk.middleCols(h * dh, dh).noalias() = ds.transpose() * q.middleCols(h * dh, dh) * scale;
    }
}

struct ModSlices {
    Matrix shift1, scale1, gate1, shift2, scale2, gate2;
};

ModSlices split_modulation(const Matrix& mod, int d) {
    return {mod.middleCols(0, d), mod.middleCols(d, d),     mod.middleCols(2 * d, d),
            mod.middleCols(3 * d, d), mod.middleCols(4 * d, d), mod.middleCols(5 * d, d)};
}

Matrix block_forward(const DenoiserConfig& config, const DenoiserBlock& blk, const Matrix& h, const Matrix& cond_act,
                     const Matrix& memory, BlockCache& c) {
    const int d = config.d_model;
    c.modulation = affine(cond_act, blk.modulation);
    const auto m = split_modulation(c.modulation, d);

    c.norm1 = layer_norm(h);
    c.attn_in = modulate(c.norm1.y, m.shift1, m.scale1);
    c.qkv = affine(c.attn_in, blk.qkv);
    if (config.identity_attention) {
        c.attn_heads = c.qkv.rightCols(d);
    } else {
        c.attn_heads = multi_head_attention(c.qkv.leftCols(d), c.qkv.middleCols(d, d), c.qkv.rightCols(d),
                                            config.n_heads, c.attn);
    }
    c.attn_proj = affine(c.attn_heads, blk.attn_out);
    Matrix x = h + (c.attn_proj.array().rowwise() * m.gate1.row(0).array()).matrix();

    if (config.conditioning == ConditioningMode::CrossAttention) {
        c.norm_cross = layer_norm(x);
        c.cross_q = affine(c.norm_cross.y, blk.cross_q);
        c.cross_kv = affine(memory, blk.cross_kv);
        c.cross_heads = multi_head_attention(c.cross_q, c.cross_kv.leftCols(d), c.cross_kv.rightCols(d),
                                             config.n_heads, c.cross);
        x += affine(c.cross_heads, blk.cross_out);
    }

    c.norm2 = layer_norm(x);
    c.ff_x = modulate(c.norm2.y, m.shift2, m.scale2);
    c.ff_pre = affine(c.ff_x, blk.ff_in);
    c.ff_act = gelu(c.ff_pre);
    c.ff_proj = affine(c.ff_act, blk.ff_out);
    x += (c.ff_proj.array().rowwise() * m.gate2.row(0).array()).matrix();
    return x;
}

// dh holds d(loss)/d(block output) on entry and d(loss)/d(block input) on exit.
void block_backward(const DenoiserConfig& config, const DenoiserBlock& blk, const BlockCache& c,
                    const Matrix& cond_act, const Matrix& memory, Matrix& dh, DenoiserBlock& g,
                    Matrix& d_cond_act, Matrix* d_memory) {
    const int d = config.d_model;
    const auto m = split_modulation(c.modulation, d);
    Matrix d_mod(1, 6 * d);

    // Feed-forward branch.
    const Matrix d_ff_proj = dh.array().rowwise() * m.gate2.row(0).array();
    d_mod.middleCols(5 * d, d) = (dh.array() * c.ff_proj.array()).colwise().sum();
    Matrix d_ff_act;
    affine_backward(c.ff_act, blk.ff_out, d_ff_proj, g.ff_out, &d_ff_act);
    const Matrix d_ff_pre = d_ff_act.array() * gelu_grad(c.ff_pre).array();
    Matrix d_ff_x;
    affine_backward(c.ff_x, blk.ff_in, d_ff_pre, g.ff_in, &d_ff_x);
    d_mod.middleCols(3 * d, d) = d_ff_x.colwise().sum();
    d_mod.middleCols(4 * d, d) = (d_ff_x.array() * c.norm2.y.array()).colwise().sum();
    dh += layer_norm_backward(c.norm2, d_ff_x.array().rowwise() * (1.0 + m.scale2.row(0).array()));

    if (config.conditioning == ConditioningMode::CrossAttention) {
        Matrix d_heads;
        affine_backward(c.cross_heads, blk.cross_out, dh, g.cross_out, &d_heads);
        Matrix dq, dk, dv;
        multi_head_attention_backward(c.cross_q, c.cross_kv.leftCols(d), c.cross_kv.rightCols(d), c.cross, d_heads,
                                      dq, dk, dv);
        Matrix d_norm;
        affine_backward(c.norm_cross.y, blk.cross_q, dq, g.cross_q, &d_norm);
        Matrix d_kv(memory.rows(), 2 * d);
        d_kv << dk, dv;
        Matrix d_mem;
        affine_backward(memory, blk.cross_kv, d_kv, g.cross_kv, &d_mem);
        *d_memory += d_mem;
        dh += layer_norm_backward(c.norm_cross, d_norm);
    }

    // Self-attention branch.
    const Matrix d_attn_proj = dh.array().rowwise() * m.gate1.row(0).array();
    d_mod.middleCols(2 * d, d) = (dh.array() * c.attn_proj.array()).colwise().sum();
    Matrix d_heads;
    affine_backward(c.attn_heads, blk.attn_out, d_attn_proj, g.attn_out, &d_heads);
    Matrix d_qkv = Matrix::Zero(c.qkv.rows(), 3 * d);
    if (config.identity_attention) {
        d_qkv.rightCols(d) = d_heads;
    } else {
        Matrix dq, dk, dv;
        multi_head_attention_backward(c.qkv.leftCols(d), c.qkv.middleCols(d, d), c.qkv.rightCols(d), c.attn,
                                      d_heads, dq, dk, dv);
        d_qkv << dq, dk, dv;
    }
    Matrix d_attn_in;
    affine_backward(c.attn_in, blk.qkv, d_qkv, g.qkv, &d_attn_in);
    d_mod.middleCols(0, d) = d_attn_in.colwise().sum();
    d_mod.middleCols(d, d) = (d_attn_in.array() * c.norm1.y.array()).colwise().sum();
    dh += layer_norm_backward(c.norm1, d_attn_in.array().rowwise() * (1.0 + m.scale1.row(0).array()));

    Matrix d_ca;
    affine_backward(cond_act, blk.modulation, d_mod, g.modulation, &d_ca);
    d_cond_act += d_ca;
}

void check_input(const DenoiserParams& params, const DenoiserInput& input) {
    const auto& c = params.config;
    if (input.tokens.cols() != c.token_width()) {
        throw std::invalid_argument("denoise: token width " + std::to_string(input.tokens.cols()) +
                                    " does not match config width " + std::to_string(c.token_width()));
    }
    if (input.has_reference != c.use_reference) {
        throw std::invalid_argument("denoise: reference token presence disagrees with config");
    }
    const int frames = input.frames();
    if (frames < 1 || frames > c.max_frames) {
        throw std::invalid_argument("denoise: " + std::to_string(frames) + " frames outside [1, " +
                                    std::to_string(c.max_frames) + "]");
    }
    if (c.conditioning == ConditioningMode::CrossAttention &&
        (input.memory.rows() != frames || input.memory.cols() != c.audio_dim)) {
        throw std::invalid_argument("denoise: cross-attention memory must be frames x audio_dim");
    }
    if (input.step < 0) {
        throw std::invalid_argument("denoise: negative diffusion step");
    }
}

}  // namespace

Matrix denoise(const DenoiserParams& params, const DenoiserInput& input, ForwardCache& cache) {
    check_input(params, input);
    const auto& config = params.config;
    const int d = config.d_model;
    const auto n = static_cast<int>(input.tokens.rows());
    const int frames = input.frames();
    const int offset = input.has_reference ? 1 : 0;

    cache.time_embedding = timestep_embedding(input.step, config.time_embed_dim);
    cache.time_hidden_pre = affine(cache.time_embedding, params.time_in);
    cache.cond = affine(silu(cache.time_hidden_pre), params.time_out);
    cache.cond_act = silu(cache.cond);

    const Matrix positions = sinusoidal_positions(n, d);
    Matrix h = affine(input.tokens, params.input) + positions;
    if (config.conditioning == ConditioningMode::CrossAttention) {
        // Audio rows share the positional code of the frame token they belong to.
        cache.memory = affine(input.memory, params.audio_in) + positions.bottomRows(frames);
    } else {
        cache.memory.resize(0, 0);
    }

    cache.blocks.resize(params.blocks.size());
    for (std::size_t i = 0; i < params.blocks.size(); ++i) {
        h = block_forward(config, params.blocks[i], h, cache.cond_act, cache.memory, cache.blocks[i]);
    }

    cache.final_modulation = affine(cache.cond_act, params.final_modulation);
    cache.norm_final = layer_norm(h);
    cache.final_x = modulate(cache.norm_final.y, cache.final_modulation.leftCols(d),
                             cache.final_modulation.rightCols(d));
    const Matrix out = affine(cache.final_x, params.output);
    return out.bottomRows(n - offset);
}

Matrix denoise(const DenoiserParams& params, const DenoiserInput& input) {
    ForwardCache cache;
    return denoise(params, input, cache);
}

void backward(const DenoiserParams& params, const DenoiserInput& input, const ForwardCache& cache,
              const Matrix& d_output, DenoiserParams& grads) {
    const auto& config = params.config;
    const int d = config.d_model;
    const auto n = input.tokens.rows();
    const int frames = input.frames();
    if (d_output.rows() != frames || d_output.cols() != config.keypoint_dim) {
        throw std::invalid_argument("backward: output gradient shape mismatch");
    }

    Matrix d_out = Matrix::Zero(n, config.keypoint_dim);
    d_out.bottomRows(frames) = d_output;

    Matrix d_final_x;
    affine_backward(cache.final_x, params.output, d_out, grads.output, &d_final_x);
    const Matrix scale = cache.final_modulation.rightCols(d);
    Matrix d_fmod(1, 2 * d);
    d_fmod.leftCols(d) = d_final_x.colwise().sum();
    d_fmod.rightCols(d) = (d_final_x.array() * cache.norm_final.y.array()).colwise().sum();
    Matrix dh = layer_norm_backward(cache.norm_final, d_final_x.array().rowwise() * (1.0 + scale.row(0).array()));

    Matrix d_cond_act;
    affine_backward(cache.cond_act, params.final_modulation, d_fmod, grads.final_modulation, &d_cond_act);

    Matrix d_memory;
    const bool cross = config.conditioning == ConditioningMode::CrossAttention;
    if (cross) {
        d_memory = Matrix::Zero(cache.memory.rows(), cache.memory.cols());
    }
    for (auto i = static_cast<std::ptrdiff_t>(params.blocks.size()) - 1; i >= 0; --i) {
        block_backward(config, params.blocks[i], cache.blocks[i], cache.cond_act, cache.memory, dh, grads.blocks[i],
                       d_cond_act, cross ? &d_memory : nullptr);
    }

    affine_backward(input.tokens, params.input, dh, grads.input, nullptr);
    if (cross) {
        affine_backward(input.memory, params.audio_in, d_memory, grads.audio_in, nullptr);
        if (input.unconditional) {
            grads.null_condition += d_memory.colwise().sum() * params.audio_in.w.transpose();
        }
    } else if (input.unconditional) {
        const auto audio_rows = params.input.w.bottomRows(config.audio_dim);
        grads.null_condition += dh.bottomRows(frames).colwise().sum() * audio_rows.transpose();
    }

    const Matrix d_cond = d_cond_act.array() * silu_grad(cache.cond).array();
    Matrix d_hidden;
    affine_backward(silu(cache.time_hidden_pre), params.time_out, d_cond, grads.time_out, &d_hidden);
    const Matrix d_pre = d_hidden.array() * silu_grad(cache.time_hidden_pre).array();
    affine_backward(cache.time_embedding, params.time_in, d_pre, grads.time_in, nullptr);
}

}  // namespace skelgen
