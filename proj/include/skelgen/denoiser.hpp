#pragma once

#include "skelgen/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace skelgen {

// How the per-frame audio features reach the transformer.
//   FeatureConcat:  each frame token is [x_t[f] | audio[f]] (one-to-one pairing).
//   CrossAttention: frame tokens carry x_t only; every block attends to the
//                   projected audio sequence. Kept for the ablation study.
enum class ConditioningMode { FeatureConcat, CrossAttention };

ConditioningMode parse_conditioning_mode(const std::string& name);
std::string to_string(ConditioningMode mode);

struct DenoiserConfig {
    int d_model = 256;
    int n_layers = 8;
    int n_heads = 8;
    int max_frames = 80;
    int keypoint_dim = kMotionDim;
    int audio_dim = kAudioDim;
    int time_embed_dim = 128;
    int ff_mult = 4;
    ConditioningMode conditioning = ConditioningMode::FeatureConcat;
    bool use_reference = true;
    // Diagnostic: self-attention returns each token's own value vector, so
    // information cannot move between frames.
    bool identity_attention = false;

    int token_width() const {
        return conditioning == ConditioningMode::FeatureConcat ? keypoint_dim + audio_dim : keypoint_dim;
    }
    int num_tokens(int frames) const { return frames + (use_reference ? 1 : 0); }
};

// Throws std::invalid_argument naming the offending field.
void validate(const DenoiserConfig& config);

// y = x * w + b, with w stored (in x out) and b as a 1 x out row.
struct Linear {
    Matrix w;
    Matrix b;
};

struct DenoiserBlock {
    Linear modulation;  // d -> 6d: shift/scale/gate for attention and MLP
    Linear qkv;         // d -> 3d
    Linear attn_out;    // d -> d
    Linear ff_in;       // d -> ff_mult * d
    Linear ff_out;      // ff_mult * d -> d
    // Cross-attention mode only (empty otherwise).
    Linear cross_q;     // d -> d
    Linear cross_kv;    // d -> 2d
    Linear cross_out;   // d -> d
};

struct DenoiserParams {
    DenoiserConfig config;
    Linear input;        // token_width -> d
    Linear time_in;      // time_embed_dim -> d
    Linear time_out;     // d -> d
    Linear audio_in;     // cross-attention mode only: audio_dim -> d
    std::vector<DenoiserBlock> blocks;
    Linear final_modulation;  // d -> 2d
    Linear output;            // d -> keypoint_dim
    Matrix null_condition;    // 1 x audio_dim, learned stand-in for dropped audio

    // Visits every tensor with a stable dotted name, in a fixed order.
    template <typename Fn>
    void for_each(Fn&& fn) {
        visit(*this, fn);
    }
    template <typename Fn>
    void for_each(Fn&& fn) const {
        visit(*this, fn);
    }

    std::size_t parameter_count() const;

private:
    template <typename Self, typename Fn>
    static void visit(Self& self, Fn& fn) {
        auto lin = [&](const std::string& name, auto& l) {
            if (l.w.size() == 0) {
                return;
            }
            fn(name + ".w", l.w);
            fn(name + ".b", l.b);
        };
        lin("input", self.input);
        lin("time_in", self.time_in);
        lin("time_out", self.time_out);
        lin("audio_in", self.audio_in);
        for (std::size_t i = 0; i < self.blocks.size(); ++i) {
            auto& blk = self.blocks[i];
            const std::string p = "blocks." + std::to_string(i) + ".";
            lin(p + "modulation", blk.modulation);
            lin(p + "qkv", blk.qkv);
            lin(p + "attn_out", blk.attn_out);
            lin(p + "ff_in", blk.ff_in);
            lin(p + "ff_out", blk.ff_out);
            lin(p + "cross_q", blk.cross_q);
            lin(p + "cross_kv", blk.cross_kv);
            lin(p + "cross_out", blk.cross_out);
        }
        lin("final_modulation", self.final_modulation);
        lin("output", self.output);
        fn(std::string("null_condition"), self.null_condition);
    }
};

// Deterministic in the seed. The output projection starts near zero so the
// first predictions sit at the (normalized) data mean.
DenoiserParams init_params(const DenoiserConfig& config, std::uint64_t seed);

// Same structure, every tensor zero. Used for gradient accumulators.
DenoiserParams zeros_like(const DenoiserParams& params);

// Feature-concatenation tokens: row 0 is [reference | 0] when a reference is
// given, then one [x_t[f] | audio[f]] row per frame. A null `audio` means the
// unconditional branch: every frame carries `null_condition` instead.
Matrix assemble_tokens(const Matrix& x_t, const Matrix* reference, const Matrix* audio,
                       const Matrix& null_condition);

// Everything one forward pass consumes.
struct DenoiserInput {
    Matrix tokens;  // num_tokens x token_width
    Matrix memory;  // cross-attention mode: frames x audio_dim, else empty
    int step = 0;
    bool unconditional = false;
    bool has_reference = false;

    int frames() const { return static_cast<int>(tokens.rows()) - (has_reference ? 1 : 0); }
};

// Builds the model input for either conditioning mode. `reference` is a
// 1 x keypoint_dim row, ignored when the config disables it.
DenoiserInput make_input(const DenoiserParams& params, const Matrix& x_t, const Matrix* reference,
                         const Matrix* audio, int step);

namespace detail {

struct LayerNormCache {
    Matrix y;
    Vector inv_std;
};

struct AttentionCache {
    std::vector<Matrix> probs;  // one N x M matrix per head
};

struct BlockCache {
    Matrix modulation;
    LayerNormCache norm1;
    Matrix attn_in;
    Matrix qkv;
    AttentionCache attn;
    Matrix attn_heads;
    Matrix attn_proj;
    LayerNormCache norm_cross;
    Matrix cross_q;
    Matrix cross_kv;
    AttentionCache cross;
    Matrix cross_heads;
    LayerNormCache norm2;
    Matrix ff_x;
    Matrix ff_pre;
    Matrix ff_act;
    Matrix ff_proj;
};

}  // namespace detail

// Activations of one forward pass, kept for backprop.
struct ForwardCache {
    RowVector time_embedding;
    Matrix time_hidden_pre;
    Matrix cond;       // 1 x d timestep conditioning vector
    Matrix cond_act;   // silu(cond)
    Matrix memory;     // projected audio (cross-attention mode)
    std::vector<detail::BlockCache> blocks;
    Matrix final_modulation;
    detail::LayerNormCache norm_final;
    Matrix final_x;
};

// x0 prediction for the frame tokens (the reference token's output is dropped).
Matrix denoise(const DenoiserParams& params, const DenoiserInput& input);
Matrix denoise(const DenoiserParams& params, const DenoiserInput& input, ForwardCache& cache);

// Accumulates d(loss)/d(params) into `grads` given d(loss)/d(output).
void backward(const DenoiserParams& params, const DenoiserInput& input, const ForwardCache& cache,
              const Matrix& d_output, DenoiserParams& grads);

Matrix sinusoidal_positions(int count, int dim);
RowVector timestep_embedding(int step, int dim);

}  // namespace skelgen
