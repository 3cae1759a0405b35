#ifndef DITCACHE_MODEL_HPP_
#define DITCACHE_MODEL_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "ditcache/tensor.hpp"

namespace ditcache {

struct ModelConfig {
    std::size_t token_count = 16;
    std::size_t channel_dim = 8;
    std::size_t hidden_dim = 32;
    std::size_t num_blocks = 4;
    std::size_t num_heads = 4;
    std::size_t cond_dim = 8;
    std::uint64_t weight_seed = 42;

    void validate() const;  // throws BadRange
    std::size_t head_dim() const { return hidden_dim / num_heads; }
    // Fixed per-forward cost constant for the flops proxy: counts the
    // multiply-adds of the projection, attention, and FFN matmuls.
    std::uint64_t flops_per_eval() const;
    std::string id_string() const;

    bool operator==(const ModelConfig&) const = default;
};

// Per-block parameters. ada_w/ada_b project the timestep embedding to
// [shift_attn | scale_attn | gate_attn | shift_ffn | scale_ffn | gate_ffn],
// so rows [0, 2H) form exactly the attention-input modulation used both in
// forward() and as the cache indicator.
struct BlockWeights {
    Tensor ada_w, ada_b;            // [6H x H], [6H]
    Tensor qkv_w, qkv_b;            // [3H x H], [3H]
    Tensor attn_out_w, attn_out_b;  // [H x H], [H]
    Tensor ffn1_w, ffn1_b;          // [4H x H], [4H]
    Tensor ffn2_w, ffn2_b;          // [H x 4H], [H]
};

struct ModelWeights {
    ModelConfig config;
    Tensor input_w, input_b;  // [H x C], [H]
    Tensor cond_w;            // [H x cond_dim]
    Tensor time_w1, time_b1;  // [H x H], [H]
    Tensor time_w2, time_b2;  // [H x H], [H]
    std::vector<BlockWeights> blocks;
    Tensor final_ada_w, final_ada_b;  // [2H x H], [2H]: shift | scale
    Tensor out_w, out_b;              // [C x H], [C]
};

struct TimestepEmbedding {
    Tensor vector;  // [hidden_dim]
};

struct ModulatedInput {
    Tensor tensor;  // [token_count, hidden_dim]
};

// Projection of a conditioning vector to per-channel shift and scale.
// Layout: rows [0, H) produce the shift, rows [H, 2H) the scale.
struct ModulationParams {
    const Tensor* w;  // [2H x H]
    const Tensor* b;  // [2H]
};

// First dim/2 entries sin(t / 10000^(2i/dim)), last dim/2 the matching cos.
// Throws OddDimension when dim is odd or zero.
Tensor sinusoidal_embed(double t, std::size_t dim);

// x * (1 + scale(emb)) + shift(emb) with scale/shift broadcast across rows.
ModulatedInput modulate(const Tensor& x, const TimestepEmbedding& emb,
                        const ModulationParams& params);

// Deterministic weight construction: a single counter stream seeded with
// config.weight_seed fills every parameter tensor in declaration order with
// uniform [-0.08, 0.08] draws; the gate rows of each block's ada projection
// are then scaled by 0.1 so untrained blocks stay close to the residual
// stream.
ModelWeights build_weights(const ModelConfig& config);

class DitModel {
public:
    explicit DitModel(const ModelConfig& config);
    explicit DitModel(ModelWeights weights);

    const ModelConfig& config() const { return weights_.config; }
    const ModelWeights& weights() const { return weights_; }

    TimestepEmbedding timestep_embedding(int t) const;

    // Full denoiser pass: x [tokens, channels], cond [cond_dim] ->
    // output of the same shape as x.
    Tensor forward(const Tensor& x, const TimestepEmbedding& emb,
                   const Tensor& cond) const;

    // The modulated input of block 0, computed by the same code path as
    // forward() but stopping before the attention call.
    ModulatedInput first_block_modulated_input(const Tensor& x,
                                               const TimestepEmbedding& emb,
                                               const Tensor& cond) const;

private:
    Tensor embed_input(const Tensor& x, const Tensor& cond) const;
    ModulatedInput block_modulated_input(const Tensor& hidden,
                                         const TimestepEmbedding& emb,
                                         const BlockWeights& block) const;

    ModelWeights weights_;
};

// Flat binary weight file: magic, version, config fields as little-endian
// integers, then every parameter tensor's row-major float64 payload in
// construction order.
void save_weights(const std::string& path, const ModelWeights& weights);
ModelWeights load_weights(const std::string& path);

}  // namespace ditcache

#endif  // DITCACHE_MODEL_HPP_
