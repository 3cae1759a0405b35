#include "ditcache/model.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <utility>

#include "ditcache/errors.hpp"
#include "ditcache/kernels.hpp"
#include "ditcache/prng.hpp"

namespace ditcache {

namespace {

constexpr double kLayerNormEps = 1e-6;
constexpr double kWeightScale = 0.08;
constexpr double kGateInitScale = 0.1;
// The final-layer scale projection runs at a higher gain than the block
// modulations, so output magnitudes respond strongly to the timestep the
// way trained denoisers do; input-side differences then understate
// output differences by a step-dependent factor.
constexpr double kFinalScaleGain = 6.0;

void fill_uniform(CounterRng& rng, Tensor& t) {
    for (std::size_t i = 0; i < t.numel(); ++i) {
        t[i] = rng.next_uniform(-kWeightScale, kWeightScale);
    }
}

// Scale rows [row_lo, row_hi) of a [rows x cols] matrix and the matching
// bias entries.
void scale_rows(Tensor& w, Tensor& b, std::size_t cols, std::size_t row_lo,
                std::size_t row_hi, double factor) {
    for (std::size_t r = row_lo; r < row_hi; ++r) {
        for (std::size_t c = 0; c < cols; ++c) w.at(r, c) *= factor;
        b[r] *= factor;
    }
}

Tensor linear_1d(const Tensor& x, const Tensor& w, const Tensor* b) {
    const std::size_t out_dim = w.dim(0);
    Tensor y({out_dim});
    kernels::linear(x.data(), 1, w.dim(1), w.data(), b ? b->data() : nullptr,
                    out_dim, y.data());
    return y;
}

Tensor linear_2d(const Tensor& x, const Tensor& w, const Tensor* b) {
    const std::size_t rows = x.dim(0);
    const std::size_t out_dim = w.dim(0);
    Tensor y({rows, out_dim});
    kernels::linear(x.data(), rows, w.dim(1), w.data(),
                    b ? b->data() : nullptr, out_dim, y.data());
    return y;
}

Tensor layer_norm(const Tensor& x) {
    Tensor y(x.shape());
    kernels::layer_norm_rows(x.data(), x.dim(0), x.dim(1), kLayerNormEps,
                             y.data());
    return y;
}

}  // namespace

void ModelConfig::validate() const {
    if (token_count == 0 || channel_dim == 0 || hidden_dim == 0 ||
        num_blocks == 0 || num_heads == 0 || cond_dim == 0) {
        throw BadRange("model dimensions must be >= 1");
    }
    if (hidden_dim % num_heads != 0) {
        throw BadRange("hidden_dim must be divisible by num_heads");
    }
    if (hidden_dim % 2 != 0) {
        throw OddDimension("hidden_dim must be even for sinusoidal features");
    }
}

std::uint64_t ModelConfig::flops_per_eval() const {
    const std::uint64_t n = token_count;
    const std::uint64_t c = channel_dim;
    const std::uint64_t h = hidden_dim;
    const std::uint64_t k = cond_dim;
    std::uint64_t per_block = 0;
    per_block += 2 * n * h * 3 * h;      // qkv projection
    per_block += 2 * n * n * h * 2;      // scores and value mix
    per_block += 2 * n * h * h;          // attention output projection
    per_block += 2 * n * h * 4 * h * 2;  // two FFN matmuls
    per_block += 2 * h * 6 * h;          // ada projection
    std::uint64_t total = num_blocks * per_block;
    total += 2 * n * c * h;      // input projection
    total += 2 * k * h;          // conditioning projection
    total += 2 * h * h * 2;      // timestep MLP
    total += 2 * h * 2 * h;      // final modulation projection
    total += 2 * n * h * c;      // output projection
    return total;
}

std::string ModelConfig::id_string() const {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "m%llu-t%zu-c%zu-h%zu-b%zu-a%zu-k%zu",
                  static_cast<unsigned long long>(weight_seed), token_count,
                  channel_dim, hidden_dim, num_blocks, num_heads, cond_dim);
    return buf;
}

Tensor sinusoidal_embed(double t, std::size_t dim) {
    if (dim == 0 || dim % 2 != 0) {
        throw OddDimension("sinusoidal_embed: dim must be even and positive");
    }
    const std::size_t half = dim / 2;
    Tensor out({dim});
    for (std::size_t i = 0; i < half; ++i) {
        const double freq =
            std::pow(10000.0, -2.0 * static_cast<double>(i) /
                                  static_cast<double>(dim));
        out[i] = std::sin(t * freq);
        out[half + i] = std::cos(t * freq);
    }
    return out;
}

ModulatedInput modulate(const Tensor& x, const TimestepEmbedding& emb,
                        const ModulationParams& params) {
    const std::size_t hidden = emb.vector.numel();
    if (x.rank() != 2 || x.dim(1) != hidden ||
        params.w->dim(0) != 2 * hidden || params.w->dim(1) != hidden) {
        throw ShapeMismatch("modulate: inconsistent shapes");
    }
    const Tensor shift_scale = linear_1d(emb.vector, *params.w, params.b);
    Tensor out(x.shape());
    kernels::modulate_rows(x.data(), x.dim(0), hidden,
                           shift_scale.data() + hidden, shift_scale.data(),
                           out.data());
    return ModulatedInput{std::move(out)};
}

ModelWeights build_weights(const ModelConfig& config) {
    config.validate();
    const std::size_t h = config.hidden_dim;
    const std::size_t c = config.channel_dim;

    ModelWeights w;
    w.config = config;
    CounterRng rng(config.weight_seed);

    auto make = [&rng](std::vector<std::size_t> shape) {
        Tensor t(std::move(shape));
        fill_uniform(rng, t);
        return t;
    };

    w.input_w = make({h, c});
    w.input_b = make({h});
    w.cond_w = make({h, config.cond_dim});
    w.time_w1 = make({h, h});
    w.time_b1 = make({h});
    w.time_w2 = make({h, h});
    w.time_b2 = make({h});

    w.blocks.resize(config.num_blocks);
    for (auto& block : w.blocks) {
        block.ada_w = make({6 * h, h});
        block.ada_b = make({6 * h});
        block.qkv_w = make({3 * h, h});
        block.qkv_b = make({3 * h});
        block.attn_out_w = make({h, h});
        block.attn_out_b = make({h});
        block.ffn1_w = make({4 * h, h});
        block.ffn1_b = make({4 * h});
        block.ffn2_w = make({h, 4 * h});
        block.ffn2_b = make({h});
        scale_rows(block.ada_w, block.ada_b, h, 2 * h, 3 * h, kGateInitScale);
        scale_rows(block.ada_w, block.ada_b, h, 5 * h, 6 * h, kGateInitScale);
    }

    w.final_ada_w = make({2 * h, h});
    w.final_ada_b = make({2 * h});
    scale_rows(w.final_ada_w, w.final_ada_b, h, h, 2 * h, kFinalScaleGain);
    w.out_w = make({c, h});
    w.out_b = make({c});
    return w;
}

DitModel::DitModel(const ModelConfig& config)
    : weights_(build_weights(config)) {}

DitModel::DitModel(ModelWeights weights) : weights_(std::move(weights)) {
    weights_.config.validate();
}

TimestepEmbedding DitModel::timestep_embedding(int t) const {
    const Tensor sins =
        sinusoidal_embed(static_cast<double>(t), config().hidden_dim);
    Tensor hidden = linear_1d(sins, weights_.time_w1, &weights_.time_b1);
    Tensor activated(hidden.shape());
    kernels::silu(hidden.data(), hidden.numel(), activated.data());
    Tensor out = linear_1d(activated, weights_.time_w2, &weights_.time_b2);
    if (!out.all_finite()) {
        throw Error("timestep_embedding produced non-finite values");
    }
    return TimestepEmbedding{std::move(out)};
}

Tensor DitModel::embed_input(const Tensor& x, const Tensor& cond) const {
    const ModelConfig& cfg = config();
    if (x.rank() != 2 || x.dim(0) != cfg.token_count ||
        x.dim(1) != cfg.channel_dim) {
        throw ShapeMismatch("forward: latent shape does not match config");
    }
    if (cond.rank() != 1 || cond.dim(0) != cfg.cond_dim) {
        throw ShapeMismatch("forward: conditioning shape does not match config");
    }
    Tensor hidden = linear_2d(x, weights_.input_w, &weights_.input_b);
    // Constant conditioning enters as a per-channel bias shared by all
    // tokens.
    const Tensor cond_bias = linear_1d(cond, weights_.cond_w, nullptr);
    for (std::size_t r = 0; r < hidden.dim(0); ++r) {
        for (std::size_t c = 0; c < hidden.dim(1); ++c) {
            hidden.at(r, c) += cond_bias[c];
        }
    }
    return hidden;
}

ModulatedInput DitModel::block_modulated_input(
    const Tensor& hidden, const TimestepEmbedding& emb,
    const BlockWeights& block) const {
    // Rows [0, 2H) of the ada projection are the attention-input shift and
    // scale; reuse them directly as standalone modulation parameters.
    const std::size_t h = config().hidden_dim;
    const Tensor normed = layer_norm(hidden);
    Tensor shift_scale_w({2 * h, h});
    Tensor shift_scale_b({2 * h});
    std::memcpy(shift_scale_w.data(), block.ada_w.data(),
                2 * h * h * sizeof(double));
    std::memcpy(shift_scale_b.data(), block.ada_b.data(),
                2 * h * sizeof(double));
    const ModulationParams params{&shift_scale_w, &shift_scale_b};
    return modulate(normed, emb, params);
}

Tensor DitModel::forward(const Tensor& x, const TimestepEmbedding& emb,
                         const Tensor& cond) const {
    const ModelConfig& cfg = config();
    const std::size_t n = cfg.token_count;
    const std::size_t h = cfg.hidden_dim;

    Tensor hidden = embed_input(x, cond);

    for (const BlockWeights& block : weights_.blocks) {
        const Tensor ada =
            linear_1d(emb.vector, block.ada_w, &block.ada_b);  // [6H]
        const double* gate_attn = ada.data() + 2 * h;
        const double* shift_ffn = ada.data() + 3 * h;
        const double* scale_ffn = ada.data() + 4 * h;
        const double* gate_ffn = ada.data() + 5 * h;

        const ModulatedInput attn_in =
            block_modulated_input(hidden, emb, block);
        const Tensor qkv = linear_2d(attn_in.tensor, block.qkv_w, &block.qkv_b);
        Tensor attn_mix({n, h});
        kernels::attention(qkv.data(), n, cfg.num_heads, cfg.head_dim(),
                           attn_mix.data());
        const Tensor attn_out =
            linear_2d(attn_mix, block.attn_out_w, &block.attn_out_b);
        kernels::gated_add_rows(hidden.data(), attn_out.data(), gate_attn, n,
                                h);

        const Tensor ffn_normed = layer_norm(hidden);
        Tensor ffn_in(ffn_normed.shape());
        kernels::modulate_rows(ffn_normed.data(), n, h, scale_ffn, shift_ffn,
                               ffn_in.data());
        const Tensor ffn_mid = linear_2d(ffn_in, block.ffn1_w, &block.ffn1_b);
        Tensor ffn_act(ffn_mid.shape());
        kernels::silu(ffn_mid.data(), ffn_mid.numel(), ffn_act.data());
        const Tensor ffn_out = linear_2d(ffn_act, block.ffn2_w, &block.ffn2_b);
        kernels::gated_add_rows(hidden.data(), ffn_out.data(), gate_ffn, n, h);
    }

    const ModulationParams final_params{&weights_.final_ada_w,
                                        &weights_.final_ada_b};
    const ModulatedInput final_mod =
        modulate(layer_norm(hidden), emb, final_params);
    Tensor out = linear_2d(final_mod.tensor, weights_.out_w, &weights_.out_b);
    if (!out.all_finite()) {
        throw Error("forward produced non-finite values");
    }
    return out;
}

ModulatedInput DitModel::first_block_modulated_input(
    const Tensor& x, const TimestepEmbedding& emb, const Tensor& cond) const {
    const Tensor hidden = embed_input(x, cond);
    ModulatedInput out =
        block_modulated_input(hidden, emb, weights_.blocks.front());
    if (!out.tensor.all_finite()) {
        throw Error("modulated input contains non-finite values");
    }
    return out;
}

namespace {

constexpr char kWeightMagic[4] = {'D', 'C', 'W', '1'};
constexpr std::uint32_t kWeightVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "weight files are little-endian");

template <typename T>
void write_pod(std::ofstream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    return value;
}

template <typename Fn>
void for_each_tensor(ModelWeights& w, Fn&& fn) {
    fn(w.input_w);
    fn(w.input_b);
    fn(w.cond_w);
    fn(w.time_w1);
    fn(w.time_b1);
    fn(w.time_w2);
    fn(w.time_b2);
    for (auto& block : w.blocks) {
        fn(block.ada_w);
        fn(block.ada_b);
        fn(block.qkv_w);
        fn(block.qkv_b);
        fn(block.attn_out_w);
        fn(block.attn_out_b);
        fn(block.ffn1_w);
        fn(block.ffn1_b);
        fn(block.ffn2_w);
        fn(block.ffn2_b);
    }
    fn(w.final_ada_w);
    fn(w.final_ada_b);
    fn(w.out_w);
    fn(w.out_b);
}

}  // namespace

void save_weights(const std::string& path, const ModelWeights& weights) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open weight file for writing: " + path);
    out.write(kWeightMagic, sizeof(kWeightMagic));
    write_pod(out, kWeightVersion);
    const ModelConfig& cfg = weights.config;
    write_pod(out, static_cast<std::uint32_t>(cfg.token_count));
    write_pod(out, static_cast<std::uint32_t>(cfg.channel_dim));
    write_pod(out, static_cast<std::uint32_t>(cfg.hidden_dim));
    write_pod(out, static_cast<std::uint32_t>(cfg.num_blocks));
    write_pod(out, static_cast<std::uint32_t>(cfg.num_heads));
    write_pod(out, static_cast<std::uint32_t>(cfg.cond_dim));
    write_pod(out, cfg.weight_seed);
    for_each_tensor(const_cast<ModelWeights&>(weights), [&](Tensor& t) {
        out.write(reinterpret_cast<const char*>(t.data()),
                  static_cast<std::streamsize>(t.numel() * sizeof(double)));
    });
    if (!out) throw IoError("short write to weight file: " + path);
}

ModelWeights load_weights(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open weight file: " + path);
    char magic[4];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kWeightMagic, sizeof(magic)) != 0) {
        throw IoError("bad weight file magic: " + path);
    }
    if (read_pod<std::uint32_t>(in) != kWeightVersion) {
        throw IoError("unsupported weight file version: " + path);
    }
    ModelConfig cfg;
    cfg.token_count = read_pod<std::uint32_t>(in);
    cfg.channel_dim = read_pod<std::uint32_t>(in);
    cfg.hidden_dim = read_pod<std::uint32_t>(in);
    cfg.num_blocks = read_pod<std::uint32_t>(in);
    cfg.num_heads = read_pod<std::uint32_t>(in);
    cfg.cond_dim = read_pod<std::uint32_t>(in);
    cfg.weight_seed = read_pod<std::uint64_t>(in);
    cfg.validate();

    // Build for shapes, then overwrite every payload tensor from the file.
    ModelWeights w = build_weights(cfg);
    for_each_tensor(w, [&](Tensor& t) {
        in.read(reinterpret_cast<char*>(t.data()),
                static_cast<std::streamsize>(t.numel() * sizeof(double)));
    });
    if (!in) throw IoError("truncated weight file: " + path);
    return w;
}

}  // namespace ditcache
