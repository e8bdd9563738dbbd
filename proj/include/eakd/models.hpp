#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eakd/autograd.hpp"
#include "eakd/tensor.hpp"

namespace eakd::models {

// MLP: affine + relu blocks, final affine without activation.
struct MlpSpec {
    std::size_t input_dim = 1;
    std::vector<std::size_t> hidden_dims;
    std::size_t class_count = 2;

    void validate() const;
    // layer widths including input and output: input, hidden..., class_count
    std::vector<std::size_t> widths() const;
};

// Named parameter tensors in layer order: layer{i}.weight [in x out],
// layer{i}.bias [out].
struct ModelParams {
    std::vector<std::pair<std::string, Tensor>> tensors;

    Tensor& find(const std::string& name);
    const Tensor& find(const std::string& name) const;
    std::size_t layer_count() const { return tensors.size() / 2; }
};

// Glorot-uniform weights, zero biases. Bitwise deterministic for a seed.
ModelParams init(const MlpSpec& spec, std::uint64_t seed);

// Throws ConfigError naming the first layer whose shape does not chain with
// the spec.
void validate_params(const ModelParams& params, const MlpSpec& spec);

// Reconstructs the MlpSpec a parameter set implies; throws ConfigError naming
// the first layer whose name or shape breaks the expected chain.
MlpSpec infer_spec(const ModelParams& params);

// Forward pass without gradients (teacher path, evaluation).
Tensor forward(const ModelParams& params, const Tensor& batch);

// Forward pass through a graph. param_ids must come from bind_params on the
// same graph; returns the logits node.
std::vector<ag::NodeId> bind_params(ag::Graph& g, const ModelParams& params);
ag::NodeId forward(ag::Graph& g, const std::vector<ag::NodeId>& param_ids, ag::NodeId batch,
                   std::size_t layer_count);

// Checkpoint file: magic "EAKD", version u32 LE, tensor count u32 LE; per
// tensor: name length u16 LE, name bytes, rank u8, dims u64 LE, f64 LE data.
void save_checkpoint(const ModelParams& params, const std::string& path);
ModelParams load_checkpoint(const std::string& path);

} // namespace eakd::models
