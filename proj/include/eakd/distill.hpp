#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eakd/autograd.hpp"
#include "eakd/tensor.hpp"

namespace eakd::distill {

enum class WeightingMode : std::uint8_t {
    none,             // w = 1, plain KD
    base,             // w = H_teacher
    interact,         // w = H_teacher * H_student / H_ub
    ea,               // w = (base + interact) / 2
    inverted_base,    // w = H_ub - base
    inverted_student, // w = H_ub - H_student
};

WeightingMode parse_weighting_mode(const std::string& name);
const char* weighting_mode_name(WeightingMode mode);

enum class LossKind : std::uint8_t { kd, dkd };
LossKind parse_loss_kind(const std::string& name);
const char* loss_kind_name(LossKind kind);

enum class Reduction : std::uint8_t { none, mean, sum };

struct DistillConfig {
    double distill_temperature = 4.0;   // T
    double entropy_temperature = 3.0;   // T', used only for the weighting entropies
    double diag_entropy_temperature = 1.0;  // temperature for diagnostic entropies
    int class_count = 2;                // C
    double ce_weight = 1.0;
    double kd_weight = 1.0;             // lambda
    double dkd_alpha = 1.0;
    double dkd_beta = 8.0;
    WeightingMode weighting_mode = WeightingMode::ea;
    bool normalize_weights = false;     // divide w by its batch mean before use

    double entropy_bound() const;       // H_ub = ln(class_count), never stored
    void validate() const;              // throws ConfigError
};

// Per-sample teacher/student entropies in nats, plus the shared bound.
struct EntropyPair {
    std::vector<double> teacher;
    std::vector<double> student;
    double bound = 0.0;  // ln C

    void validate() const;  // throws ContractError on out-of-range entries
};

struct SampleWeights {
    std::vector<double> values;
    WeightingMode mode = WeightingMode::none;
};

// Shannon entropy of softmax(logits / temperature) per row, in nats, clamped
// into [0, ln C]. Plain value math: entropies never join the gradient graph.
std::vector<double> entropy(const Tensor& logits, double temperature);

SampleWeights weight_base(const EntropyPair& h);
SampleWeights weight_interact(const EntropyPair& h);
SampleWeights weight_ea(const EntropyPair& h);
// Inverted control: every value becomes bound - value.
SampleWeights weight_inverted(const SampleWeights& w, double bound);

// Dispatch on mode; none yields all-ones. n is the sample count (used by none).
SampleWeights weights_for_mode(WeightingMode mode, const EntropyPair& h, std::size_t n);

// Per-sample KL(teacher(T) || student(T)) * T^2, shape [N]. The teacher side
// is plain data (detached); the student side stays differentiable.
ag::NodeId kd_loss(ag::Graph& g, const Tensor& teacher_logits, ag::NodeId student_logits, double temperature);

// Decoupled loss: per sample, (alpha * TCKD + beta * NCKD) * T^2 where TCKD is
// the binary KL over (p_target, 1 - p_target) and NCKD the KL over the
// renormalized non-target distribution.
ag::NodeId dkd_loss(ag::Graph& g, const Tensor& teacher_logits, ag::NodeId student_logits,
                    const std::vector<int>& targets, double alpha, double beta, double temperature);

// sum_n w_n * loss_n (or the mean). Weights enter as constants, so the
// gradient of the result w.r.t. student parameters is sum_n w_n * d(loss_n).
ag::NodeId reweighted_loss(ag::Graph& g, ag::NodeId per_sample, const SampleWeights& w, Reduction reduction);

// Mean over samples of -log p_target at temperature 1.
ag::NodeId cross_entropy(ag::Graph& g, ag::NodeId student_logits, const std::vector<int>& targets);

} // namespace eakd::distill
