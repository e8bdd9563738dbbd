#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "eakd/data.hpp"
#include "eakd/distill.hpp"
#include "eakd/models.hpp"

namespace eakd::trainer {

struct TrainConfig {
    int epochs = 30;
    std::size_t batch_size = 64;
    double learning_rate = 0.05;
    double momentum = 0.9;
    double weight_decay = 5e-4;
    std::vector<int> lr_decay_epochs = {20, 25};  // 1-based, strictly increasing
    double lr_decay_factor = 0.1;
    std::uint64_t seed = 1;
    distill::DistillConfig distill;
    distill::LossKind loss_kind = distill::LossKind::kd;

    void validate() const;
    double lr_for_epoch(int epoch) const;  // step decay applied at listed epochs
};

// One row of the per-epoch metrics CSV (see records_csv_header()).
struct TrainRecord {
    int epoch = 0;
    double loss_total = 0.0;
    double loss_ce = 0.0;
    double loss_kd = 0.0;
    double acc_student = 0.0;
    double acc_teacher = 0.0;
    std::array<double, 4> quartile_share{};  // KD-loss share per teacher-entropy quartile
    std::array<double, 4> segment_gap{};     // teacher - student accuracy per quartile segment
    double w_min = 0.0, w_mean = 0.0, w_max = 0.0;
    // student entropy five-number summary over the top-10% teacher-entropy samples
    double hs_min = 0.0, hs_q1 = 0.0, hs_med = 0.0, hs_q3 = 0.0, hs_max = 0.0;
};

std::string records_csv_header();
void write_records_csv(const std::vector<TrainRecord>& records, const std::string& path);

// SGD with momentum: v <- momentum * v + grad + weight_decay * param;
// param <- param - lr * v.
struct SgdState {
    std::vector<Tensor> velocity;  // aligned with ModelParams order
};

void sgd_step(models::ModelParams& params, const std::vector<Tensor>& grads, SgdState& state,
              double lr, double momentum, double weight_decay);

struct EvalResult {
    double accuracy = 0.0;
    std::vector<double> entropy;       // per sample, at the given temperature
    std::vector<std::uint8_t> correct; // per sample
    std::vector<int> predicted;
};

// Top-1 accuracy with lowest-index tie-break, plus per-sample entropy and
// correctness.
EvalResult evaluate(const models::ModelParams& params, const data::Dataset& ds,
                    double entropy_temperature = 1.0);

struct TrainResult {
    models::ModelParams params;
    std::vector<TrainRecord> records;
};

// Cross-entropy-only training. Writes a checkpoint when checkpoint_path is
// non-empty. Aborts with DivergenceError on a non-finite loss.
TrainResult train_teacher(const models::MlpSpec& spec, const data::Dataset& train,
                          const data::Dataset& val, const TrainConfig& config,
                          const std::string& checkpoint_path = "");

// Distillation: ce_weight * CE + kd_weight * mean_n(w_n * L_n) with the
// per-sample loss and weighting mode taken from config.distill. Diagnostics
// are computed on the validation split against the frozen teacher.
TrainResult distill_student(const models::ModelParams& teacher, const models::MlpSpec& student_spec,
                            const data::Dataset& train, const data::Dataset& val,
                            const TrainConfig& config, const std::string& checkpoint_path = "");

// Linear-interpolation percentile of a sorted vector, p in [0, 1].
double percentile_sorted(const std::vector<double>& sorted, double p);

} // namespace eakd::trainer
