#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eakd/trainer.hpp"

namespace eakd::analysis {

enum class GridAxis : std::uint8_t { weighting_mode, entropy_temperature, dkd_beta };

// One varied axis, everything else identical. Each (axis value, seed) pair is
// an independent cell.
struct ExperimentGrid {
    trainer::TrainConfig base;
    GridAxis axis = GridAxis::weighting_mode;
    std::vector<std::string> axis_values;
    std::vector<std::uint64_t> seeds;

    void validate() const;
};

struct GridCell {
    std::string axis_value;
    std::uint64_t seed = 0;
    double final_val_acc = 0.0;
};

struct AxisAggregate {
    std::string axis_value;
    double mean = 0.0;
    double stddev = 0.0;  // population
    std::size_t n = 0;
};

struct GridResult {
    std::vector<GridCell> cells;  // axis-major, seed-minor order

    std::vector<AxisAggregate> aggregate() const;
    double mean_for(const std::string& axis_value) const;
};

// Runs every cell (axis value x seed) as a full distillation and keeps the
// final validation accuracy. Cells are independent; with workers > 1 they run
// on a thread pool, and results land in fixed cell order either way.
GridResult run_grid(const ExperimentGrid& grid, const models::ModelParams& teacher,
                    const models::MlpSpec& student_spec, const data::Dataset& train,
                    const data::Dataset& val, int workers = 1);

// Comparative study over all weighting modes, inverted controls included.
GridResult run_weighting_study(const trainer::TrainConfig& base, const std::vector<std::uint64_t>& seeds,
                               const models::ModelParams& teacher, const models::MlpSpec& student_spec,
                               const data::Dataset& train, const data::Dataset& val, int workers = 1);

// T' sweep with weighting_mode = ea. argmax_tprime() reports the axis value
// with the best mean accuracy.
GridResult run_tprime_ablation(const trainer::TrainConfig& base, const std::vector<double>& tprimes,
                               const std::vector<std::uint64_t>& seeds, const models::ModelParams& teacher,
                               const models::MlpSpec& student_spec, const data::Dataset& train,
                               const data::Dataset& val, int workers = 1);
std::string argmax_axis_value(const GridResult& result);

struct BetaSweepResult {
    GridResult plain;     // weighting_mode = none
    GridResult weighted;  // weighting_mode = ea
    double plain_variance = 0.0;     // across-beta variance of per-beta means
    double weighted_variance = 0.0;
};

// Paired beta sweep with loss_kind = dkd and identical seeds per beta.
BetaSweepResult run_beta_sweep(const trainer::TrainConfig& base, const std::vector<double>& betas,
                               const std::vector<std::uint64_t>& seeds, const models::ModelParams& teacher,
                               const models::MlpSpec& student_spec, const data::Dataset& train,
                               const data::Dataset& val, int workers = 1);

// Variance across the per-axis-value means (population), the robustness
// statistic the beta sweep compares between modes.
double across_axis_variance(const GridResult& result);

// CSV writers. Raw: "axis_value,seed,final_val_acc". Aggregate:
// "axis_value,mean,std,n".
void write_raw_csv(const GridResult& result, const std::string& path);
void write_aggregate_csv(const GridResult& result, const std::string& path);

struct QuartileShareRow {
    int epoch = 0;
    int quartile = 0;  // 1..4
    double share = 0.0;
};

// Long-format view of the per-epoch quartile shares of a training log.
std::vector<QuartileShareRow> quartile_report(const std::vector<trainer::TrainRecord>& records);
std::vector<QuartileShareRow> quartile_report_from_csv(const std::string& records_csv_path);
void write_quartile_csv(const std::vector<QuartileShareRow>& rows, const std::string& path);

} // namespace eakd::analysis
