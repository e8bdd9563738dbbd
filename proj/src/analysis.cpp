#include "eakd/analysis.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace eakd::analysis {

void ExperimentGrid::validate() const {
    base.validate();
    if (axis_values.empty()) throw ConfigError("experiment grid has no axis values");
    if (seeds.empty()) throw ConfigError("experiment grid has no seeds");
}

std::vector<AxisAggregate> GridResult::aggregate() const {
    std::vector<AxisAggregate> out;
    for (const GridCell& cell : cells) {
        if (out.empty() || out.back().axis_value != cell.axis_value) {
            out.push_back({cell.axis_value, 0.0, 0.0, 0});
        }
        out.back().mean += cell.final_val_acc;
        out.back().n += 1;
    }
    for (AxisAggregate& a : out) a.mean /= static_cast<double>(a.n);
    std::size_t i = 0;
    for (AxisAggregate& a : out) {
        double var = 0.0;
        for (std::size_t j = 0; j < a.n; ++j, ++i) {
            const double d = cells[i].final_val_acc - a.mean;
            var += d * d;
        }
        a.stddev = std::sqrt(var / static_cast<double>(a.n));
    }
    return out;
}

double GridResult::mean_for(const std::string& axis_value) const {
    for (const AxisAggregate& a : aggregate()) {
        if (a.axis_value == axis_value) return a.mean;
    }
    throw ContractError("no cells for axis value '" + axis_value + "'");
}

namespace {

trainer::TrainConfig config_for_cell(const ExperimentGrid& grid, const std::string& axis_value,
                                     std::uint64_t seed) {
    trainer::TrainConfig cfg = grid.base;
    cfg.seed = seed;
    switch (grid.axis) {
    case GridAxis::weighting_mode:
        cfg.distill.weighting_mode = distill::parse_weighting_mode(axis_value);
        break;
    case GridAxis::entropy_temperature:
        cfg.distill.entropy_temperature = std::stod(axis_value);
        break;
    case GridAxis::dkd_beta:
        cfg.distill.dkd_beta = std::stod(axis_value);
        break;
    }
    return cfg;
}

} // namespace

GridResult run_grid(const ExperimentGrid& grid, const models::ModelParams& teacher,
                    const models::MlpSpec& student_spec, const data::Dataset& train,
                    const data::Dataset& val, int workers) {
    grid.validate();
    GridResult result;
    result.cells.resize(grid.axis_values.size() * grid.seeds.size());
    for (std::size_t a = 0; a < grid.axis_values.size(); ++a) {
        for (std::size_t s = 0; s < grid.seeds.size(); ++s) {
            GridCell& cell = result.cells[a * grid.seeds.size() + s];
            cell.axis_value = grid.axis_values[a];
            cell.seed = grid.seeds[s];
        }
    }

    auto run_cell = [&](std::size_t idx) {
        GridCell& cell = result.cells[idx];
        const trainer::TrainConfig cfg = config_for_cell(grid, cell.axis_value, cell.seed);
        const trainer::TrainResult r = trainer::distill_student(teacher, student_spec, train, val, cfg);
        cell.final_val_acc = r.records.back().acc_student;
    };

    if (workers <= 1 || result.cells.size() == 1) {
        for (std::size_t i = 0; i < result.cells.size(); ++i) run_cell(i);
        return result;
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    const std::size_t pool = std::min<std::size_t>(static_cast<std::size_t>(workers), result.cells.size());
    std::vector<std::thread> threads;
    threads.reserve(pool);
    for (std::size_t t = 0; t < pool; ++t) {
        threads.emplace_back([&] {
            for (;;) {
                const std::size_t idx = next.fetch_add(1);
                if (idx >= result.cells.size() || failed.load()) return;
                try {
                    run_cell(idx);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    failed.store(true);
                    return;
                }
            }
        });
    }
    for (std::thread& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return result;
}

GridResult run_weighting_study(const trainer::TrainConfig& base, const std::vector<std::uint64_t>& seeds,
                               const models::ModelParams& teacher, const models::MlpSpec& student_spec,
                               const data::Dataset& train, const data::Dataset& val, int workers) {
    ExperimentGrid grid;
    grid.base = base;
    grid.axis = GridAxis::weighting_mode;
    grid.axis_values = {"none", "base", "interact", "ea", "inverted_base", "inverted_student"};
    grid.seeds = seeds;
    return run_grid(grid, teacher, student_spec, train, val, workers);
}

GridResult run_tprime_ablation(const trainer::TrainConfig& base, const std::vector<double>& tprimes,
                               const std::vector<std::uint64_t>& seeds, const models::ModelParams& teacher,
                               const models::MlpSpec& student_spec, const data::Dataset& train,
                               const data::Dataset& val, int workers) {
    ExperimentGrid grid;
    grid.base = base;
    grid.base.distill.weighting_mode = distill::WeightingMode::ea;
    grid.axis = GridAxis::entropy_temperature;
    char buf[32];
    for (double t : tprimes) {
        std::snprintf(buf, sizeof buf, "%g", t);
        grid.axis_values.push_back(buf);
    }
    grid.seeds = seeds;
    return run_grid(grid, teacher, student_spec, train, val, workers);
}

std::string argmax_axis_value(const GridResult& result) {
    const std::vector<AxisAggregate> agg = result.aggregate();
    if (agg.empty()) throw ContractError("argmax of empty grid result");
    std::size_t best = 0;
    for (std::size_t i = 1; i < agg.size(); ++i) {
        if (agg[i].mean > agg[best].mean) best = i;
    }
    return agg[best].axis_value;
}

double across_axis_variance(const GridResult& result) {
    const std::vector<AxisAggregate> agg = result.aggregate();
    if (agg.empty()) throw ContractError("variance of empty grid result");
    double mean = 0.0;
    for (const AxisAggregate& a : agg) mean += a.mean;
    mean /= static_cast<double>(agg.size());
    double var = 0.0;
    for (const AxisAggregate& a : agg) {
        const double d = a.mean - mean;
        var += d * d;
    }
    return var / static_cast<double>(agg.size());
}

BetaSweepResult run_beta_sweep(const trainer::TrainConfig& base, const std::vector<double>& betas,
                               const std::vector<std::uint64_t>& seeds, const models::ModelParams& teacher,
                               const models::MlpSpec& student_spec, const data::Dataset& train,
                               const data::Dataset& val, int workers) {
    ExperimentGrid grid;
    grid.base = base;
    grid.base.loss_kind = distill::LossKind::dkd;
    grid.axis = GridAxis::dkd_beta;
    char buf[32];
    for (double b : betas) {
        std::snprintf(buf, sizeof buf, "%g", b);
        grid.axis_values.push_back(buf);
    }
    grid.seeds = seeds;

    BetaSweepResult out;
    grid.base.distill.weighting_mode = distill::WeightingMode::none;
    out.plain = run_grid(grid, teacher, student_spec, train, val, workers);
    grid.base.distill.weighting_mode = distill::WeightingMode::ea;
    out.weighted = run_grid(grid, teacher, student_spec, train, val, workers);
    out.plain_variance = across_axis_variance(out.plain);
    out.weighted_variance = across_axis_variance(out.weighted);
    return out;
}

namespace {
void append_g17(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}
} // namespace

void write_raw_csv(const GridResult& result, const std::string& path) {
    std::string out = "axis_value,seed,final_val_acc\n";
    for (const GridCell& c : result.cells) {
        out += c.axis_value;
        out += ',' + std::to_string(c.seed) + ',';
        append_g17(out, c.final_val_acc);
        out += '\n';
    }
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << out;
    if (!f) throw IoError("failed writing: " + path);
}

void write_aggregate_csv(const GridResult& result, const std::string& path) {
    std::string out = "axis_value,mean,std,n\n";
    for (const AxisAggregate& a : result.aggregate()) {
        out += a.axis_value;
        out += ',';
        append_g17(out, a.mean);
        out += ',';
        append_g17(out, a.stddev);
        out += ',' + std::to_string(a.n) + '\n';
    }
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << out;
    if (!f) throw IoError("failed writing: " + path);
}

std::vector<QuartileShareRow> quartile_report(const std::vector<trainer::TrainRecord>& records) {
    std::vector<QuartileShareRow> rows;
    rows.reserve(records.size() * 4);
    for (const trainer::TrainRecord& r : records) {
        for (int q = 0; q < 4; ++q) {
            rows.push_back({r.epoch, q + 1, r.quartile_share[static_cast<std::size_t>(q)]});
        }
    }
    return rows;
}

std::vector<QuartileShareRow> quartile_report_from_csv(const std::string& records_csv_path) {
    std::ifstream f(records_csv_path);
    if (!f) throw IoError("cannot open: " + records_csv_path);
    std::string line;
    if (!std::getline(f, line) || line.rfind("epoch,", 0) != 0) {
        throw FormatError(records_csv_path + ": missing training-log header at record 0");
    }
    // q1..q4 shares are columns 6..9 (0-based) of the fixed header.
    std::vector<QuartileShareRow> rows;
    std::size_t record = 0;
    while (std::getline(f, line)) {
        ++record;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 22) {
            throw FormatError(records_csv_path + ": expected 22 fields, got " +
                              std::to_string(fields.size()) + " at record " + std::to_string(record));
        }
        try {
            const int epoch = std::stoi(fields[0]);
            for (int q = 0; q < 4; ++q) {
                rows.push_back({epoch, q + 1, std::stod(fields[static_cast<std::size_t>(6 + q)])});
            }
        } catch (const std::exception&) {
            throw FormatError(records_csv_path + ": unparsable numeric field at record " +
                              std::to_string(record));
        }
    }
    return rows;
}

void write_quartile_csv(const std::vector<QuartileShareRow>& rows, const std::string& path) {
    std::string out = "epoch,quartile,share\n";
    for (const QuartileShareRow& r : rows) {
        out += std::to_string(r.epoch) + ',' + std::to_string(r.quartile) + ',';
        append_g17(out, r.share);
        out += '\n';
    }
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << out;
    if (!f) throw IoError("failed writing: " + path);
}

} // namespace eakd::analysis
