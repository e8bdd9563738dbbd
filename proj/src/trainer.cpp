#include "eakd/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace eakd::trainer {

void TrainConfig::validate() const {
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("batch size must be >= 1");
    if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be > 0");
    if (momentum < 0.0 || momentum >= 1.0) throw ConfigError("momentum must be in [0, 1)");
    if (weight_decay < 0.0) throw ConfigError("weight decay must be >= 0");
    if (!(lr_decay_factor > 0.0)) throw ConfigError("lr decay factor must be > 0");
    for (std::size_t i = 1; i < lr_decay_epochs.size(); ++i) {
        if (lr_decay_epochs[i] <= lr_decay_epochs[i - 1]) {
            throw ConfigError("lr decay epochs must be strictly increasing");
        }
    }
    distill.validate();
}

double TrainConfig::lr_for_epoch(int epoch) const {
    double lr = learning_rate;
    for (int d : lr_decay_epochs) {
        if (epoch >= d) lr *= lr_decay_factor;
    }
    return lr;
}

std::string records_csv_header() {
    return "epoch,loss_total,loss_ce,loss_kd,acc_student,acc_teacher,"
           "q1_share,q2_share,q3_share,q4_share,"
           "seg1_gap,seg2_gap,seg3_gap,seg4_gap,"
           "w_min,w_mean,w_max,hs_min,hs_q1,hs_med,hs_q3,hs_max";
}

namespace {
void append_g17(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}
} // namespace

void write_records_csv(const std::vector<TrainRecord>& records, const std::string& path) {
    std::string out = records_csv_header() + "\n";
    for (const TrainRecord& r : records) {
        out += std::to_string(r.epoch);
        const double cols[] = {r.loss_total, r.loss_ce, r.loss_kd, r.acc_student, r.acc_teacher,
                               r.quartile_share[0], r.quartile_share[1], r.quartile_share[2], r.quartile_share[3],
                               r.segment_gap[0], r.segment_gap[1], r.segment_gap[2], r.segment_gap[3],
                               r.w_min, r.w_mean, r.w_max,
                               r.hs_min, r.hs_q1, r.hs_med, r.hs_q3, r.hs_max};
        for (double v : cols) {
            out += ',';
            append_g17(out, v);
        }
        out += '\n';
    }
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << out;
    if (!f) throw IoError("failed writing: " + path);
}

void sgd_step(models::ModelParams& params, const std::vector<Tensor>& grads, SgdState& state,
              double lr, double momentum, double weight_decay) {
    if (grads.size() != params.tensors.size()) {
        throw ContractError("sgd_step: got " + std::to_string(grads.size()) + " gradients for " +
                            std::to_string(params.tensors.size()) + " parameters");
    }
    if (state.velocity.empty()) {
        state.velocity.reserve(params.tensors.size());
        for (const auto& [name, t] : params.tensors) state.velocity.push_back(Tensor::zeros(t.shape));
    }
    for (std::size_t i = 0; i < params.tensors.size(); ++i) {
        Tensor& p = params.tensors[i].second;
        const Tensor& g = grads[i];
        Tensor& v = state.velocity[i];
        if (!g.same_shape(p)) {
            throw ContractError("sgd_step: gradient shape " + g.shape_str() + " does not match parameter " +
                                params.tensors[i].first + " " + p.shape_str());
        }
        for (std::size_t e = 0; e < p.size(); ++e) {
            v.data[e] = momentum * v.data[e] + g.data[e] + weight_decay * p.data[e];
            p.data[e] -= lr * v.data[e];
        }
    }
}

EvalResult evaluate(const models::ModelParams& params, const data::Dataset& ds,
                    double entropy_temperature) {
    const Tensor logits = models::forward(params, ds.features);
    EvalResult r;
    r.entropy = distill::entropy(logits, entropy_temperature);
    r.correct.resize(ds.size());
    r.predicted.resize(ds.size());
    std::size_t hits = 0;
    const std::size_t c = logits.cols();
    for (std::size_t i = 0; i < ds.size(); ++i) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < c; ++j) {
            if (logits.at(i, j) > logits.at(i, best)) best = j;  // ties keep the lowest index
        }
        r.predicted[i] = static_cast<int>(best);
        r.correct[i] = static_cast<int>(best) == ds.labels[i] ? 1 : 0;
        hits += r.correct[i];
    }
    r.accuracy = static_cast<double>(hits) / static_cast<double>(ds.size());
    return r;
}

double percentile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw ContractError("percentile of empty vector");
    if (sorted.size() == 1) return sorted[0];
    const double idx = p * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(idx);
    const double frac = idx - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

namespace {

std::vector<Tensor> collect_grads(const ag::Graph& g, const std::vector<ag::NodeId>& ids) {
    std::vector<Tensor> grads;
    grads.reserve(ids.size());
    for (ag::NodeId id : ids) grads.push_back(g.grad(id));
    return grads;
}

// Validation-split diagnostics context; everything derived from the frozen
// teacher is computed once.
struct DiagContext {
    Tensor teacher_logits;
    double teacher_accuracy = 0.0;
    std::vector<std::uint8_t> teacher_correct;
    std::vector<double> teacher_entropy_diag;    // at diag temperature
    std::vector<double> teacher_entropy_weight;  // at T'
    std::vector<int> quartile;                   // 0..3 per sample
    std::vector<std::uint8_t> top_decile;        // top 10% by teacher entropy
};

DiagContext make_diag_context(const models::ModelParams& teacher, const data::Dataset& val,
                              const distill::DistillConfig& dc) {
    DiagContext ctx;
    ctx.teacher_logits = models::forward(teacher, val.features);
    const EvalResult ev = evaluate(teacher, val, dc.diag_entropy_temperature);
    ctx.teacher_accuracy = ev.accuracy;
    ctx.teacher_correct = ev.correct;
    ctx.teacher_entropy_diag = ev.entropy;
    ctx.teacher_entropy_weight = distill::entropy(ctx.teacher_logits, dc.entropy_temperature);

    std::vector<double> sorted = ctx.teacher_entropy_diag;
    std::sort(sorted.begin(), sorted.end());
    const double t25 = percentile_sorted(sorted, 0.25);
    const double t50 = percentile_sorted(sorted, 0.50);
    const double t75 = percentile_sorted(sorted, 0.75);
    const double t90 = percentile_sorted(sorted, 0.90);
    ctx.quartile.resize(val.size());
    ctx.top_decile.resize(val.size());
    for (std::size_t i = 0; i < val.size(); ++i) {
        const double h = ctx.teacher_entropy_diag[i];
        ctx.quartile[i] = h <= t25 ? 0 : h <= t50 ? 1 : h <= t75 ? 2 : 3;
        ctx.top_decile[i] = h >= t90 ? 1 : 0;
    }
    return ctx;
}

// Per-sample distillation loss values for fixed logits (no gradients kept).
Tensor per_sample_loss_values(const Tensor& teacher_logits, const Tensor& student_logits,
                              const std::vector<int>& targets, const distill::DistillConfig& dc,
                              distill::LossKind kind) {
    ag::Graph g;
    const ag::NodeId s = g.leaf(student_logits, false);
    const ag::NodeId loss = kind == distill::LossKind::kd
        ? distill::kd_loss(g, teacher_logits, s, dc.distill_temperature)
        : distill::dkd_loss(g, teacher_logits, s, targets, dc.dkd_alpha, dc.dkd_beta, dc.distill_temperature);
    return g.value(loss);
}

void fill_diagnostics(TrainRecord& rec, const DiagContext& ctx, const models::ModelParams& student,
                      const data::Dataset& val, const distill::DistillConfig& dc,
                      distill::LossKind kind) {
    const Tensor student_logits = models::forward(student, val.features);
    const EvalResult ev = evaluate(student, val, dc.diag_entropy_temperature);
    rec.acc_student = ev.accuracy;
    rec.acc_teacher = ctx.teacher_accuracy;

    // KD-loss share per teacher-entropy quartile, measured on each run's own
    // objective: weighted modes contribute w_n * L_n.
    const Tensor losses = per_sample_loss_values(ctx.teacher_logits, student_logits, val.labels, dc, kind);
    distill::EntropyPair pair;
    pair.teacher = ctx.teacher_entropy_weight;
    pair.student = distill::entropy(student_logits, dc.entropy_temperature);
    pair.bound = dc.entropy_bound();
    const distill::SampleWeights w = distill::weights_for_mode(dc.weighting_mode, pair, val.size());

    std::array<double, 4> contrib{};
    std::array<double, 4> seg_teacher{}, seg_student{}, seg_total{};
    for (std::size_t i = 0; i < val.size(); ++i) {
        const int q = ctx.quartile[i];
        contrib[q] += w.values[i] * losses.data[i];
        seg_teacher[q] += ctx.teacher_correct[i];
        seg_student[q] += ev.correct[i];
        seg_total[q] += 1.0;
    }
    const double total = contrib[0] + contrib[1] + contrib[2] + contrib[3];
    for (int q = 0; q < 4; ++q) {
        rec.quartile_share[q] = total > 0.0 ? contrib[q] / total : 0.25;
        rec.segment_gap[q] = seg_total[q] > 0.0
            ? (seg_teacher[q] - seg_student[q]) / seg_total[q]
            : 0.0;
    }

    std::vector<double> hs_top;
    for (std::size_t i = 0; i < val.size(); ++i) {
        if (ctx.top_decile[i]) hs_top.push_back(ev.entropy[i]);
    }
    std::sort(hs_top.begin(), hs_top.end());
    if (!hs_top.empty()) {
        rec.hs_min = hs_top.front();
        rec.hs_q1 = percentile_sorted(hs_top, 0.25);
        rec.hs_med = percentile_sorted(hs_top, 0.50);
        rec.hs_q3 = percentile_sorted(hs_top, 0.75);
        rec.hs_max = hs_top.back();
    }
}

void check_finite_loss(double v, int epoch, std::size_t step) {
    if (!std::isfinite(v)) {
        throw DivergenceError("non-finite loss at epoch " + std::to_string(epoch) +
                              ", step " + std::to_string(step));
    }
}

} // namespace

TrainResult train_teacher(const models::MlpSpec& spec, const data::Dataset& train,
                          const data::Dataset& val, const TrainConfig& config,
                          const std::string& checkpoint_path) {
    config.validate();
    spec.validate();
    train.validate();
    val.validate();
    if (static_cast<int>(spec.class_count) != train.class_count) {
        throw ConfigError("model class count " + std::to_string(spec.class_count) +
                          " != dataset class count " + std::to_string(train.class_count));
    }

    TrainResult result;
    result.params = models::init(spec, config.seed);
    SgdState state;
    const std::size_t layers = result.params.layer_count();

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        const double lr = config.lr_for_epoch(epoch);
        const auto batches = data::make_batches(train, config.batch_size, config.seed + static_cast<std::uint64_t>(epoch));
        double loss_sum = 0.0;
        for (std::size_t step = 0; step < batches.size(); ++step) {
            const data::Batch& b = batches[step];
            ag::Graph g;
            const std::vector<ag::NodeId> ids = models::bind_params(g, result.params);
            const ag::NodeId x = g.leaf(b.features, false);
            const ag::NodeId logits = models::forward(g, ids, x, layers);
            const ag::NodeId loss = distill::cross_entropy(g, logits, b.labels);
            const double lv = g.value(loss).data[0];
            check_finite_loss(lv, epoch, step);
            loss_sum += lv * static_cast<double>(b.labels.size());
            g.backward(loss);
            sgd_step(result.params, collect_grads(g, ids), state, lr, config.momentum, config.weight_decay);
        }

        TrainRecord rec;
        rec.epoch = epoch;
        rec.loss_ce = loss_sum / static_cast<double>(train.size());
        rec.loss_total = rec.loss_ce;
        const EvalResult ev = evaluate(result.params, val, config.distill.diag_entropy_temperature);
        rec.acc_student = ev.accuracy;
        rec.acc_teacher = ev.accuracy;  // the model being trained is the only model here
        rec.quartile_share = {0.25, 0.25, 0.25, 0.25};
        result.records.push_back(rec);
    }

    if (!checkpoint_path.empty()) models::save_checkpoint(result.params, checkpoint_path);
    return result;
}

TrainResult distill_student(const models::ModelParams& teacher, const models::MlpSpec& student_spec,
                            const data::Dataset& train, const data::Dataset& val,
                            const TrainConfig& config, const std::string& checkpoint_path) {
    config.validate();
    student_spec.validate();
    train.validate();
    val.validate();
    const distill::DistillConfig& dc = config.distill;
    if (static_cast<int>(student_spec.class_count) != train.class_count ||
        dc.class_count != train.class_count) {
        throw ConfigError("class count mismatch: student " + std::to_string(student_spec.class_count) +
                          ", distill config " + std::to_string(dc.class_count) +
                          ", dataset " + std::to_string(train.class_count));
    }
    const models::MlpSpec teacher_spec = models::infer_spec(teacher);
    if (teacher_spec.class_count != student_spec.class_count) {
        throw ConfigError("teacher output width " + std::to_string(teacher_spec.class_count) +
                          " != student class count " + std::to_string(student_spec.class_count));
    }

    TrainResult result;
    result.params = models::init(student_spec, config.seed);
    SgdState state;
    const std::size_t layers = result.params.layer_count();
    const double bound = dc.entropy_bound();
    const DiagContext ctx = make_diag_context(teacher, val, dc);

    // The teacher is frozen, so its train-split logits are computed once and
    // gathered per batch. Row kernels make gathered rows bitwise identical to
    // a per-batch forward.
    const Tensor teacher_train_logits = models::forward(teacher, train.features);
    const std::size_t c = teacher_train_logits.cols();

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        const double lr = config.lr_for_epoch(epoch);
        const auto batches = data::make_batches(train, config.batch_size, config.seed + static_cast<std::uint64_t>(epoch));
        double total_sum = 0.0, ce_sum = 0.0, kd_sum = 0.0;
        double w_min = std::numeric_limits<double>::infinity();
        double w_max = -std::numeric_limits<double>::infinity();
        double w_sum = 0.0;
        std::size_t w_count = 0;

        for (std::size_t step = 0; step < batches.size(); ++step) {
            const data::Batch& b = batches[step];
            Tensor teacher_logits({b.labels.size(), c});
            for (std::size_t i = 0; i < b.indices.size(); ++i) {
                std::copy_n(teacher_train_logits.data.data() + b.indices[i] * c, c,
                            teacher_logits.data.data() + i * c);
            }

            ag::Graph g;
            const std::vector<ag::NodeId> ids = models::bind_params(g, result.params);
            const ag::NodeId x = g.leaf(b.features, false);
            const ag::NodeId logits = models::forward(g, ids, x, layers);
            for (double v : g.value(logits).data) {
                if (!std::isfinite(v)) {
                    throw DivergenceError("non-finite student logits at epoch " + std::to_string(epoch) +
                                          ", step " + std::to_string(step));
                }
            }

            const ag::NodeId ce = distill::cross_entropy(g, logits, b.labels);
            const ag::NodeId per = config.loss_kind == distill::LossKind::kd
                ? distill::kd_loss(g, teacher_logits, logits, dc.distill_temperature)
                : distill::dkd_loss(g, teacher_logits, logits, b.labels,
                                    dc.dkd_alpha, dc.dkd_beta, dc.distill_temperature);

            distill::EntropyPair pair;
            pair.teacher = distill::entropy(teacher_logits, dc.entropy_temperature);
            pair.student = distill::entropy(g.value(logits), dc.entropy_temperature);
            pair.bound = bound;
            distill::SampleWeights w = distill::weights_for_mode(dc.weighting_mode, pair, b.labels.size());
            for (double v : w.values) {  // stats cover the raw weights, before normalization
                w_min = std::min(w_min, v);
                w_max = std::max(w_max, v);
                w_sum += v;
            }
            w_count += w.values.size();
            if (dc.normalize_weights) {
                double mean = 0.0;
                for (double v : w.values) mean += v;
                mean /= static_cast<double>(w.values.size());
                if (mean > 0.0) {
                    for (double& v : w.values) v /= mean;
                }
            }

            const ag::NodeId kd = distill::reweighted_loss(g, per, w, distill::Reduction::mean);
            const ag::NodeId loss = g.add(g.scale(ce, dc.ce_weight), g.scale(kd, dc.kd_weight));

            const double lv = g.value(loss).data[0];
            check_finite_loss(lv, epoch, step);
            const double bn = static_cast<double>(b.labels.size());
            total_sum += lv * bn;
            ce_sum += g.value(ce).data[0] * bn;
            kd_sum += g.value(kd).data[0] * bn;

            g.backward(loss);
            sgd_step(result.params, collect_grads(g, ids), state, lr, config.momentum, config.weight_decay);
        }

        TrainRecord rec;
        rec.epoch = epoch;
        const double n = static_cast<double>(train.size());
        rec.loss_total = total_sum / n;
        rec.loss_ce = ce_sum / n;
        rec.loss_kd = kd_sum / n;
        rec.w_min = w_count ? w_min : 0.0;
        rec.w_max = w_count ? w_max : 0.0;
        rec.w_mean = w_count ? w_sum / static_cast<double>(w_count) : 0.0;
        fill_diagnostics(rec, ctx, result.params, val, dc, config.loss_kind);
        result.records.push_back(rec);
    }

    if (!checkpoint_path.empty()) models::save_checkpoint(result.params, checkpoint_path);
    return result;
}

} // namespace eakd::trainer
