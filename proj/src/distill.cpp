#include "eakd/distill.hpp"

#include <algorithm>
#include <cmath>

#include "eakd/kernels.hpp"

namespace eakd::distill {

namespace k = eakd::kernels;

WeightingMode parse_weighting_mode(const std::string& name) {
    if (name == "none") return WeightingMode::none;
    if (name == "base") return WeightingMode::base;
    if (name == "interact") return WeightingMode::interact;
    if (name == "ea") return WeightingMode::ea;
    if (name == "inverted_base") return WeightingMode::inverted_base;
    if (name == "inverted_student") return WeightingMode::inverted_student;
    throw ConfigError("unknown weighting mode '" + name +
                      "' (expected none|base|interact|ea|inverted_base|inverted_student)");
}

const char* weighting_mode_name(WeightingMode mode) {
    switch (mode) {
    case WeightingMode::none: return "none";
    case WeightingMode::base: return "base";
    case WeightingMode::interact: return "interact";
    case WeightingMode::ea: return "ea";
    case WeightingMode::inverted_base: return "inverted_base";
    case WeightingMode::inverted_student: return "inverted_student";
    }
    return "?";
}

LossKind parse_loss_kind(const std::string& name) {
    if (name == "kd") return LossKind::kd;
    if (name == "dkd") return LossKind::dkd;
    throw ConfigError("unknown loss kind '" + name + "' (expected kd|dkd)");
}

const char* loss_kind_name(LossKind kind) { return kind == LossKind::kd ? "kd" : "dkd"; }

double DistillConfig::entropy_bound() const { return std::log(static_cast<double>(class_count)); }

void DistillConfig::validate() const {
    if (!(distill_temperature > 0.0)) throw ConfigError("distill temperature must be > 0");
    if (!(entropy_temperature > 0.0)) throw ConfigError("entropy temperature must be > 0");
    if (!(diag_entropy_temperature > 0.0)) throw ConfigError("diagnostic entropy temperature must be > 0");
    if (class_count < 2) throw ConfigError("class count must be >= 2, got " + std::to_string(class_count));
    if (ce_weight < 0.0) throw ConfigError("ce weight must be >= 0");
    if (kd_weight < 0.0) throw ConfigError("kd weight must be >= 0");
    if (dkd_alpha < 0.0) throw ConfigError("dkd alpha must be >= 0");
    if (dkd_beta < 0.0) throw ConfigError("dkd beta must be >= 0");
}

void EntropyPair::validate() const {
    if (teacher.size() != student.size()) {
        throw ContractError("entropy pair length mismatch: " + std::to_string(teacher.size()) +
                            " vs " + std::to_string(student.size()));
    }
    const double hi = bound + 1e-9;
    for (std::size_t i = 0; i < teacher.size(); ++i) {
        if (!(teacher[i] >= 0.0 && teacher[i] <= hi) || !(student[i] >= 0.0 && student[i] <= hi)) {
            throw ContractError("entropy out of [0, ln C] at sample " + std::to_string(i));
        }
    }
}

std::vector<double> entropy(const Tensor& logits, double temperature) {
    require_matrix(logits, "entropy logits");
    if (!(temperature > 0.0)) throw ConfigError("entropy temperature must be > 0");
    for (double v : logits.data) {
        if (!std::isfinite(v)) throw ContractError("entropy input contains non-finite logits");
    }
    const std::size_t n = logits.rows(), c = logits.cols();
    const double bound = std::log(static_cast<double>(c));
    std::vector<double> lp(n * c);
    k::log_softmax_rows(logits.data.data(), lp.data(), n, c, 1.0 / temperature);
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
            const double l = lp[i * c + j];
            s -= std::exp(l) * l;  // exp underflows before l grows, so no NaN
        }
        h[i] = std::min(std::max(s, 0.0), bound);
    }
    return h;
}

SampleWeights weight_base(const EntropyPair& h) {
    h.validate();
    SampleWeights w;
    w.mode = WeightingMode::base;
    w.values = h.teacher;
    for (double& v : w.values) v = std::min(v, h.bound);
    return w;
}

SampleWeights weight_interact(const EntropyPair& h) {
    h.validate();
    SampleWeights w;
    w.mode = WeightingMode::interact;
    w.values.resize(h.teacher.size());
    for (std::size_t i = 0; i < w.values.size(); ++i) {
        w.values[i] = std::min(h.teacher[i] * h.student[i] / h.bound, h.bound);
    }
    return w;
}

SampleWeights weight_ea(const EntropyPair& h) {
    h.validate();
    SampleWeights w;
    w.mode = WeightingMode::ea;
    w.values.resize(h.teacher.size());
    for (std::size_t i = 0; i < w.values.size(); ++i) {
        const double base = h.teacher[i];
        const double interact = h.teacher[i] * h.student[i] / h.bound;
        w.values[i] = std::min(0.5 * (base + interact), h.bound);
    }
    return w;
}

SampleWeights weight_inverted(const SampleWeights& w, double bound) {
    SampleWeights out;
    out.mode = w.mode == WeightingMode::base ? WeightingMode::inverted_base : WeightingMode::inverted_student;
    out.values.resize(w.values.size());
    for (std::size_t i = 0; i < w.values.size(); ++i) {
        if (w.values[i] > bound) {
            throw ContractError("inverted weight input " + std::to_string(w.values[i]) +
                                " exceeds bound " + std::to_string(bound) + " at sample " + std::to_string(i));
        }
        out.values[i] = bound - w.values[i];
    }
    return out;
}

SampleWeights weights_for_mode(WeightingMode mode, const EntropyPair& h, std::size_t n) {
    switch (mode) {
    case WeightingMode::none: {
        SampleWeights w;
        w.mode = mode;
        w.values.assign(n, 1.0);
        return w;
    }
    case WeightingMode::base: return weight_base(h);
    case WeightingMode::interact: return weight_interact(h);
    case WeightingMode::ea: return weight_ea(h);
    case WeightingMode::inverted_base: {
        SampleWeights w = weight_inverted(weight_base(h), h.bound);
        w.mode = WeightingMode::inverted_base;
        return w;
    }
    case WeightingMode::inverted_student: {
        // control that down-weights student uncertainty; start from the raw student entropy
        SampleWeights s;
        s.mode = WeightingMode::base;
        s.values = h.student;
        for (double& v : s.values) v = std::min(v, h.bound);
        SampleWeights w = weight_inverted(s, h.bound);
        w.mode = WeightingMode::inverted_student;
        return w;
    }
    }
    throw ContractError("unreachable weighting mode");
}

namespace {

void check_pair_shapes(const Tensor& teacher_logits, const Tensor& student_logits) {
    require_matrix(teacher_logits, "teacher logits");
    require_matrix(student_logits, "student logits");
    if (!teacher_logits.same_shape(student_logits)) {
        throw DimensionError("teacher/student logits differ: " + teacher_logits.shape_str() +
                             " vs " + student_logits.shape_str());
    }
}

// x * log x with the 0 * log 0 = 0 convention.
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

} // namespace

ag::NodeId kd_loss(ag::Graph& g, const Tensor& teacher_logits, ag::NodeId student_logits, double temperature) {
    check_pair_shapes(teacher_logits, g.value(student_logits));
    if (!(temperature > 0.0)) throw ConfigError("kd temperature must be > 0");
    const std::size_t n = teacher_logits.rows(), c = teacher_logits.cols();

    // Teacher side, all constant: p_T and sum_i p_T * log p_T (its negentropy).
    Tensor p_t({n, c});
    k::log_softmax_rows(teacher_logits.data.data(), p_t.data.data(), n, c, 1.0 / temperature);
    Tensor negent({n});
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
            const double lp = p_t.data[i * c + j];
            const double p = std::exp(lp);
            s += p * lp;
            p_t.data[i * c + j] = p;
        }
        negent.data[i] = s;
    }

    const ag::NodeId lp_s = g.log_softmax(student_logits, temperature);
    const ag::NodeId cross = g.sum_rows(g.mul(g.leaf(std::move(p_t), false), lp_s));  // sum_i p_T log p_S
    const ag::NodeId kl = g.add(g.leaf(std::move(negent), false), g.scale(cross, -1.0));
    return g.scale(kl, temperature * temperature);
}

ag::NodeId dkd_loss(ag::Graph& g, const Tensor& teacher_logits, ag::NodeId student_logits,
                    const std::vector<int>& targets, double alpha, double beta, double temperature) {
    check_pair_shapes(teacher_logits, g.value(student_logits));
    if (!(temperature > 0.0)) throw ConfigError("dkd temperature must be > 0");
    if (alpha < 0.0 || beta < 0.0) throw ConfigError("dkd alpha/beta must be >= 0");
    const std::size_t n = teacher_logits.rows(), c = teacher_logits.cols();
    if (targets.size() != n) {
        throw DimensionError("dkd target count " + std::to_string(targets.size()) +
                             " does not match batch of " + std::to_string(n));
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (targets[i] < 0 || targets[i] >= static_cast<int>(c)) {
            throw ContractError("dkd target " + std::to_string(targets[i]) + " out of [0, " +
                                std::to_string(c) + ") at sample " + std::to_string(i));
        }
    }

    // Teacher side constants. b = p_target, s = 1 - b computed via expm1 so a
    // near-one-hot teacher keeps s > 0; qhat is the renormalized non-target
    // distribution with a zero in the target slot.
    std::vector<double> lp_t(n * c);
    k::log_softmax_rows(teacher_logits.data.data(), lp_t.data(), n, c, 1.0 / temperature);
    Tensor b_t({n}), s_t({n}), qhat({n, c});
    Tensor tc_const({n}), nc_const({n});
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t t = static_cast<std::size_t>(targets[i]);
        const double lpt = lp_t[i * c + t];
        const double b = std::exp(lpt);
        const double s = -std::expm1(lpt);
        b_t.data[i] = b;
        s_t.data[i] = s;
        tc_const.data[i] = xlogx(b) + xlogx(s);
        double nc = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
            if (j == t || s <= 0.0) {
                qhat.data[i * c + j] = 0.0;
                continue;
            }
            const double q = std::exp(lp_t[i * c + j]) / s;
            qhat.data[i * c + j] = q;
            nc += xlogx(q);
        }
        nc_const.data[i] = nc;
    }

    // Student side. log(1 - p_S,target) = lp_S[j] - lphat_S[j] for any
    // non-target j, since both logs share the same numerator there.
    std::vector<int> probe(n);
    for (std::size_t i = 0; i < n; ++i) probe[i] = (targets[i] + 1) % static_cast<int>(c);
    const ag::NodeId lp_s = g.log_softmax(student_logits, temperature);
    const ag::NodeId lphat_s = g.log_softmax_excl(student_logits, temperature, targets);
    const ag::NodeId log_b_s = g.gather(lp_s, targets);
    const ag::NodeId log_s_s = g.add(g.gather(lp_s, probe), g.scale(g.gather(lphat_s, probe), -1.0));

    // TCKD_n = tc_const_n - b_n * log b_S,n - s_n * log(1 - b_S,n)
    ag::NodeId tckd = g.add(g.leaf(std::move(tc_const), false),
                            g.add(g.mul(g.leaf(std::move(b_t), false), g.scale(log_b_s, -1.0)),
                                  g.mul(g.leaf(std::move(s_t), false), g.scale(log_s_s, -1.0))));
    // NCKD_n = nc_const_n - sum_{j != t} qhat_n,j * log phat_S,n,j
    ag::NodeId nckd = g.add(g.leaf(std::move(nc_const), false),
                            g.scale(g.sum_rows(g.mul(g.leaf(std::move(qhat), false), lphat_s)), -1.0));

    const ag::NodeId combined = g.add(g.scale(tckd, alpha), g.scale(nckd, beta));
    return g.scale(combined, temperature * temperature);
}

ag::NodeId reweighted_loss(ag::Graph& g, ag::NodeId per_sample, const SampleWeights& w, Reduction reduction) {
    const Tensor& v = g.value(per_sample);
    if (v.shape.size() != 1) {
        throw DimensionError("reweighted_loss expects a per-sample vector, got " + v.shape_str());
    }
    if (w.values.size() != v.size()) {
        throw DimensionError("weight count " + std::to_string(w.values.size()) +
                             " does not match loss count " + std::to_string(v.size()));
    }
    const ag::NodeId weighted = g.mul(g.leaf(Tensor::vector(w.values), false), per_sample);
    switch (reduction) {
    case Reduction::sum: return g.sum_all(weighted);
    case Reduction::mean: return g.mean_all(weighted);
    case Reduction::none: return weighted;
    }
    throw ContractError("unreachable reduction");
}

ag::NodeId cross_entropy(ag::Graph& g, ag::NodeId student_logits, const std::vector<int>& targets) {
    const Tensor& v = g.value(student_logits);
    require_matrix(v, "cross_entropy logits");
    if (targets.size() != v.rows()) {
        throw DimensionError("cross_entropy target count " + std::to_string(targets.size()) +
                             " does not match batch of " + std::to_string(v.rows()));
    }
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i] < 0 || targets[i] >= static_cast<int>(v.cols())) {
            throw ContractError("cross_entropy target " + std::to_string(targets[i]) + " out of [0, " +
                                std::to_string(v.cols()) + ") at sample " + std::to_string(i));
        }
    }
    const ag::NodeId lp = g.log_softmax(student_logits, 1.0);
    return g.scale(g.mean_all(g.gather(lp, targets)), -1.0);
}

} // namespace eakd::distill
