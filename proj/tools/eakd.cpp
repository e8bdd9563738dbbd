// Command-line front end: data generation, teacher training, distillation,
// evaluation, and ablation grids. Every run writes a resolved_config file
// that reproduces it when fed back via --config.

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eakd/analysis.hpp"
#include "eakd/config.hpp"
#include "eakd/data.hpp"
#include "eakd/distill.hpp"
#include "eakd/errors.hpp"
#include "eakd/kernels.hpp"
#include "eakd/models.hpp"
#include "eakd/trainer.hpp"

namespace fs = std::filesystem;
using eakd::config::FlatConfig;

namespace {

// Canonical key order for resolved_config files.
const std::vector<std::pair<std::string, std::string>> kDefaults = {
    {"seed", "1"},
    {"threads", "1"},
    {"out", "runs"},
    {"data", ""},
    {"teacher", ""},
    {"checkpoint", ""},
    {"epochs", "30"},
    {"batch_size", "64"},
    {"lr", "0.05"},
    {"momentum", "0.9"},
    {"weight_decay", "0.0005"},
    {"lr_decay_epochs", "20,25"},
    {"lr_decay_factor", "0.1"},
    {"temperature", "4.0"},
    {"entropy_temperature", "3.0"},
    {"diag_entropy_temperature", "1.0"},
    {"weighting_mode", "ea"},
    {"loss_kind", "kd"},
    {"dkd_alpha", "1.0"},
    {"dkd_beta", "8.0"},
    {"kd_weight", "1.0"},
    {"ce_weight", "1.0"},
    {"normalize_weights", "false"},
    {"teacher_hidden_dims", "256,256"},
    {"student_hidden_dims", "32"},
    {"blob_classes", "20"},
    {"blob_dims", "16"},
    {"blob_samples_per_class", "250"},
    {"blob_sigma", "1.0"},
    {"blob_center_scale", "1.0"},
    {"study", "weighting"},
    {"study_seeds", "5"},
};

FlatConfig make_defaults(const std::string& command) {
    FlatConfig cfg;
    cfg.set("command", command);
    for (const auto& [k, v] : kDefaults) cfg.set(k, v);
    const char* env_threads = std::getenv("EAKD_THREADS");
    if (env_threads && *env_threads) cfg.set("threads", env_threads);
    return cfg;
}

void overlay_file(FlatConfig& cfg, const std::string& path, const std::string& command) {
    const FlatConfig file = eakd::config::parse_file(path);
    for (const auto& [k, v] : file.items()) {
        if (k == "command") {
            if (v != command) {
                throw eakd::ConfigError(path + ": config was resolved for command '" + v +
                                        "', not '" + command + "'");
            }
            continue;
        }
        if (!cfg.has(k)) throw eakd::ConfigError(path + ": unknown config key '" + k + "'");
        cfg.set(k, v);
    }
}

// Flags land here as strings; only flags the user actually passed overlay the
// config file.
struct FlagOverrides {
    std::vector<std::pair<std::string, std::string>> values;

    void apply(FlatConfig& cfg) const {
        for (const auto& [k, v] : values) cfg.set(k, v);
    }
};

void add_common_flags(CLI::App* cmd, std::string& config_path, FlagOverrides& over) {
    cmd->add_option("--config", config_path, "flat key = value config file");
    auto bind = [cmd, &over](const std::string& flag, const std::string& key, const std::string& help) {
        cmd->add_option_function<std::string>(
            flag, [key, &over](const std::string& v) { over.values.emplace_back(key, v); }, help);
    };
    bind("--seed", "seed", "base RNG seed");
    bind("--threads", "threads", "kernel/grid thread count (default EAKD_THREADS or 1)");
    bind("--out", "out", "output directory");
    bind("--data", "data", "dataset directory (train.csv, val.csv, manifest)");
    bind("--teacher", "teacher", "teacher checkpoint path");
    bind("--epochs", "epochs", "training epochs");
    bind("--batch-size", "batch_size", "batch size");
    bind("--lr", "lr", "learning rate");
    bind("--momentum", "momentum", "SGD momentum");
    bind("--weight-decay", "weight_decay", "L2 weight decay");
    bind("--lr-decay-epochs", "lr_decay_epochs", "comma list of decay epochs");
    bind("--lr-decay-factor", "lr_decay_factor", "multiplicative decay factor");
    bind("--temperature", "temperature", "distillation temperature T");
    bind("--entropy-temperature", "entropy_temperature", "weighting entropy temperature T'");
    bind("--diag-entropy-temperature", "diag_entropy_temperature", "diagnostic entropy temperature");
    bind("--weighting-mode", "weighting_mode",
         "none|base|interact|ea|inverted_base|inverted_student");
    bind("--loss-kind", "loss_kind", "kd|dkd");
    bind("--dkd-alpha", "dkd_alpha", "DKD target-term weight");
    bind("--dkd-beta", "dkd_beta", "DKD non-target-term weight");
    bind("--kd-weight", "kd_weight", "distillation loss weight (lambda)");
    bind("--ce-weight", "ce_weight", "cross-entropy loss weight");
    bind("--normalize-weights", "normalize_weights", "divide weights by their batch mean (true|false)");
    bind("--teacher-hidden", "teacher_hidden_dims", "comma list of teacher hidden widths");
    bind("--student-hidden", "student_hidden_dims", "comma list of student hidden widths");
}

FlatConfig resolve(const std::string& command, const std::string& config_path, const FlagOverrides& over) {
    FlatConfig cfg = make_defaults(command);
    if (!config_path.empty()) overlay_file(cfg, config_path, command);
    over.apply(cfg);
    return cfg;
}

std::string timestamp_now() {
    char buf[32];
    const std::time_t t = std::time(nullptr);
    std::tm tmv{};
    localtime_r(&t, &tmv);
    std::strftime(buf, sizeof buf, "%Y%m%d-%H%M%S", &tmv);
    return buf;
}

fs::path make_run_dir(const FlatConfig& cfg, const std::string& command) {
    const fs::path root = cfg.get("out");
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) throw eakd::IoError("cannot create output directory " + root.string() + ": " + ec.message());
    const std::string stem = command + "_" + timestamp_now() + "_s" + cfg.get("seed");
    fs::path dir = root / stem;
    for (int k = 2; fs::exists(dir); ++k) dir = root / (stem + "_" + std::to_string(k));
    fs::create_directories(dir, ec);
    if (ec) throw eakd::IoError("cannot create run directory " + dir.string() + ": " + ec.message());
    return dir;
}

void write_resolved(const FlatConfig& cfg, const fs::path& dir) {
    eakd::config::write_file(cfg, (dir / "resolved_config").string());
}

eakd::data::BlobSpec blob_spec_from(const FlatConfig& cfg) {
    eakd::data::BlobSpec spec;
    spec.class_count = static_cast<int>(cfg.get_int("blob_classes"));
    spec.dims = static_cast<int>(cfg.get_int("blob_dims"));
    spec.samples_per_class = static_cast<int>(cfg.get_int("blob_samples_per_class"));
    spec.sigma = cfg.get_double("blob_sigma");
    spec.center_scale = cfg.get_double("blob_center_scale");
    spec.seed = cfg.get_u64("seed");
    return spec;
}

std::vector<std::size_t> parse_dims(const FlatConfig& cfg, const std::string& key) {
    std::vector<std::size_t> dims;
    for (long v : cfg.get_int_list(key)) {
        if (v < 1) throw eakd::ConfigError("config key '" + key + "' has non-positive width");
        dims.push_back(static_cast<std::size_t>(v));
    }
    return dims;
}

struct LoadedData {
    eakd::data::Dataset train;
    eakd::data::Dataset val;
};

LoadedData load_data_dir(const FlatConfig& cfg) {
    const std::string dir = cfg.get("data");
    if (dir.empty()) throw eakd::ConfigError("--data is required for this command");
    const fs::path train_path = fs::path(dir) / "train.csv";
    const fs::path val_path = fs::path(dir) / "val.csv";
    const fs::path manifest_path = fs::path(dir) / "manifest";
    int classes = 0;
    if (fs::exists(manifest_path)) {
        classes = static_cast<int>(eakd::config::parse_file(manifest_path.string()).get_int("classes"));
    }
    LoadedData d;
    d.train = eakd::data::load_csv(train_path.string(), classes);
    d.val = eakd::data::load_csv(val_path.string(), classes);
    if (classes == 0) {
        // no manifest: take the class count from the union of both splits
        const int c = std::max(d.train.class_count, d.val.class_count);
        d.train.class_count = d.val.class_count = c;
    }
    d.train.split = "train";
    d.val.split = "val";
    return d;
}

eakd::trainer::TrainConfig train_config_from(const FlatConfig& cfg, int class_count) {
    eakd::trainer::TrainConfig tc;
    tc.epochs = static_cast<int>(cfg.get_int("epochs"));
    tc.batch_size = static_cast<std::size_t>(cfg.get_int("batch_size"));
    tc.learning_rate = cfg.get_double("lr");
    tc.momentum = cfg.get_double("momentum");
    tc.weight_decay = cfg.get_double("weight_decay");
    tc.lr_decay_epochs.clear();
    for (long e : cfg.get_int_list("lr_decay_epochs")) tc.lr_decay_epochs.push_back(static_cast<int>(e));
    tc.lr_decay_factor = cfg.get_double("lr_decay_factor");
    tc.seed = cfg.get_u64("seed");
    tc.loss_kind = eakd::distill::parse_loss_kind(cfg.get("loss_kind"));
    tc.distill.distill_temperature = cfg.get_double("temperature");
    tc.distill.entropy_temperature = cfg.get_double("entropy_temperature");
    tc.distill.diag_entropy_temperature = cfg.get_double("diag_entropy_temperature");
    tc.distill.class_count = class_count;
    tc.distill.ce_weight = cfg.get_double("ce_weight");
    tc.distill.kd_weight = cfg.get_double("kd_weight");
    tc.distill.dkd_alpha = cfg.get_double("dkd_alpha");
    tc.distill.dkd_beta = cfg.get_double("dkd_beta");
    tc.distill.weighting_mode = eakd::distill::parse_weighting_mode(cfg.get("weighting_mode"));
    tc.distill.normalize_weights = cfg.get_bool("normalize_weights");
    tc.validate();
    return tc;
}

eakd::models::ModelParams load_teacher(const FlatConfig& cfg, const LoadedData& d) {
    const std::string path = cfg.get("teacher");
    if (path.empty()) throw eakd::ConfigError("--teacher is required for this command");
    eakd::models::ModelParams teacher = eakd::models::load_checkpoint(path);
    const eakd::models::MlpSpec spec = eakd::models::infer_spec(teacher);
    if (spec.input_dim != d.train.features.cols()) {
        throw eakd::ConfigError("teacher input width " + std::to_string(spec.input_dim) +
                                " != dataset feature width " + std::to_string(d.train.features.cols()));
    }
    if (static_cast<int>(spec.class_count) != d.train.class_count) {
        throw eakd::ConfigError("teacher class count " + std::to_string(spec.class_count) +
                                " != dataset class count " + std::to_string(d.train.class_count));
    }
    return teacher;
}

// Validates every typed key before any filesystem access, so bad flag values
// exit 2 even when paths are also wrong.
void validate_flags(const FlatConfig& cfg) {
    (void)train_config_from(cfg, /*class_count=*/2);
    (void)parse_dims(cfg, "teacher_hidden_dims");
    (void)parse_dims(cfg, "student_hidden_dims");
    if (cfg.get_int("threads") < 1) throw eakd::ConfigError("threads must be >= 1");
}

std::vector<std::uint64_t> study_seeds(const FlatConfig& cfg) {
    const long n = cfg.get_int("study_seeds");
    if (n < 1) throw eakd::ConfigError("study_seeds must be >= 1");
    const std::uint64_t base = cfg.get_u64("seed");
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = base + i;
    return seeds;
}

// ---------------------------------------------------------------------------
// commands
// ---------------------------------------------------------------------------

int cmd_gen_data(const FlatConfig& cfg) {
    const eakd::data::BlobSpec spec = blob_spec_from(cfg);
    spec.validate();
    const std::string out = cfg.get("out");
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw eakd::IoError("cannot create output directory " + out + ": " + ec.message());

    const auto [train, val] = eakd::data::generate_blobs(spec);
    eakd::data::save_csv(train, (fs::path(out) / "train.csv").string());
    eakd::data::save_csv(val, (fs::path(out) / "val.csv").string());

    FlatConfig manifest;
    manifest.set("classes", std::to_string(spec.class_count));
    manifest.set("dims", std::to_string(spec.dims));
    manifest.set("samples_per_class", std::to_string(spec.samples_per_class));
    manifest.set("sigma", cfg.get("blob_sigma"));
    manifest.set("center_scale", cfg.get("blob_center_scale"));
    manifest.set("seed", cfg.get("seed"));
    manifest.set("train_samples", std::to_string(train.size()));
    manifest.set("val_samples", std::to_string(val.size()));
    eakd::config::write_file(manifest, (fs::path(out) / "manifest").string());
    write_resolved(cfg, out);

    std::cout << "wrote " << train.size() << " train / " << val.size() << " val samples to "
              << out << " (seed " << cfg.get("seed") << ")\n";
    return eakd::exit_ok;
}

int cmd_train_teacher(const FlatConfig& cfg) {
    validate_flags(cfg);
    const LoadedData d = load_data_dir(cfg);
    eakd::models::MlpSpec spec;
    spec.input_dim = d.train.features.cols();
    spec.hidden_dims = parse_dims(cfg, "teacher_hidden_dims");
    spec.class_count = static_cast<std::size_t>(d.train.class_count);
    const eakd::trainer::TrainConfig tc = train_config_from(cfg, d.train.class_count);

    const fs::path dir = make_run_dir(cfg, "train-teacher");
    write_resolved(cfg, dir);
    const eakd::trainer::TrainResult r =
        eakd::trainer::train_teacher(spec, d.train, d.val, tc, (dir / "teacher.ckpt").string());
    eakd::trainer::write_records_csv(r.records, (dir / "metrics.csv").string());

    std::cout << "teacher val accuracy " << r.records.back().acc_student << "\n"
              << "run dir: " << dir.string() << "\n";
    return eakd::exit_ok;
}

int cmd_distill(const FlatConfig& cfg) {
    validate_flags(cfg);
    const LoadedData d = load_data_dir(cfg);
    const eakd::models::ModelParams teacher = load_teacher(cfg, d);
    eakd::models::MlpSpec student_spec;
    student_spec.input_dim = d.train.features.cols();
    student_spec.hidden_dims = parse_dims(cfg, "student_hidden_dims");
    student_spec.class_count = static_cast<std::size_t>(d.train.class_count);
    const eakd::trainer::TrainConfig tc = train_config_from(cfg, d.train.class_count);

    const fs::path dir = make_run_dir(cfg, "distill");
    write_resolved(cfg, dir);
    const eakd::trainer::TrainResult r = eakd::trainer::distill_student(
        teacher, student_spec, d.train, d.val, tc, (dir / "student.ckpt").string());
    eakd::trainer::write_records_csv(r.records, (dir / "metrics.csv").string());
    eakd::analysis::write_quartile_csv(eakd::analysis::quartile_report(r.records),
                                       (dir / "quartile_shares.csv").string());

    std::cout << "student val accuracy " << r.records.back().acc_student
              << " (mode " << cfg.get("weighting_mode") << ", loss " << cfg.get("loss_kind") << ")\n"
              << "run dir: " << dir.string() << "\n";
    return eakd::exit_ok;
}

int cmd_eval(const FlatConfig& cfg) {
    validate_flags(cfg);
    const std::string ckpt = cfg.get("checkpoint");
    if (ckpt.empty()) throw eakd::ConfigError("--checkpoint is required for eval");
    const LoadedData d = load_data_dir(cfg);
    eakd::models::ModelParams params = eakd::models::load_checkpoint(ckpt);
    const eakd::models::MlpSpec spec = eakd::models::infer_spec(params);
    if (spec.input_dim != d.val.features.cols()) {
        throw eakd::ConfigError("checkpoint input width " + std::to_string(spec.input_dim) +
                                " != dataset feature width " + std::to_string(d.val.features.cols()));
    }
    const eakd::trainer::EvalResult ev =
        eakd::trainer::evaluate(params, d.val, cfg.get_double("diag_entropy_temperature"));

    const fs::path dir = make_run_dir(cfg, "eval");
    write_resolved(cfg, dir);
    std::string out = "sample,entropy,correct,predicted\n";
    char buf[32];
    for (std::size_t i = 0; i < ev.entropy.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", ev.entropy[i]);
        out += std::to_string(i);
        out += ',';
        out += buf;
        out += ',' + std::to_string(static_cast<int>(ev.correct[i]));
        out += ',' + std::to_string(ev.predicted[i]) + '\n';
    }
    std::ofstream f(dir / "eval.csv", std::ios::trunc);
    if (!f) throw eakd::IoError("cannot open for writing: " + (dir / "eval.csv").string());
    f << out;

    std::cout << "val accuracy " << ev.accuracy << " over " << ev.entropy.size() << " samples\n"
              << "run dir: " << dir.string() << "\n";
    return eakd::exit_ok;
}

int cmd_ablate(const FlatConfig& cfg) {
    validate_flags(cfg);
    const std::string study = cfg.get("study");
    const LoadedData d = load_data_dir(cfg);
    const eakd::models::ModelParams teacher = load_teacher(cfg, d);
    eakd::models::MlpSpec student_spec;
    student_spec.input_dim = d.train.features.cols();
    student_spec.hidden_dims = parse_dims(cfg, "student_hidden_dims");
    student_spec.class_count = static_cast<std::size_t>(d.train.class_count);
    const eakd::trainer::TrainConfig base = train_config_from(cfg, d.train.class_count);
    const std::vector<std::uint64_t> seeds = study_seeds(cfg);
    const int workers = static_cast<int>(cfg.get_int("threads"));

    const fs::path dir = make_run_dir(cfg, "ablate-" + study);
    write_resolved(cfg, dir);

    if (study == "weighting") {
        const eakd::analysis::GridResult r = eakd::analysis::run_weighting_study(
            base, seeds, teacher, student_spec, d.train, d.val, workers);
        eakd::analysis::write_raw_csv(r, (dir / "weighting_raw.csv").string());
        eakd::analysis::write_aggregate_csv(r, (dir / "weighting_aggregate.csv").string());
        for (const auto& a : r.aggregate()) {
            std::cout << a.axis_value << ": mean " << a.mean << " std " << a.stddev << "\n";
        }
    } else if (study == "tprime") {
        const eakd::analysis::GridResult r = eakd::analysis::run_tprime_ablation(
            base, {1.0, 2.0, 3.0, 4.0}, seeds, teacher, student_spec, d.train, d.val, workers);
        eakd::analysis::write_raw_csv(r, (dir / "tprime_raw.csv").string());
        eakd::analysis::write_aggregate_csv(r, (dir / "tprime_aggregate.csv").string());
        const std::string best = eakd::analysis::argmax_axis_value(r);
        std::ofstream f(dir / "tprime_best.csv", std::ios::trunc);
        f << "best_tprime\n" << best << "\n";
        std::cout << "best T' by mean accuracy: " << best << "\n";
    } else if (study == "beta") {
        std::vector<double> betas;
        for (int b = 1; b <= 10; ++b) betas.push_back(b);
        const eakd::analysis::BetaSweepResult r = eakd::analysis::run_beta_sweep(
            base, betas, seeds, teacher, student_spec, d.train, d.val, workers);
        eakd::analysis::write_raw_csv(r.plain, (dir / "beta_dkd_raw.csv").string());
        eakd::analysis::write_aggregate_csv(r.plain, (dir / "beta_dkd_aggregate.csv").string());
        eakd::analysis::write_raw_csv(r.weighted, (dir / "beta_eadkd_raw.csv").string());
        eakd::analysis::write_aggregate_csv(r.weighted, (dir / "beta_eadkd_aggregate.csv").string());
        std::ofstream f(dir / "beta_variance.csv", std::ios::trunc);
        char buf[32];
        f << "mode,variance_across_beta\n";
        std::snprintf(buf, sizeof buf, "%.17g", r.plain_variance);
        f << "dkd," << buf << "\n";
        std::snprintf(buf, sizeof buf, "%.17g", r.weighted_variance);
        f << "ea_dkd," << buf << "\n";
        std::cout << "across-beta variance: dkd " << r.plain_variance
                  << ", ea-dkd " << r.weighted_variance << "\n";
    } else {
        throw eakd::ConfigError("unknown study '" + study + "' (expected weighting|tprime|beta)");
    }
    std::cout << "run dir: " << dir.string() << "\n";
    return eakd::exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"entropy-adaptive knowledge distillation toolkit"};
    app.require_subcommand(1);

    struct SubState {
        CLI::App* cmd = nullptr;
        std::string config_path;
        FlagOverrides over;
    };
    SubState gen, teach, dist, eval, ablate;

    gen.cmd = app.add_subcommand("gen-data", "generate a synthetic blob dataset");
    gen.cmd->add_option("--spec", gen.config_path, "blob spec config file");
    add_common_flags(gen.cmd, gen.config_path, gen.over);
    auto bind_blob = [&](const std::string& flag, const std::string& key) {
        gen.cmd->add_option_function<std::string>(
            flag, [key, &gen](const std::string& v) { gen.over.values.emplace_back(key, v); });
    };
    bind_blob("--classes", "blob_classes");
    bind_blob("--dims", "blob_dims");
    bind_blob("--samples-per-class", "blob_samples_per_class");
    bind_blob("--sigma", "blob_sigma");
    bind_blob("--center-scale", "blob_center_scale");

    teach.cmd = app.add_subcommand("train-teacher", "train a teacher with cross-entropy only");
    add_common_flags(teach.cmd, teach.config_path, teach.over);

    dist.cmd = app.add_subcommand("distill", "distill a student from a teacher checkpoint");
    add_common_flags(dist.cmd, dist.config_path, dist.over);

    eval.cmd = app.add_subcommand("eval", "evaluate a checkpoint on the validation split");
    add_common_flags(eval.cmd, eval.config_path, eval.over);
    eval.cmd->add_option_function<std::string>(
        "--checkpoint", [&eval](const std::string& v) { eval.over.values.emplace_back("checkpoint", v); },
        "checkpoint to evaluate");

    ablate.cmd = app.add_subcommand("ablate", "run an experiment grid");
    add_common_flags(ablate.cmd, ablate.config_path, ablate.over);
    ablate.cmd->add_option_function<std::string>(
        "--study", [&ablate](const std::string& v) { ablate.over.values.emplace_back("study", v); },
        "weighting|tprime|beta");
    ablate.cmd->add_option_function<std::string>(
        "--seeds", [&ablate](const std::string& v) { ablate.over.values.emplace_back("study_seeds", v); },
        "number of seeds per cell");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return eakd::exit_config;
    }

    try {
        if (gen.cmd->parsed()) {
            const FlatConfig cfg = resolve("gen-data", gen.config_path, gen.over);
            eakd::kernels::set_threads(static_cast<int>(cfg.get_int("threads")));
            return cmd_gen_data(cfg);
        }
        if (teach.cmd->parsed()) {
            const FlatConfig cfg = resolve("train-teacher", teach.config_path, teach.over);
            eakd::kernels::set_threads(static_cast<int>(cfg.get_int("threads")));
            return cmd_train_teacher(cfg);
        }
        if (dist.cmd->parsed()) {
            const FlatConfig cfg = resolve("distill", dist.config_path, dist.over);
            eakd::kernels::set_threads(static_cast<int>(cfg.get_int("threads")));
            return cmd_distill(cfg);
        }
        if (eval.cmd->parsed()) {
            const FlatConfig cfg = resolve("eval", eval.config_path, eval.over);
            eakd::kernels::set_threads(static_cast<int>(cfg.get_int("threads")));
            return cmd_eval(cfg);
        }
        if (ablate.cmd->parsed()) {
            const FlatConfig cfg = resolve("ablate", ablate.config_path, ablate.over);
            // grid cells run on worker threads; keep kernels serial inside them
            eakd::kernels::set_threads(1);
            return cmd_ablate(cfg);
        }
        std::cerr << "error: no command\n";
        return eakd::exit_config;
    } catch (const eakd::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return eakd::exit_config;
    } catch (const eakd::FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return eakd::exit_io;
    } catch (const eakd::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return eakd::exit_io;
    } catch (const eakd::DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return eakd::exit_divergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return eakd::exit_failure;
    }
}
