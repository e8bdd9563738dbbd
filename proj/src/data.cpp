#include "eakd/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "eakd/rng.hpp"

namespace eakd::data {

void Dataset::validate() const {
    if (labels.empty()) throw ContractError("dataset is empty");
    if (features.rows() != labels.size()) {
        throw DimensionError("feature rows " + std::to_string(features.rows()) +
                             " != label count " + std::to_string(labels.size()));
    }
    if (class_count < 2) throw ConfigError("dataset class count must be >= 2");
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= class_count) {
            throw ContractError("label " + std::to_string(labels[i]) + " out of [0, " +
                                std::to_string(class_count) + ") at sample " + std::to_string(i));
        }
    }
    for (double v : features.data) {
        if (std::isnan(v)) throw ContractError("dataset contains NaN features");
    }
}

void BlobSpec::validate() const {
    if (class_count < 2) throw ConfigError("blob class count must be >= 2, got " + std::to_string(class_count));
    if (dims < 1) throw ConfigError("blob dims must be >= 1");
    if (samples_per_class < 2) throw ConfigError("blob samples per class must be >= 2");
    if (!(sigma > 0.0)) throw ConfigError("blob sigma must be > 0");
    if (!(center_scale > 0.0)) throw ConfigError("blob center scale must be > 0");
}

std::pair<Dataset, Dataset> generate_blobs(const BlobSpec& spec) {
    spec.validate();
    const std::size_t c = static_cast<std::size_t>(spec.class_count);
    const std::size_t d = static_cast<std::size_t>(spec.dims);
    const std::size_t spc = static_cast<std::size_t>(spec.samples_per_class);
    const std::size_t train_per_class = (spc * 8) / 10;

    Pcg32 center_rng(spec.seed, rng_stream::blob_centers);
    std::vector<double> centers(c * d);
    for (double& v : centers) v = center_rng.uniform(-spec.center_scale, spec.center_scale);

    Dataset train, val;
    train.split = "train";
    val.split = "val";
    train.class_count = val.class_count = spec.class_count;
    train.features = Tensor({c * train_per_class, d});
    val.features = Tensor({c * (spc - train_per_class), d});

    Pcg32 sample_rng(spec.seed, rng_stream::blob_samples);
    std::size_t ti = 0, vi = 0;
    for (std::size_t cls = 0; cls < c; ++cls) {
        for (std::size_t s = 0; s < spc; ++s) {
            const bool is_train = s < train_per_class;
            double* row = is_train ? train.features.data.data() + ti * d
                                   : val.features.data.data() + vi * d;
            for (std::size_t j = 0; j < d; ++j) {
                row[j] = centers[cls * d + j] + spec.sigma * sample_rng.gaussian();
            }
            if (is_train) {
                train.labels.push_back(static_cast<int>(cls));
                ++ti;
            } else {
                val.labels.push_back(static_cast<int>(cls));
                ++vi;
            }
        }
    }
    train.validate();
    val.validate();
    return {std::move(train), std::move(val)};
}

// ---------------------------------------------------------------------------
// IDX
// ---------------------------------------------------------------------------

namespace {

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path);
    return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

std::uint32_t be_u32(const std::string& buf, std::size_t pos, const std::string& path) {
    if (pos + 4 > buf.size()) {
        throw FormatError(path + ": truncated at byte offset " + std::to_string(pos));
    }
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | static_cast<std::uint8_t>(buf[pos + i]);
    return v;
}

} // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    const std::string img = read_file(images_path);
    if (img.empty()) throw FormatError(images_path + ": empty file at byte offset 0");
    const std::uint32_t img_magic = be_u32(img, 0, images_path);
    if (img_magic != 0x00000803u) {
        throw FormatError(images_path + ": bad IDX image magic at byte offset 0");
    }
    const std::uint32_t count = be_u32(img, 4, images_path);
    const std::uint32_t rows = be_u32(img, 8, images_path);
    const std::uint32_t cols = be_u32(img, 12, images_path);
    const std::size_t pixels = static_cast<std::size_t>(count) * rows * cols;
    if (16 + pixels != img.size()) {
        throw FormatError(images_path + ": expected " + std::to_string(16 + pixels) +
                          " bytes, got " + std::to_string(img.size()) +
                          " (mismatch at byte offset " + std::to_string(std::min(img.size(), 16 + pixels)) + ")");
    }

    const std::string lab = read_file(labels_path);
    if (lab.empty()) throw FormatError(labels_path + ": empty file at byte offset 0");
    const std::uint32_t lab_magic = be_u32(lab, 0, labels_path);
    if (lab_magic != 0x00000801u) {
        throw FormatError(labels_path + ": bad IDX label magic at byte offset 0");
    }
    const std::uint32_t lab_count = be_u32(lab, 4, labels_path);
    if (lab_count != count) {
        throw FormatError(labels_path + ": label count " + std::to_string(lab_count) +
                          " != image count " + std::to_string(count) + " at byte offset 4");
    }
    if (8 + static_cast<std::size_t>(lab_count) != lab.size()) {
        throw FormatError(labels_path + ": expected " + std::to_string(8 + lab_count) +
                          " bytes, got " + std::to_string(lab.size()) +
                          " (mismatch at byte offset " + std::to_string(std::min(lab.size(), std::size_t(8) + lab_count)) + ")");
    }
    if (count == 0) throw FormatError(images_path + ": zero samples at byte offset 4");

    Dataset ds;
    ds.split = "train";
    ds.features = Tensor({count, static_cast<std::size_t>(rows) * cols});
    for (std::size_t i = 0; i < pixels; ++i) {
        ds.features.data[i] = static_cast<double>(static_cast<std::uint8_t>(img[16 + i])) / 255.0;
    }
    int max_label = 0;
    ds.labels.resize(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        ds.labels[i] = static_cast<std::uint8_t>(lab[8 + i]);
        max_label = std::max(max_label, ds.labels[i]);
    }
    ds.class_count = std::max(2, max_label + 1);
    ds.validate();
    return ds;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

Dataset load_csv(const std::string& path, int class_count) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open: " + path);
    std::string line;
    if (!std::getline(f, line)) throw FormatError(path + ": empty file at record 0");
    if (line.rfind("label,", 0) != 0) {
        throw FormatError(path + ": header must start with 'label,' at record 0");
    }
    std::size_t dims = 0;
    for (char ch : line) {
        if (ch == ',') ++dims;
    }
    if (dims == 0) throw FormatError(path + ": header names no features at record 0");

    std::vector<double> values;
    std::vector<int> labels;
    std::size_t record = 0;
    while (std::getline(f, line)) {
        ++record;
        if (line.empty()) continue;
        const char* p = line.c_str();
        char* end = nullptr;
        const long label = std::strtol(p, &end, 10);
        if (end == p || *end != ',' || label < 0) {
            throw FormatError(path + ": bad label field at record " + std::to_string(record));
        }
        labels.push_back(static_cast<int>(label));
        p = end + 1;
        for (std::size_t j = 0; j < dims; ++j) {
            const double v = std::strtod(p, &end);
            if (end == p) {
                throw FormatError(path + ": bad feature " + std::to_string(j) +
                                  " at record " + std::to_string(record));
            }
            values.push_back(v);
            if (j + 1 < dims) {
                if (*end != ',') {
                    throw FormatError(path + ": expected ',' after feature " + std::to_string(j) +
                                      " at record " + std::to_string(record));
                }
                p = end + 1;
            } else if (*end != '\0' && *end != '\r') {
                throw FormatError(path + ": trailing characters at record " + std::to_string(record));
            }
        }
    }
    if (labels.empty()) throw FormatError(path + ": no samples at record 1");

    Dataset ds;
    ds.split = "train";
    ds.features = Tensor({labels.size(), dims}, std::move(values));
    ds.labels = std::move(labels);
    if (class_count > 0) {
        ds.class_count = class_count;
    } else {
        int mx = 0;
        for (int l : ds.labels) mx = std::max(mx, l);
        ds.class_count = std::max(2, mx + 1);
    }
    ds.validate();
    return ds;
}

void save_csv(const Dataset& ds, const std::string& path) {
    ds.validate();
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << "label";
    for (std::size_t j = 0; j < ds.features.cols(); ++j) f << ",f" << j;
    f << "\n";
    char buf[32];
    for (std::size_t i = 0; i < ds.size(); ++i) {
        f << ds.labels[i];
        for (std::size_t j = 0; j < ds.features.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", ds.features.at(i, j));
            f << ',' << buf;
        }
        f << "\n";
    }
    if (!f) throw IoError("failed writing: " + path);
}

std::vector<Batch> make_batches(const Dataset& ds, std::size_t batch_size, std::uint64_t epoch_seed) {
    if (batch_size < 1) throw ConfigError("batch size must be >= 1");
    const std::size_t n = ds.size();
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    Pcg32 rng(epoch_seed, rng_stream::shuffle);
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = rng.next_below(static_cast<std::uint32_t>(i));
        std::swap(perm[i - 1], perm[j]);
    }

    const std::size_t d = ds.features.cols();
    std::vector<Batch> out;
    out.reserve((n + batch_size - 1) / batch_size);
    for (std::size_t start = 0; start < n; start += batch_size) {
        const std::size_t bn = std::min(batch_size, n - start);
        Batch b;
        b.features = Tensor({bn, d});
        b.labels.resize(bn);
        b.indices.resize(bn);
        for (std::size_t i = 0; i < bn; ++i) {
            const std::size_t src = perm[start + i];
            std::memcpy(b.features.data.data() + i * d, ds.features.data.data() + src * d, d * sizeof(double));
            b.labels[i] = ds.labels[src];
            b.indices[i] = src;
        }
        out.push_back(std::move(b));
    }
    return out;
}

} // namespace eakd::data
