#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "eakd/tensor.hpp"

namespace eakd::data {

struct Dataset {
    Tensor features;            // [N x D]
    std::vector<int> labels;    // values in [0, class_count)
    int class_count = 0;
    std::string split;          // "train" or "val"

    std::size_t size() const { return labels.size(); }
    void validate() const;
};

// Gaussian point clouds with uniformly placed class centers. The
// sigma/center_scale ratio controls class overlap and with it how much of
// the entropy spectrum a trained teacher covers.
struct BlobSpec {
    int class_count = 20;
    int dims = 16;
    int samples_per_class = 250;
    double sigma = 1.0;
    double center_scale = 1.0;
    std::uint64_t seed = 7;

    void validate() const;
};

// 80/20 train/val split per class. Fully determined by spec.seed.
std::pair<Dataset, Dataset> generate_blobs(const BlobSpec& spec);

// IDX (MNIST layout): big-endian magic 0x00000803 for images, 0x00000801 for
// labels. Pixels scaled to [0,1], images flattened row-major.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

// CSV: header "label,f0,f1,...", one sample per line. class_count 0 = infer
// as max label + 1.
Dataset load_csv(const std::string& path, int class_count = 0);
void save_csv(const Dataset& ds, const std::string& path);

struct Batch {
    Tensor features;
    std::vector<int> labels;
    std::vector<std::size_t> indices;  // positions in the source dataset
};

// Seeded Fisher-Yates permutation of the dataset cut into batches; the last
// partial batch is kept. Fully determined by (epoch_seed, batch_size).
std::vector<Batch> make_batches(const Dataset& ds, std::size_t batch_size, std::uint64_t epoch_seed);

} // namespace eakd::data
