#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "eakd/models.hpp"
#include "test_util.hpp"

using eakd::Tensor;
namespace models = eakd::models;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("eakd_models_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

} // namespace

TEST_CASE("init: deterministic, zero biases, Glorot bounds") {
    models::MlpSpec spec{8, {16, 12}, 5};
    const models::ModelParams a = models::init(spec, 99);
    const models::ModelParams b = models::init(spec, 99);
    REQUIRE(a.tensors.size() == b.tensors.size());
    for (std::size_t i = 0; i < a.tensors.size(); ++i) {
        CHECK(a.tensors[i].first == b.tensors[i].first);
        CHECK(a.tensors[i].second.data == b.tensors[i].second.data);
    }
    const models::ModelParams c = models::init(spec, 100);
    CHECK(a.tensors[0].second.data != c.tensors[0].second.data);

    for (double v : a.find("layer0.bias").data) CHECK(v == 0.0);
    for (double v : a.find("layer1.bias").data) CHECK(v == 0.0);
    for (double v : a.find("layer2.bias").data) CHECK(v == 0.0);
}

TEST_CASE("init: empirical weight range within the Glorot limit over many draws") {
    // 100x110 layer gives 11000 draws; every one must respect the bound
    models::MlpSpec spec{100, {}, 110};
    const models::ModelParams p = models::init(spec, 4);
    const double limit = std::sqrt(6.0 / (100.0 + 110.0));
    double widest = 0.0;
    for (double v : p.find("layer0.weight").data) {
        CHECK(std::fabs(v) <= limit);
        widest = std::max(widest, std::fabs(v));
    }
    CHECK(widest > 0.9 * limit);  // the range is actually used
}

TEST_CASE("forward: zero params give zero logits; single affine is exact") {
    models::MlpSpec spec{3, {4}, 2};
    models::ModelParams zero = models::init(spec, 1);
    for (auto& [name, t] : zero.tensors) {
        for (double& v : t.data) v = 0.0;
    }
    eakd::Pcg32 rng(8, 1);
    const Tensor batch = testutil::random_tensor({5, 3}, rng);
    for (double v : models::forward(zero, batch).data) CHECK(v == 0.0);

    models::ModelParams affine;
    affine.tensors.emplace_back("layer0.weight", Tensor::matrix(2, 2, {1, 2, 3, 4}));
    affine.tensors.emplace_back("layer0.bias", Tensor::vector({10, 20}));
    const Tensor x = Tensor::matrix(1, 2, {1, 1});
    const Tensor y = models::forward(affine, x);
    CHECK(y.data == std::vector<double>{1 + 3 + 10, 2 + 4 + 20});
}

TEST_CASE("forward: hand-computed tiny relu network") {
    // 2 -> 2 -> 2, weights chosen so one hidden unit clips
    models::ModelParams p;
    p.tensors.emplace_back("layer0.weight", Tensor::matrix(2, 2, {1, -1, 2, 1}));
    p.tensors.emplace_back("layer0.bias", Tensor::vector({0.5, -0.5}));
    p.tensors.emplace_back("layer1.weight", Tensor::matrix(2, 2, {1, 0, -1, 1}));
    p.tensors.emplace_back("layer1.bias", Tensor::vector({0, 0.25}));
    const Tensor x = Tensor::matrix(1, 2, {1, -2});
    // pre1 = [1*1 + -2*2 + 0.5, 1*-1 + -2*1 - 0.5] = [-2.5, -3.5] -> relu [0, 0]
    // out = [0, 0.25]
    CHECK(models::forward(p, x).data == std::vector<double>{0.0, 0.25});

    const Tensor x2 = Tensor::matrix(1, 2, {2, 1});
    // pre1 = [2 + 2 + 0.5, -2 + 1 - 0.5] = [4.5, -1.5] -> relu [4.5, 0]
    // out = [4.5*1 + 0*-1 + 0, 4.5*0 + 0*1 + 0.25] = [4.5, 0.25]
    CHECK(models::forward(p, x2).data == std::vector<double>{4.5, 0.25});
}

TEST_CASE("graph forward matches plain forward bitwise") {
    models::MlpSpec spec{6, {9, 7}, 4};
    const models::ModelParams p = models::init(spec, 31);
    eakd::Pcg32 rng(9, 2);
    const Tensor batch = testutil::random_tensor({8, 6}, rng);
    const Tensor plain = models::forward(p, batch);

    eakd::ag::Graph g;
    const auto ids = models::bind_params(g, p);
    const eakd::ag::NodeId out = models::forward(g, ids, g.leaf(batch, false), p.layer_count());
    CHECK(g.value(out).data == plain.data);
}

TEST_CASE("checkpoint: bitwise round trip") {
    TempDir tmp;
    models::MlpSpec spec{5, {11}, 3};
    const models::ModelParams p = models::init(spec, 1234);
    const std::string path = (tmp.path / "model.ckpt").string();
    models::save_checkpoint(p, path);
    const models::ModelParams q = models::load_checkpoint(path);
    REQUIRE(q.tensors.size() == p.tensors.size());
    for (std::size_t i = 0; i < p.tensors.size(); ++i) {
        CHECK(q.tensors[i].first == p.tensors[i].first);
        CHECK(q.tensors[i].second.shape == p.tensors[i].second.shape);
        CHECK(q.tensors[i].second.data == p.tensors[i].second.data);
    }
    models::validate_params(q, spec);
    const models::MlpSpec inferred = models::infer_spec(q);
    CHECK(inferred.input_dim == spec.input_dim);
    CHECK(inferred.hidden_dims == spec.hidden_dims);
    CHECK(inferred.class_count == spec.class_count);
}

TEST_CASE("checkpoint: corrupted magic and truncation are format errors") {
    TempDir tmp;
    models::MlpSpec spec{4, {}, 2};
    const models::ModelParams p = models::init(spec, 7);
    const std::string path = (tmp.path / "model.ckpt").string();
    models::save_checkpoint(p, path);

    std::string bytes;
    {
        std::ifstream f(path, std::ios::binary);
        bytes.assign((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    }
    std::string corrupted = bytes;
    corrupted[0] = 'X';
    const std::string bad_path = (tmp.path / "bad.ckpt").string();
    {
        std::ofstream f(bad_path, std::ios::binary);
        f << corrupted;
    }
    CHECK_THROWS_WITH_AS(models::load_checkpoint(bad_path),
                         (bad_path + ": bad magic bytes at byte offset 0").c_str(), eakd::FormatError);

    const std::string trunc_path = (tmp.path / "trunc.ckpt").string();
    {
        std::ofstream f(trunc_path, std::ios::binary);
        f << bytes.substr(0, bytes.size() - 5);
    }
    try {
        models::load_checkpoint(trunc_path);
        FAIL("expected FormatError");
    } catch (const eakd::FormatError& e) {
        CHECK(std::string(e.what()).find("byte offset") != std::string::npos);
    }

    CHECK_THROWS_AS(models::load_checkpoint((tmp.path / "missing.ckpt").string()), eakd::IoError);
}

TEST_CASE("checkpoint from a different spec fails validation naming the layer") {
    TempDir tmp;
    const models::ModelParams p = models::init(models::MlpSpec{4, {8}, 3}, 7);
    const std::string path = (tmp.path / "model.ckpt").string();
    models::save_checkpoint(p, path);
    const models::ModelParams q = models::load_checkpoint(path);
    try {
        models::validate_params(q, models::MlpSpec{4, {16}, 3});
        FAIL("expected ConfigError");
    } catch (const eakd::ConfigError& e) {
        CHECK(std::string(e.what()).find("layer0.weight") != std::string::npos);
    }
    CHECK_THROWS_AS(models::validate_params(q, models::MlpSpec{4, {8, 8}, 3}), eakd::ConfigError);
}
