#include "eakd/models.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "eakd/kernels.hpp"
#include "eakd/rng.hpp"

namespace eakd::models {

namespace k = eakd::kernels;

void MlpSpec::validate() const {
    if (input_dim < 1) throw ConfigError("mlp input_dim must be >= 1");
    if (class_count < 2) throw ConfigError("mlp class_count must be >= 2");
    for (std::size_t d : hidden_dims) {
        if (d < 1) throw ConfigError("mlp hidden dims must be >= 1");
    }
}

std::vector<std::size_t> MlpSpec::widths() const {
    std::vector<std::size_t> w;
    w.push_back(input_dim);
    for (std::size_t d : hidden_dims) w.push_back(d);
    w.push_back(class_count);
    return w;
}

Tensor& ModelParams::find(const std::string& name) {
    for (auto& [n, t] : tensors) {
        if (n == name) return t;
    }
    throw ContractError("no parameter named '" + name + "'");
}

const Tensor& ModelParams::find(const std::string& name) const {
    for (const auto& [n, t] : tensors) {
        if (n == name) return t;
    }
    throw ContractError("no parameter named '" + name + "'");
}

ModelParams init(const MlpSpec& spec, std::uint64_t seed) {
    spec.validate();
    Pcg32 rng(seed, rng_stream::init);
    const std::vector<std::size_t> w = spec.widths();
    ModelParams params;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        const std::size_t fan_in = w[i], fan_out = w[i + 1];
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        Tensor weight({fan_in, fan_out});
        for (double& v : weight.data) v = rng.uniform(-limit, limit);
        params.tensors.emplace_back("layer" + std::to_string(i) + ".weight", std::move(weight));
        params.tensors.emplace_back("layer" + std::to_string(i) + ".bias", Tensor({fan_out}));
    }
    return params;
}

void validate_params(const ModelParams& params, const MlpSpec& spec) {
    spec.validate();
    const std::vector<std::size_t> w = spec.widths();
    const std::size_t expect = 2 * (w.size() - 1);
    if (params.tensors.size() != expect) {
        throw ConfigError("checkpoint has " + std::to_string(params.tensors.size()) +
                          " tensors, spec expects " + std::to_string(expect));
    }
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        const std::string wname = "layer" + std::to_string(i) + ".weight";
        const std::string bname = "layer" + std::to_string(i) + ".bias";
        if (params.tensors[2 * i].first != wname || params.tensors[2 * i + 1].first != bname) {
            throw ConfigError("checkpoint tensor order differs from spec at layer " + std::to_string(i));
        }
        const Tensor& weight = params.tensors[2 * i].second;
        const Tensor& bias = params.tensors[2 * i + 1].second;
        if (weight.shape != std::vector<std::size_t>{w[i], w[i + 1]}) {
            throw ConfigError("shape mismatch for " + wname + ": checkpoint " + weight.shape_str() +
                              ", spec " + Tensor::shape_string({w[i], w[i + 1]}));
        }
        if (bias.shape != std::vector<std::size_t>{w[i + 1]}) {
            throw ConfigError("shape mismatch for " + bname + ": checkpoint " + bias.shape_str() +
                              ", spec " + Tensor::shape_string({w[i + 1]}));
        }
    }
}

MlpSpec infer_spec(const ModelParams& params) {
    if (params.tensors.empty() || params.tensors.size() % 2 != 0) {
        throw ConfigError("checkpoint does not hold weight+bias pairs (" +
                          std::to_string(params.tensors.size()) + " tensors)");
    }
    MlpSpec spec;
    const std::size_t layers = params.layer_count();
    for (std::size_t i = 0; i < layers; ++i) {
        const std::string wname = "layer" + std::to_string(i) + ".weight";
        const std::string bname = "layer" + std::to_string(i) + ".bias";
        const auto& [got_wname, weight] = params.tensors[2 * i];
        const auto& [got_bname, bias] = params.tensors[2 * i + 1];
        if (got_wname != wname || got_bname != bname) {
            throw ConfigError("unexpected tensor name '" + got_wname + "' where " + wname + " was expected");
        }
        if (weight.shape.size() != 2) {
            throw ConfigError(wname + " is not 2-D: " + weight.shape_str());
        }
        if (bias.shape.size() != 1 || bias.size() != weight.cols()) {
            throw ConfigError(bname + " shape " + bias.shape_str() + " does not match " +
                              wname + " " + weight.shape_str());
        }
        if (i == 0) {
            spec.input_dim = weight.rows();
        } else if (params.tensors[2 * (i - 1)].second.cols() != weight.rows()) {
            throw ConfigError(wname + " input width " + std::to_string(weight.rows()) +
                              " does not chain with layer" + std::to_string(i - 1) + " output width " +
                              std::to_string(params.tensors[2 * (i - 1)].second.cols()));
        }
        if (i + 1 < layers) spec.hidden_dims.push_back(weight.cols());
        else spec.class_count = weight.cols();
    }
    spec.validate();
    return spec;
}

Tensor forward(const ModelParams& params, const Tensor& batch) {
    require_matrix(batch, "forward batch");
    const std::size_t layers = params.layer_count();
    if (layers == 0) throw ContractError("forward on empty model");
    Tensor x = batch;
    for (std::size_t i = 0; i < layers; ++i) {
        const Tensor& weight = params.tensors[2 * i].second;
        const Tensor& bias = params.tensors[2 * i + 1].second;
        if (x.cols() != weight.rows()) {
            throw DimensionError("layer " + std::to_string(i) + " input width " + x.shape_str() +
                                 " does not match weight " + weight.shape_str());
        }
        Tensor y({x.rows(), weight.cols()});
        k::matmul_nn(x.data.data(), weight.data.data(), y.data.data(), x.rows(), x.cols(), weight.cols());
        for (std::size_t r = 0; r < y.rows(); ++r) {
            k::ew_add_serial(y.data.data() + r * y.cols(), bias.data.data(),
                             y.data.data() + r * y.cols(), y.cols());
        }
        if (i + 1 < layers) k::ew_relu(y.data.data(), y.data.data(), y.size());
        x = std::move(y);
    }
    return x;
}

std::vector<ag::NodeId> bind_params(ag::Graph& g, const ModelParams& params) {
    std::vector<ag::NodeId> ids;
    ids.reserve(params.tensors.size());
    for (const auto& [name, t] : params.tensors) {
        (void)name;
        ids.push_back(g.leaf(t, /*requires_grad=*/true));
    }
    return ids;
}

ag::NodeId forward(ag::Graph& g, const std::vector<ag::NodeId>& param_ids, ag::NodeId batch,
                   std::size_t layer_count) {
    if (param_ids.size() != 2 * layer_count) {
        throw ContractError("forward expects weight+bias per layer, got " +
                            std::to_string(param_ids.size()) + " ids for " +
                            std::to_string(layer_count) + " layers");
    }
    ag::NodeId x = batch;
    for (std::size_t i = 0; i < layer_count; ++i) {
        x = g.add(g.matmul(x, param_ids[2 * i]), param_ids[2 * i + 1]);
        if (i + 1 < layer_count) x = g.relu(x);
    }
    return x;
}

// ---------------------------------------------------------------------------
// checkpoint io
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'E', 'A', 'K', 'D'};
constexpr std::uint32_t kVersion = 1;

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(out, bits);
}

struct Reader {
    const std::string& buf;
    std::size_t pos = 0;
    const std::string& path;

    void need(std::size_t n, const char* what) const {
        if (pos + n > buf.size()) {
            throw FormatError(path + ": truncated while reading " + std::string(what) +
                              " at byte offset " + std::to_string(pos));
        }
    }
    std::uint8_t u8(const char* what) {
        need(1, what);
        return static_cast<std::uint8_t>(buf[pos++]);
    }
    std::uint16_t u16(const char* what) {
        need(2, what);
        std::uint16_t v = 0;
        for (int i = 0; i < 2; ++i) v |= static_cast<std::uint16_t>(static_cast<std::uint8_t>(buf[pos++])) << (8 * i);
        return v;
    }
    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(buf[pos++])) << (8 * i);
        return v;
    }
    std::uint64_t u64(const char* what) {
        need(8, what);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(buf[pos++])) << (8 * i);
        return v;
    }
    double f64(const char* what) {
        const std::uint64_t bits = u64(what);
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
    std::string bytes(std::size_t n, const char* what) {
        need(n, what);
        std::string s = buf.substr(pos, n);
        pos += n;
        return s;
    }
};

} // namespace

void save_checkpoint(const ModelParams& params, const std::string& path) {
    std::string out;
    out.append(kMagic, 4);
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(params.tensors.size()));
    for (const auto& [name, t] : params.tensors) {
        if (name.size() > 0xffff) throw ContractError("tensor name too long: " + name);
        put_u16(out, static_cast<std::uint16_t>(name.size()));
        out += name;
        out.push_back(static_cast<char>(t.shape.size()));
        for (std::size_t d : t.shape) put_u64(out, d);
        for (double v : t.data) put_f64(out, v);
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open checkpoint for writing: " + path);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw IoError("failed writing checkpoint: " + path);
}

ModelParams load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open checkpoint: " + path);
    std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    Reader r{buf, 0, path};

    const std::string magic = r.bytes(4, "magic");
    if (std::memcmp(magic.data(), kMagic, 4) != 0) {
        throw FormatError(path + ": bad magic bytes at byte offset 0");
    }
    const std::uint32_t version = r.u32("version");
    if (version != kVersion) {
        throw FormatError(path + ": unsupported checkpoint version " + std::to_string(version) +
                          " at byte offset 4");
    }
    const std::uint32_t count = r.u32("tensor count");
    ModelParams params;
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint16_t name_len = r.u16("name length");
        const std::string name = r.bytes(name_len, "name");
        const std::uint8_t rank = r.u8("rank");
        std::vector<std::size_t> shape(rank);
        std::size_t total = 1;
        for (std::uint8_t d = 0; d < rank; ++d) {
            const std::uint64_t dim = r.u64("dimension");
            if (dim == 0 || dim > (1ull << 32)) {
                throw FormatError(path + ": implausible dimension " + std::to_string(dim) +
                                  " at byte offset " + std::to_string(r.pos - 8));
            }
            shape[d] = static_cast<std::size_t>(dim);
            total *= shape[d];
        }
        Tensor t(shape);
        for (std::size_t e = 0; e < total; ++e) t.data[e] = r.f64("tensor data");
        params.tensors.emplace_back(name, std::move(t));
    }
    if (r.pos != buf.size()) {
        throw FormatError(path + ": trailing bytes at byte offset " + std::to_string(r.pos));
    }
    return params;
}

} // namespace eakd::models
