#include "eakd/autograd.hpp"

#include <cmath>
#include <string>

#include "eakd/kernels.hpp"

namespace eakd::ag {

namespace k = eakd::kernels;

NodeId Graph::push(Node n) {
    if (n.requires_grad) n.grad = Tensor::zeros(n.value.shape);
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
}

void Graph::check_id(NodeId id, const char* what) const {
    if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size()) {
        throw ContractError(std::string(what) + ": node id " + std::to_string(id) + " out of range");
    }
}

const Tensor& Graph::grad(NodeId id) const {
    check_id(id, "grad");
    const Node& n = at(id);
    if (!n.requires_grad) throw ContractError("grad requested for node without requires_grad");
    return n.grad;
}

NodeId Graph::leaf(Tensor value, bool requires_grad) {
    Node n;
    n.op = Op::leaf;
    n.value = std::move(value);
    n.requires_grad = requires_grad;
    return push(std::move(n));
}

NodeId Graph::matmul(NodeId a, NodeId b) {
    check_id(a, "matmul");
    check_id(b, "matmul");
    const Tensor& va = at(a).value;
    const Tensor& vb = at(b).value;
    require_matrix(va, "matmul lhs");
    require_matrix(vb, "matmul rhs");
    if (va.cols() != vb.rows()) {
        throw DimensionError("matmul inner dimensions disagree: " + va.shape_str() + " vs " + vb.shape_str());
    }
    Node n;
    n.op = Op::matmul;
    n.a = a;
    n.b = b;
    n.value = Tensor({va.rows(), vb.cols()});
    k::matmul_nn(va.data.data(), vb.data.data(), n.value.data.data(), va.rows(), va.cols(), vb.cols());
    n.requires_grad = at(a).requires_grad || at(b).requires_grad;
    return push(std::move(n));
}

NodeId Graph::add(NodeId a, NodeId b) {
    check_id(a, "add");
    check_id(b, "add");
    const Tensor& va = at(a).value;
    const Tensor& vb = at(b).value;
    Node n;
    n.a = a;
    n.b = b;
    n.requires_grad = at(a).requires_grad || at(b).requires_grad;
    if (va.same_shape(vb)) {
        n.op = Op::add;
        n.value = Tensor(va.shape);
        k::ew_add(va.data.data(), vb.data.data(), n.value.data.data(), va.size());
    } else if (va.is_matrix() && vb.shape.size() == 1 && vb.size() == va.cols()) {
        // row-vector bias broadcast, the only broadcast allowed besides scalars;
        // per-row spans are too small to fan out
        n.op = Op::add_bias;
        n.value = Tensor(va.shape);
        const std::size_t rows = va.rows(), cols = va.cols();
        for (std::size_t i = 0; i < rows; ++i) {
            k::ew_add_serial(va.data.data() + i * cols, vb.data.data(), n.value.data.data() + i * cols, cols);
        }
    } else {
        throw DimensionError("add shapes incompatible: " + va.shape_str() + " vs " + vb.shape_str());
    }
    return push(std::move(n));
}

NodeId Graph::mul(NodeId a, NodeId b) {
    check_id(a, "mul");
    check_id(b, "mul");
    const Tensor& va = at(a).value;
    const Tensor& vb = at(b).value;
    if (!va.same_shape(vb)) {
        throw DimensionError("mul shapes differ: " + va.shape_str() + " vs " + vb.shape_str());
    }
    Node n;
    n.op = Op::mul;
    n.a = a;
    n.b = b;
    n.value = Tensor(va.shape);
    k::ew_mul(va.data.data(), vb.data.data(), n.value.data.data(), va.size());
    n.requires_grad = at(a).requires_grad || at(b).requires_grad;
    return push(std::move(n));
}

NodeId Graph::scale(NodeId a, double s) {
    check_id(a, "scale");
    const Tensor& va = at(a).value;
    Node n;
    n.op = Op::scale;
    n.a = a;
    n.scalar = s;
    n.value = Tensor(va.shape);
    k::ew_scale(va.data.data(), s, n.value.data.data(), va.size());
    n.requires_grad = at(a).requires_grad;
    return push(std::move(n));
}

NodeId Graph::relu(NodeId a) {
    check_id(a, "relu");
    const Tensor& va = at(a).value;
    Node n;
    n.op = Op::relu;
    n.a = a;
    n.value = Tensor(va.shape);
    k::ew_relu(va.data.data(), n.value.data.data(), va.size());
    n.requires_grad = at(a).requires_grad;
    return push(std::move(n));
}

NodeId Graph::exp(NodeId a) {
    check_id(a, "exp");
    const Tensor& va = at(a).value;
    Node n;
    n.op = Op::exp;
    n.a = a;
    n.value = Tensor(va.shape);
    k::ew_exp(va.data.data(), n.value.data.data(), va.size());
    n.requires_grad = at(a).requires_grad;
    return push(std::move(n));
}

NodeId Graph::log(NodeId a) {
    check_id(a, "log");
    const Tensor& va = at(a).value;
    Node n;
    n.op = Op::log;
    n.a = a;
    n.value = Tensor(va.shape);
    k::ew_log(va.data.data(), n.value.data.data(), va.size());
    n.requires_grad = at(a).requires_grad;
    return push(std::move(n));
}

NodeId Graph::sum_rows(NodeId a) {
    check_id(a, "sum_rows");
    const Tensor& va = at(a).value;
    require_matrix(va, "sum_rows input");
    Node n;
    n.op = Op::sum_rows;
    n.a = a;
    n.value = Tensor({va.rows()});
    k::sum_rows(va.data.data(), n.value.data.data(), va.rows(), va.cols());
    n.requires_grad = at(a).requires_grad;
    return push(std::move(n));
}

NodeId Graph::sum_all(NodeId a) {
    check_id(a, "sum_all");
    const Tensor& va = at(a).value;
    double s = 0.0;
    for (double v : va.data) s += v;
    Node n;
    n.op = Op::sum_all;
    n.a = a;
    n.value = Tensor::scalar(s);
    n.requires_grad = at(a).requires_grad;
    return push(std::move(n));
}

NodeId Graph::mean_all(NodeId a) {
    check_id(a, "mean_all");
    const Tensor& va = at(a).value;
    if (va.size() == 0) throw DimensionError("mean_all of empty tensor");
    double s = 0.0;
    for (double v : va.data) s += v;
    Node n;
    n.op = Op::mean_all;
    n.a = a;
    n.value = Tensor::scalar(s / static_cast<double>(va.size()));
    n.requires_grad = at(a).requires_grad;
    return push(std::move(n));
}

NodeId Graph::gather(NodeId a, std::vector<int> index) {
    check_id(a, "gather");
    const Tensor& va = at(a).value;
    require_matrix(va, "gather input");
    if (index.size() != va.rows()) {
        throw DimensionError("gather index count " + std::to_string(index.size()) +
                             " does not match rows of " + va.shape_str());
    }
    const int c = static_cast<int>(va.cols());
    for (std::size_t i = 0; i < index.size(); ++i) {
        if (index[i] < 0 || index[i] >= c) {
            throw ContractError("gather index " + std::to_string(index[i]) + " out of [0, " +
                                std::to_string(c) + ") at row " + std::to_string(i));
        }
    }
    Node n;
    n.op = Op::gather;
    n.a = a;
    n.value = Tensor({va.rows()});
    for (std::size_t i = 0; i < va.rows(); ++i) {
        n.value.data[i] = va.at(i, static_cast<std::size_t>(index[i]));
    }
    n.index = std::move(index);
    n.requires_grad = at(a).requires_grad;
    return push(std::move(n));
}

NodeId Graph::detach(NodeId a) {
    check_id(a, "detach");
    Node n;
    n.op = Op::detach;
    n.a = a;
    n.value = at(a).value;
    n.requires_grad = false;
    return push(std::move(n));
}

NodeId Graph::log_softmax(NodeId a, double temperature) {
    check_id(a, "log_softmax");
    if (!(temperature > 0.0)) {
        throw ConfigError("log_softmax temperature must be > 0, got " + std::to_string(temperature));
    }
    const Tensor& va = at(a).value;
    require_matrix(va, "log_softmax input");
    Node n;
    n.op = Op::log_softmax;
    n.a = a;
    n.scalar = 1.0 / temperature;
    n.value = Tensor(va.shape);
    k::log_softmax_rows(va.data.data(), n.value.data.data(), va.rows(), va.cols(), n.scalar);
    n.requires_grad = at(a).requires_grad;
    return push(std::move(n));
}

NodeId Graph::log_softmax_excl(NodeId a, double temperature, std::vector<int> excl) {
    check_id(a, "log_softmax_excl");
    if (!(temperature > 0.0)) {
        throw ConfigError("log_softmax_excl temperature must be > 0, got " + std::to_string(temperature));
    }
    const Tensor& va = at(a).value;
    require_matrix(va, "log_softmax_excl input");
    if (va.cols() < 2) throw DimensionError("log_softmax_excl needs at least 2 columns, got " + va.shape_str());
    if (excl.size() != va.rows()) {
        throw DimensionError("log_softmax_excl index count " + std::to_string(excl.size()) +
                             " does not match rows of " + va.shape_str());
    }
    const int c = static_cast<int>(va.cols());
    for (std::size_t i = 0; i < excl.size(); ++i) {
        if (excl[i] < 0 || excl[i] >= c) {
            throw ContractError("log_softmax_excl index " + std::to_string(excl[i]) + " out of [0, " +
                                std::to_string(c) + ") at row " + std::to_string(i));
        }
    }
    Node n;
    n.op = Op::log_softmax_excl;
    n.a = a;
    n.scalar = 1.0 / temperature;
    n.value = Tensor(va.shape);
    k::log_softmax_excl_rows(va.data.data(), n.value.data.data(), va.rows(), va.cols(), n.scalar, excl.data());
    n.index = std::move(excl);
    n.requires_grad = at(a).requires_grad;
    return push(std::move(n));
}

void Graph::backward(NodeId loss) {
    check_id(loss, "backward");
    Node& ln = at(loss);
    if (!ln.value.is_scalar()) {
        throw ContractError("backward requires a scalar loss, got shape " + ln.value.shape_str());
    }
    if (!ln.requires_grad) return;  // constant loss: nothing to propagate
    ln.grad.data[0] += 1.0;

    for (std::size_t idx = nodes_.size(); idx-- > 0;) {
        Node& n = nodes_[idx];
        if (!n.requires_grad || n.op == Op::leaf) continue;
        const double* g = n.grad.data.data();
        Node* na = n.a >= 0 ? &at(n.a) : nullptr;
        Node* nb = n.b >= 0 ? &at(n.b) : nullptr;
        const bool ga = na && na->requires_grad;
        const bool gb = nb && nb->requires_grad;
        if (!ga && !gb) continue;

        switch (n.op) {
        case Op::matmul: {
            const Tensor& va = na->value;
            const Tensor& vb = nb->value;
            if (ga) {
                k::matmul_nt(g, vb.data.data(), na->grad.data.data(),
                             va.rows(), vb.cols(), va.cols(), /*accumulate=*/true);
            }
            if (gb) {
                k::matmul_tn(va.data.data(), g, nb->grad.data.data(),
                             va.rows(), va.cols(), vb.cols(), /*accumulate=*/true);
            }
            break;
        }
        case Op::add:
            if (ga) k::acc_scale(g, 1.0, na->grad.data.data(), n.value.size());
            if (gb) k::acc_scale(g, 1.0, nb->grad.data.data(), n.value.size());
            break;
        case Op::add_bias: {
            const std::size_t rows = n.value.rows(), cols = n.value.cols();
            if (ga) k::acc_scale(g, 1.0, na->grad.data.data(), n.value.size());
            if (gb) {
                double* pb = nb->grad.data.data();
                for (std::size_t i = 0; i < rows; ++i) {
                    k::acc_scale_serial(g + i * cols, 1.0, pb, cols);
                }
            }
            break;
        }
        case Op::mul:
            if (ga) k::acc_mul(g, nb->value.data.data(), na->grad.data.data(), n.value.size());
            if (gb) k::acc_mul(g, na->value.data.data(), nb->grad.data.data(), n.value.size());
            break;
        case Op::scale:
            k::acc_scale(g, n.scalar, na->grad.data.data(), n.value.size());
            break;
        case Op::relu:
            k::acc_relu(na->value.data.data(), g, na->grad.data.data(), n.value.size());
            break;
        case Op::exp:
            k::acc_mul(g, n.value.data.data(), na->grad.data.data(), n.value.size());
            break;
        case Op::log:
            k::acc_div(g, na->value.data.data(), na->grad.data.data(), n.value.size());
            break;
        case Op::sum_rows:
            k::acc_row_broadcast(g, na->grad.data.data(), na->value.rows(), na->value.cols());
            break;
        case Op::sum_all: {
            const double gs = n.grad.data[0];
            double* pa = na->grad.data.data();
            for (std::size_t i = 0; i < na->value.size(); ++i) pa[i] += gs;
            break;
        }
        case Op::mean_all: {
            const double gs = n.grad.data[0] / static_cast<double>(na->value.size());
            double* pa = na->grad.data.data();
            for (std::size_t i = 0; i < na->value.size(); ++i) pa[i] += gs;
            break;
        }
        case Op::gather: {
            const std::size_t cols = na->value.cols();
            for (std::size_t i = 0; i < n.index.size(); ++i) {
                na->grad.data[i * cols + static_cast<std::size_t>(n.index[i])] += g[i];
            }
            break;
        }
        case Op::log_softmax:
            k::log_softmax_backward_rows(n.value.data.data(), g, na->grad.data.data(),
                                         n.value.rows(), n.value.cols(), n.scalar);
            break;
        case Op::log_softmax_excl:
            k::log_softmax_excl_backward_rows(n.value.data.data(), g, na->grad.data.data(),
                                              n.value.rows(), n.value.cols(), n.scalar, n.index.data());
            break;
        case Op::leaf:
        case Op::detach:
            break;
        }
    }
}

} // namespace eakd::ag
