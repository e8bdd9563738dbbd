#pragma once

#include <cstdint>
#include <vector>

#include "eakd/tensor.hpp"

namespace eakd::ag {

enum class Op : std::uint8_t {
    leaf,
    matmul,        // a[NxK] * b[KxM]
    add,           // same-shape elementwise
    add_bias,      // a[NxM] + b[M] broadcast over rows
    mul,           // same-shape elementwise
    scale,         // a * scalar constant
    relu,
    exp,
    log,
    sum_rows,      // [NxC] -> [N]
    sum_all,       // -> scalar
    mean_all,      // -> scalar
    gather,        // [NxC], index[N] -> [N]
    detach,        // value copy, no gradient flow
    log_softmax,   // row-wise, scalar holds 1/temperature
    log_softmax_excl, // row-wise with index[i] excluded and renormalized out
};

using NodeId = int;

// Reverse-mode tape. Nodes are appended in forward order; backward walks the
// list in exact reverse insertion order, so gradients are bitwise
// reproducible. Build and consume a graph from a single thread.
class Graph {
public:
    struct Node {
        Op op = Op::leaf;
        NodeId a = -1;
        NodeId b = -1;
        double scalar = 0.0;
        std::vector<int> index;
        Tensor value;
        Tensor grad;   // allocated iff requires_grad
        bool requires_grad = false;
    };

    // Leaf with requires_grad=true is a parameter; false is a constant.
    NodeId leaf(Tensor value, bool requires_grad);

    NodeId matmul(NodeId a, NodeId b);
    NodeId add(NodeId a, NodeId b);  // picks elementwise or row-bias form
    NodeId mul(NodeId a, NodeId b);
    NodeId scale(NodeId a, double s);
    NodeId relu(NodeId a);
    NodeId exp(NodeId a);
    NodeId log(NodeId a);
    NodeId sum_rows(NodeId a);
    NodeId sum_all(NodeId a);
    NodeId mean_all(NodeId a);
    NodeId gather(NodeId a, std::vector<int> index);
    NodeId detach(NodeId a);
    NodeId log_softmax(NodeId a, double temperature);
    NodeId log_softmax_excl(NodeId a, double temperature, std::vector<int> excl);

    // Seeds d(loss)/d(loss)=1 and accumulates into every requires_grad node.
    // loss must be scalar.
    void backward(NodeId loss);

    const Tensor& value(NodeId id) const { return nodes_[static_cast<std::size_t>(id)].value; }
    const Tensor& grad(NodeId id) const;
    bool requires_grad(NodeId id) const { return nodes_[static_cast<std::size_t>(id)].requires_grad; }
    std::size_t node_count() const { return nodes_.size(); }

private:
    NodeId push(Node n);
    Node& at(NodeId id) { return nodes_[static_cast<std::size_t>(id)]; }
    const Node& at(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }
    void check_id(NodeId id, const char* what) const;

    std::vector<Node> nodes_;
};

} // namespace eakd::ag
