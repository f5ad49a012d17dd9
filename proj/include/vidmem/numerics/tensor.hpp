#pragma once

// Dense row-major double tensors with define-by-run reverse-mode gradients.
//
// A Tensor is a cheap handle onto a shared node. Values are fixed at
// construction and must be finite; only the gradient buffer is written later,
// by backward(). Parameters (leaf tensors) additionally expose
// mutable_data() so optimizers and finite-difference checks can update them
// in place between forward passes.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace vidmem {

using Shape = std::vector<std::size_t>;

std::string shape_str(const Shape& shape);
std::size_t shape_numel(const Shape& shape);

namespace detail {

struct Node {
  Shape shape;
  std::vector<double> data;
  std::vector<double> grad;  // empty until first accumulation
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this->grad and accumulates into parents' gradients.
  std::function<void(Node&)> backward_fn;

  bool is_leaf() const { return parents.empty(); }
  std::vector<double>& grad_buffer();
};

}  // namespace detail

class Tensor {
 public:
  Tensor() = default;
  // Throws DimensionError if shape does not describe data, NumericError on
  // non-finite values.
  Tensor(Shape shape, std::vector<double> data, bool requires_grad = false);

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);
  static Tensor vector(std::vector<double> values, bool requires_grad = false);
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                       bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const;
  std::span<const double> data() const;
  double item() const;
  double operator[](std::size_t flat_index) const { return data()[flat_index]; }
  double at(std::size_t row, std::size_t col) const;

  bool requires_grad() const;
  bool has_grad() const;
  // Zero-filled view of the right size when no gradient has been accumulated.
  std::vector<double> grad() const;

  // Leaf tensors only; throws ContractError on graph results.
  std::span<double> mutable_data();
  void zero_grad();

  // Same values, no graph history, no gradient tracking.
  Tensor detach() const;

  // Populates gradients of every grad-tracked tensor reachable from this
  // scalar. Throws ContractError when called on a non-scalar.
  void backward() const;

  // Used by ops: builds a graph node when gradient mode is on and any parent
  // tracks gradients, otherwise a plain constant.
  static Tensor from_op(const char* op, Shape shape, std::vector<double> data,
                        const std::vector<Tensor>& parents,
                        std::function<void(detail::Node&)> backward_fn);

  detail::Node* node() const { return node_.get(); }
  bool same_node(const Tensor& other) const { return node_ == other.node_; }

 private:
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<detail::Node> node_;
};

// Disables graph construction on this thread for the guard's lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_mode_enabled();

}  // namespace vidmem
