#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace spellerssl::core {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

// Gradient recording is on by default; NoGradGuard disables it for the
// current thread (inference, evaluation, finite-difference probes).
bool grad_enabled() noexcept;

class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

template <typename T>
class BasicTensor;

namespace detail {

template <typename T>
struct Node {
  Shape shape;
  std::vector<T> data;
  std::vector<T> grad;
  bool requires_grad = false;
  bool is_leaf = true;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads `grad` of this node and accumulates into the parents' grads.
  std::function<void(const std::vector<T>& grad)> backward_fn;
};

}  // namespace detail

// Dense row-major array with an optional gradient. Copies share storage
// (handle semantics); use clone() or detach() for an independent buffer.
template <typename T>
class BasicTensor {
 public:
  using value_type = T;
  using NodePtr = std::shared_ptr<detail::Node<T>>;
  using BackwardFn = std::function<void(const std::vector<T>&)>;

  BasicTensor() = default;
  BasicTensor(Shape shape, std::vector<T> values, bool requires_grad = false);

  static BasicTensor zeros(Shape shape, bool requires_grad = false);
  static BasicTensor full(Shape shape, T value, bool requires_grad = false);
  static BasicTensor scalar(T value, bool requires_grad = false);

  bool defined() const noexcept { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t dim() const { return shape().size(); }
  std::size_t size(std::size_t axis) const;
  std::size_t numel() const;

  std::span<T> values();
  std::span<const T> values() const;
  T& at(std::size_t flat_index) { return values()[flat_index]; }
  T at(std::size_t flat_index) const { return values()[flat_index]; }
  T item() const;

  bool requires_grad() const;
  bool is_leaf() const;
  // Only leaves may toggle; turning it on allocates a zeroed grad buffer.
  void set_requires_grad(bool on);
  bool has_grad() const;
  std::span<T> grad();
  std::span<const T> grad() const;
  void zero_grad();

  // Fresh leaf with copied values and no history.
  BasicTensor detach() const;
  // Fresh leaf that keeps requires_grad.
  BasicTensor clone() const;

  // Builds an interior node. When recording is disabled or no parent needs a
  // gradient the result is a plain leaf and `backward` is dropped.
  static BasicTensor make_result(Shape shape, std::vector<T> values,
                                 const std::vector<BasicTensor>& parents,
                                 BackwardFn backward);

  const NodePtr& node() const { return node_; }
  bool same_storage(const BasicTensor& other) const { return node_ == other.node_; }

 private:
  explicit BasicTensor(NodePtr node) : node_(std::move(node)) {}
  void require_defined() const;

  NodePtr node_;
};

using Tensor = BasicTensor<float>;
using Tensor64 = BasicTensor<double>;

// Reverse-mode sweep from a scalar. Interior gradients are reset first; leaf
// gradients accumulate across calls until zero_grad().
template <typename T>
void backward(const BasicTensor<T>& loss);

// Adds `grad` into the node's gradient buffer, allocating it if needed.
template <typename T>
void accumulate_grad(detail::Node<T>& node, std::span<const T> grad);

// Mutable gradient buffer of a parent, allocated on first use. Returns an
// empty span when the parent does not need a gradient.
template <typename T>
std::span<T> grad_sink(const std::shared_ptr<detail::Node<T>>& node);

}  // namespace spellerssl::core
