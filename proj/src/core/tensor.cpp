#include "spellerssl/core/tensor.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "spellerssl/core/error.hpp"

namespace spellerssl::core {

namespace {
thread_local bool g_grad_enabled = true;
}  // namespace

std::size_t shape_numel(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string shape_str(const Shape& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << 'x';
    out << shape[i];
  }
  out << ']';
  return out.str();
}

bool grad_enabled() noexcept { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

template <typename T>
BasicTensor<T>::BasicTensor(Shape shape, std::vector<T> values, bool requires_grad) {
  if (shape_numel(shape) != values.size()) {
    throw DimensionError("tensor shape " + shape_str(shape) + " holds " +
                         std::to_string(shape_numel(shape)) + " values, got " +
                         std::to_string(values.size()));
  }
  node_ = std::make_shared<detail::Node<T>>();
  node_->shape = std::move(shape);
  node_->data = std::move(values);
  node_->requires_grad = requires_grad;
  if (requires_grad) node_->grad.assign(node_->data.size(), T{0});
}

template <typename T>
BasicTensor<T> BasicTensor<T>::zeros(Shape shape, bool requires_grad) {
  const std::size_t n = shape_numel(shape);
  return BasicTensor(std::move(shape), std::vector<T>(n, T{0}), requires_grad);
}

template <typename T>
BasicTensor<T> BasicTensor<T>::full(Shape shape, T value, bool requires_grad) {
  const std::size_t n = shape_numel(shape);
  return BasicTensor(std::move(shape), std::vector<T>(n, value), requires_grad);
}

template <typename T>
BasicTensor<T> BasicTensor<T>::scalar(T value, bool requires_grad) {
  return BasicTensor(Shape{1}, std::vector<T>{value}, requires_grad);
}

template <typename T>
void BasicTensor<T>::require_defined() const {
  if (!node_) throw StateError("use of an undefined tensor");
}

template <typename T>
const Shape& BasicTensor<T>::shape() const {
  require_defined();
  return node_->shape;
}

template <typename T>
std::size_t BasicTensor<T>::size(std::size_t axis) const {
  const Shape& s = shape();
  if (axis >= s.size()) {
    throw DimensionError("axis " + std::to_string(axis) + " out of range for " +
                         shape_str(s));
  }
  return s[axis];
}

template <typename T>
std::size_t BasicTensor<T>::numel() const {
  require_defined();
  return node_->data.size();
}

template <typename T>
std::span<T> BasicTensor<T>::values() {
  require_defined();
  return node_->data;
}

template <typename T>
std::span<const T> BasicTensor<T>::values() const {
  require_defined();
  return node_->data;
}

template <typename T>
T BasicTensor<T>::item() const {
  if (numel() != 1) {
    throw DimensionError("item() on tensor of shape " + shape_str(shape()));
  }
  return node_->data[0];
}

template <typename T>
bool BasicTensor<T>::requires_grad() const {
  require_defined();
  return node_->requires_grad;
}

template <typename T>
bool BasicTensor<T>::is_leaf() const {
  require_defined();
  return node_->is_leaf;
}

template <typename T>
void BasicTensor<T>::set_requires_grad(bool on) {
  require_defined();
  if (!node_->is_leaf) throw StateError("requires_grad can only be set on leaf tensors");
  node_->requires_grad = on;
  if (on && node_->grad.size() != node_->data.size()) {
    node_->grad.assign(node_->data.size(), T{0});
  }
  if (!on) node_->grad.clear();
}

template <typename T>
bool BasicTensor<T>::has_grad() const {
  require_defined();
  return node_->grad.size() == node_->data.size();
}

template <typename T>
std::span<T> BasicTensor<T>::grad() {
  if (!has_grad()) throw StateError("tensor has no gradient buffer");
  return node_->grad;
}

template <typename T>
std::span<const T> BasicTensor<T>::grad() const {
  if (!has_grad()) throw StateError("tensor has no gradient buffer");
  return node_->grad;
}

template <typename T>
void BasicTensor<T>::zero_grad() {
  require_defined();
  if (node_->requires_grad) node_->grad.assign(node_->data.size(), T{0});
}

template <typename T>
BasicTensor<T> BasicTensor<T>::detach() const {
  require_defined();
  return BasicTensor(node_->shape, node_->data, false);
}

template <typename T>
BasicTensor<T> BasicTensor<T>::clone() const {
  require_defined();
  return BasicTensor(node_->shape, node_->data, node_->requires_grad);
}

template <typename T>
BasicTensor<T> BasicTensor<T>::make_result(Shape shape, std::vector<T> values,
                                           const std::vector<BasicTensor>& parents,
                                           BackwardFn backward) {
  BasicTensor result(std::move(shape), std::move(values), false);
  if (!grad_enabled()) return result;
  const bool needs = std::any_of(parents.begin(), parents.end(), [](const BasicTensor& p) {
    return p.defined() && p.requires_grad();
  });
  if (!needs) return result;
  auto& node = *result.node_;
  node.requires_grad = true;
  node.is_leaf = false;
  node.backward_fn = std::move(backward);
  for (const auto& p : parents) {
    if (p.defined() && p.requires_grad()) node.parents.push_back(p.node_);
  }
  return result;
}

template <typename T>
void accumulate_grad(detail::Node<T>& node, std::span<const T> grad) {
  if (node.grad.size() != node.data.size()) node.grad.assign(node.data.size(), T{0});
  for (std::size_t i = 0; i < grad.size(); ++i) node.grad[i] += grad[i];
}

template <typename T>
std::span<T> grad_sink(const std::shared_ptr<detail::Node<T>>& node) {
  if (!node || !node->requires_grad) return {};
  if (node->grad.size() != node->data.size()) node->grad.assign(node->data.size(), T{0});
  return node->grad;
}

template <typename T>
void backward(const BasicTensor<T>& loss) {
  if (!loss.defined()) throw StateError("backward() on an undefined tensor");
  if (loss.numel() != 1) {
    throw DimensionError("backward() needs a scalar loss, got shape " +
                         shape_str(loss.shape()));
  }
  if (!loss.requires_grad()) {
    throw StateError("backward() on a tensor that does not require grad");
  }

  std::vector<detail::Node<T>*> order;
  std::unordered_set<detail::Node<T>*> visited;
  // Iterative post-order DFS: every node lands after its inputs.
  std::vector<std::pair<detail::Node<T>*, std::size_t>> stack;
  stack.emplace_back(loss.node().get(), 0);
  visited.insert(loss.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      detail::Node<T>* parent = node->parents[next++].get();
      if (visited.insert(parent).second) stack.emplace_back(parent, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (detail::Node<T>* node : order) {
    if (!node->is_leaf) {
      node->grad.assign(node->data.size(), T{0});
    } else if (node->grad.size() != node->data.size()) {
      node->grad.assign(node->data.size(), T{0});
    }
  }
  loss.node()->grad[0] += T{1};

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::Node<T>* node = *it;
    if (!node->is_leaf && node->backward_fn) node->backward_fn(node->grad);
  }
}

template class BasicTensor<float>;
template class BasicTensor<double>;
template void backward<float>(const BasicTensor<float>&);
template void backward<double>(const BasicTensor<double>&);
template void accumulate_grad<float>(detail::Node<float>&, std::span<const float>);
template void accumulate_grad<double>(detail::Node<double>&, std::span<const double>);
template std::span<float> grad_sink<float>(const std::shared_ptr<detail::Node<float>>&);
template std::span<double> grad_sink<double>(const std::shared_ptr<detail::Node<double>>&);

}  // namespace spellerssl::core
