#include "irl/tensor_net.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

#include "irl/errors.hpp"

namespace irl::net {
namespace {

// Vectorized exp keeps these about 3x cheaper than the scalar libm calls.
// Both saturate correctly when exp overflows; absolute error stays near 1e-16.
Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& z) { return 1.0 / (1.0 + (-z.array()).exp()); }

Eigen::MatrixXd tanh_of(const Eigen::MatrixXd& z) {
  return 1.0 - 2.0 / ((2.0 * z.array()).exp() + 1.0);
}

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

// Value, first and second derivative of the activation, elementwise.
struct ActEval {
  Eigen::MatrixXd value, d1, d2;
};

ActEval evaluate(Activation a, const Eigen::MatrixXd& z, bool need_d2) {
  ActEval r;
  switch (a) {
    case Activation::Linear:
      r.value = z;
      r.d1 = Eigen::MatrixXd::Ones(z.rows(), z.cols());
      if (need_d2) r.d2 = Eigen::MatrixXd::Zero(z.rows(), z.cols());
      break;
    case Activation::Sigmoid: {
      r.value = sigmoid(z);
      r.d1 = r.value.array() * (1.0 - r.value.array());
      if (need_d2) r.d2 = r.d1.array() * (1.0 - 2.0 * r.value.array());
      break;
    }
    case Activation::Tanh: {
      r.value = tanh_of(z);
      r.d1 = 1.0 - r.value.array().square();
      if (need_d2) r.d2 = -2.0 * r.value.array() * r.d1.array();
      break;
    }
    case Activation::Softplus: {
      r.value = z.unaryExpr([](double v) { return softplus(v); });
      r.d1 = sigmoid(z);
      if (need_d2) r.d2 = r.d1.array() * (1.0 - r.d1.array());
      break;
    }
  }
  return r;
}

}  // namespace

std::string to_string(Activation a) {
  switch (a) {
    case Activation::Linear: return "linear";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Tanh: return "tanh";
    case Activation::Softplus: return "softplus";
  }
  return "?";
}

Activation activation_from_string(std::string_view name) {
  if (name == "linear") return Activation::Linear;
  if (name == "sigmoid") return Activation::Sigmoid;
  if (name == "tanh") return Activation::Tanh;
  if (name == "softplus") return Activation::Softplus;
  throw ConfigError("unknown activation '" + std::string(name) +
                    "' (valid: linear, sigmoid, tanh, softplus)");
}

// ---- ParamSet ----

ParamSet& ParamSet::operator+=(const ParamSet& other) {
  add_scaled(other, 1.0);
  return *this;
}

ParamSet& ParamSet::operator*=(double s) {
  for (auto& l : layers) {
    l.weight *= s;
    l.bias *= s;
  }
  return *this;
}

ParamSet operator*(double s, ParamSet p) {
  p *= s;
  return p;
}

void ParamSet::add_scaled(const ParamSet& other, double s) {
  require_shape(same_shape(other), "ParamSet::add_scaled: shape mismatch");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    layers[i].weight += s * other.layers[i].weight;
    layers[i].bias += s * other.layers[i].bias;
  }
}

void ParamSet::set_zero() {
  for (auto& l : layers) {
    l.weight.setZero();
    l.bias.setZero();
  }
}

double ParamSet::squared_norm() const {
  double s = 0.0;
  for (const auto& l : layers) s += l.weight.squaredNorm() + l.bias.squaredNorm();
  return s;
}

double ParamSet::norm() const { return std::sqrt(squared_norm()); }

bool ParamSet::all_finite() const {
  for (const auto& l : layers)
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  return true;
}

bool ParamSet::same_shape(const ParamSet& other) const {
  if (layers.size() != other.layers.size()) return false;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& a = layers[i];
    const auto& b = other.layers[i];
    if (a.weight.rows() != b.weight.rows() || a.weight.cols() != b.weight.cols() ||
        a.bias.size() != b.bias.size())
      return false;
  }
  return true;
}

std::size_t ParamSet::size() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

// Row-major weights followed by bias, layer by layer.
std::vector<double> ParamSet::flatten() const {
  std::vector<double> flat;
  flat.reserve(size());
  for (const auto& l : layers) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) flat.push_back(l.weight(r, c));
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) flat.push_back(l.bias[r]);
  }
  return flat;
}

void ParamSet::assign(const std::vector<double>& flat) {
  require_shape(flat.size() == size(), "ParamSet::assign: expected " + std::to_string(size()) +
                                           " values, got " + std::to_string(flat.size()));
  std::size_t k = 0;
  for (auto& l : layers) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = flat[k++];
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias[r] = flat[k++];
  }
}

// ---- DenseNet ----

DenseNet::DenseNet(std::vector<int> dims, Activation hidden, Activation output)
    : dims_(std::move(dims)), hidden_(hidden), output_(output) {
  if (dims_.size() < 2) throw ShapeError("DenseNet needs at least input and output dims");
  for (int d : dims_)
    if (d <= 0) throw ShapeError("DenseNet layer dims must be positive");
  for (std::size_t i = 0; i + 1 < dims_.size(); ++i)
    params_.layers.push_back(
        {Eigen::MatrixXd::Zero(dims_[i + 1], dims_[i]), Eigen::VectorXd::Zero(dims_[i + 1])});
}

DenseNet DenseNet::glorot(std::vector<int> dims, Activation hidden, Activation output,
                          RngStream& rng) {
  DenseNet net(std::move(dims), hidden, output);
  for (auto& l : net.params_.layers) {
    const double limit = std::sqrt(6.0 / static_cast<double>(l.weight.rows() + l.weight.cols()));
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = rng.uniform(-limit, limit);
  }
  return net;
}

ParamSet DenseNet::zeros_like() const {
  ParamSet p = params_;
  p.set_zero();
  return p;
}

void DenseNet::check_input(Eigen::Index rows) const {
  if (rows != input_dim())
    throw ShapeError("DenseNet: input has " + std::to_string(rows) + " rows, expected " +
                     std::to_string(input_dim()));
}

Eigen::VectorXd DenseNet::forward(const Eigen::VectorXd& x) const { return forward_batch(x); }

Eigen::MatrixXd DenseNet::forward_batch(const Eigen::MatrixXd& xs) const {
  check_input(xs.rows());
  Eigen::MatrixXd h = xs;
  for (std::size_t l = 0; l < params_.layers.size(); ++l) {
    const auto& layer = params_.layers[l];
    Eigen::MatrixXd z = layer.weight * h;
    z.colwise() += layer.bias;
    h = evaluate(activation_of(l), z, false).value;
  }
  return h;
}

ParamSet DenseNet::param_gradients(const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& upstream) const {
  return param_gradients_batch(x, upstream);
}

ParamSet DenseNet::param_gradients_batch(const Eigen::MatrixXd& xs,
                                         const Eigen::MatrixXd& upstream) const {
  check_input(xs.rows());
  require_shape(upstream.rows() == output_dim() && upstream.cols() == xs.cols(),
                "DenseNet::param_gradients: upstream shape mismatch");
  const std::size_t n_layers = params_.layers.size();
  std::vector<Eigen::MatrixXd> inputs(n_layers);
  std::vector<Eigen::MatrixXd> d1(n_layers);
  Eigen::MatrixXd h = xs;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const auto& layer = params_.layers[l];
    inputs[l] = h;
    Eigen::MatrixXd z = layer.weight * h;
    z.colwise() += layer.bias;
    auto act = evaluate(activation_of(l), z, false);
    d1[l] = std::move(act.d1);
    h = std::move(act.value);
  }
  ParamSet grad = zeros_like();
  Eigen::MatrixXd h_bar = upstream;
  for (std::size_t l = n_layers; l-- > 0;) {
    const Eigen::MatrixXd z_bar = d1[l].cwiseProduct(h_bar);
    grad.layers[l].weight.noalias() = z_bar * inputs[l].transpose();
    grad.layers[l].bias = z_bar.rowwise().sum();
    if (l > 0) h_bar = params_.layers[l].weight.transpose() * z_bar;
  }
  return grad;
}

Eigen::VectorXd DenseNet::input_gradient(const Eigen::VectorXd& x, int output_index) const {
  check_input(x.size());
  if (output_index < 0 || output_index >= output_dim())
    throw ShapeError("DenseNet::input_gradient: output index " + std::to_string(output_index) +
                     " out of range");
  Eigen::MatrixXd h = x;
  std::vector<Eigen::MatrixXd> d1(params_.layers.size());
  for (std::size_t l = 0; l < params_.layers.size(); ++l) {
    const auto& layer = params_.layers[l];
    Eigen::MatrixXd z = layer.weight * h;
    z.colwise() += layer.bias;
    auto act = evaluate(activation_of(l), z, false);
    d1[l] = std::move(act.d1);
    h = std::move(act.value);
  }
  Eigen::VectorXd h_bar = Eigen::VectorXd::Zero(output_dim());
  h_bar[output_index] = 1.0;
  for (std::size_t l = params_.layers.size(); l-- > 0;) {
    const Eigen::VectorXd z_bar = d1[l].col(0).cwiseProduct(h_bar);
    h_bar = params_.layers[l].weight.transpose() * z_bar;
  }
  return h_bar;
}

Eigen::MatrixXd DenseNet::input_jacobian(const Eigen::VectorXd& x) const {
  check_input(x.size());
  const Eigen::Index n = x.size();
  const Eigen::MatrixXd xs = x.replicate(1, n);
  return forward_tangent(xs, Eigen::MatrixXd::Identity(n, n)).tangent;
}

Eigen::MatrixXd DenseNet::input_hessian(const Eigen::VectorXd& x, int output_index) const {
  check_input(x.size());
  if (output_index < 0 || output_index >= output_dim())
    throw ShapeError("DenseNet::input_hessian: output index out of range");
  const Eigen::Index n = x.size();
  Eigen::MatrixXd hess(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double h = kHessianStep * std::max(1.0, std::abs(x[i]));
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    hess.col(i) = (input_gradient(xp, output_index) - input_gradient(xm, output_index)) / (2.0 * h);
  }
  return 0.5 * (hess + hess.transpose());
}

TangentForward DenseNet::forward_tangent(const Eigen::MatrixXd& xs,
                                         const Eigen::MatrixXd& dirs) const {
  check_input(xs.rows());
  require_shape(dirs.rows() == xs.rows() && dirs.cols() == xs.cols(),
                "DenseNet::forward_tangent: direction shape mismatch");
  Eigen::MatrixXd h = xs;
  Eigen::MatrixXd t = dirs;
  for (std::size_t l = 0; l < params_.layers.size(); ++l) {
    const auto& layer = params_.layers[l];
    Eigen::MatrixXd z = layer.weight * h;
    z.colwise() += layer.bias;
    auto act = evaluate(activation_of(l), z, false);
    t = act.d1.cwiseProduct(layer.weight * t);
    h = std::move(act.value);
  }
  return {std::move(h), std::move(t)};
}

TangentForward DenseNet::forward_tangents(const Eigen::MatrixXd& xs,
                                          const Eigen::MatrixXd& dirs) const {
  check_input(xs.rows());
  const Eigen::Index b = xs.cols();
  require_shape(dirs.rows() == xs.rows() && b > 0 && dirs.cols() % b == 0,
                "DenseNet::forward_tangents: direction shape mismatch");
  const Eigen::Index blocks = dirs.cols() / b;
  Eigen::MatrixXd h = xs;
  Eigen::MatrixXd t = dirs;
  for (std::size_t l = 0; l < params_.layers.size(); ++l) {
    const auto& layer = params_.layers[l];
    Eigen::MatrixXd z = layer.weight * h;
    z.colwise() += layer.bias;
    auto act = evaluate(activation_of(l), z, false);
    t = layer.weight * t;
    for (Eigen::Index j = 0; j < blocks; ++j) t.middleCols(j * b, b).array() *= act.d1.array();
    h = std::move(act.value);
  }
  return {std::move(h), std::move(t)};
}

ParamSet DenseNet::tangent_param_gradients(const Eigen::MatrixXd& xs,
                                           const Eigen::MatrixXd& dirs,
                                           const Eigen::MatrixXd& out_cot,
                                           const Eigen::MatrixXd& tan_cot) const {
  check_input(xs.rows());
  const Eigen::Index b = xs.cols();
  require_shape(dirs.rows() == xs.rows() && b > 0 && dirs.cols() % b == 0,
                "DenseNet::tangent_param_gradients: direction shape mismatch");
  require_shape(out_cot.rows() == output_dim() && out_cot.cols() == b &&
                    tan_cot.rows() == output_dim() && tan_cot.cols() == dirs.cols(),
                "DenseNet::tangent_param_gradients: cotangent shape mismatch");
  const Eigen::Index blocks = dirs.cols() / b;
  const std::size_t n_layers = params_.layers.size();
  struct Cache {
    Eigen::MatrixXd h_in, t_in, z_dot, d1, d2;
  };
  std::vector<Cache> cache(n_layers);
  Eigen::MatrixXd h = xs;
  Eigen::MatrixXd t = dirs;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const auto& layer = params_.layers[l];
    Cache& c = cache[l];
    c.h_in = h;
    c.t_in = t;
    Eigen::MatrixXd z = layer.weight * h;
    z.colwise() += layer.bias;
    c.z_dot = layer.weight * t;
    auto act = evaluate(activation_of(l), z, true);
    t = c.z_dot;
    for (Eigen::Index j = 0; j < blocks; ++j) t.middleCols(j * b, b).array() *= act.d1.array();
    h = std::move(act.value);
    c.d1 = std::move(act.d1);
    c.d2 = std::move(act.d2);
  }

  // h_l = phi(z), t_l = phi'(z) * z_dot, z = W h + b, z_dot = W t.
  // Every tangent block shares h, so z_bar sums the second-order terms over blocks.
  ParamSet grad = zeros_like();
  Eigen::MatrixXd h_bar = out_cot;
  Eigen::MatrixXd t_bar = tan_cot;
  for (std::size_t l = n_layers; l-- > 0;) {
    const Cache& c = cache[l];
    Eigen::MatrixXd zdot_bar = t_bar;
    Eigen::MatrixXd z_bar = c.d1.cwiseProduct(h_bar);
    for (Eigen::Index j = 0; j < blocks; ++j) {
      zdot_bar.middleCols(j * b, b).array() *= c.d1.array();
      z_bar.array() += c.d2.array() * c.z_dot.middleCols(j * b, b).array() *
                       t_bar.middleCols(j * b, b).array();
    }
    const auto& w = params_.layers[l].weight;
    grad.layers[l].weight.noalias() = z_bar * c.h_in.transpose();
    grad.layers[l].weight.noalias() += zdot_bar * c.t_in.transpose();
    grad.layers[l].bias = z_bar.rowwise().sum();
    if (l > 0) {
      h_bar = w.transpose() * z_bar;
      t_bar = w.transpose() * zdot_bar;
    }
  }
  return grad;
}

bool DenseNet::operator==(const DenseNet& other) const {
  if (dims_ != other.dims_ || hidden_ != other.hidden_ || output_ != other.output_) return false;
  for (std::size_t i = 0; i < params_.layers.size(); ++i) {
    if (params_.layers[i].weight != other.params_.layers[i].weight ||
        params_.layers[i].bias != other.params_.layers[i].bias)
      return false;
  }
  return true;
}

// ---- serialization ----

void to_json(nlohmann::json& j, const ParamSet& p) {
  j = nlohmann::json::array();
  for (const auto& l : p.layers) {
    std::vector<double> w;
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) w.push_back(l.weight(r, c));
    std::vector<double> b(l.bias.data(), l.bias.data() + l.bias.size());
    j.push_back({{"rows", l.weight.rows()}, {"cols", l.weight.cols()}, {"weight", w}, {"bias", b}});
  }
}

void from_json(const nlohmann::json& j, ParamSet& p) {
  p.layers.clear();
  for (const auto& jl : j) {
    const auto rows = jl.at("rows").get<Eigen::Index>();
    const auto cols = jl.at("cols").get<Eigen::Index>();
    const auto w = jl.at("weight").get<std::vector<double>>();
    const auto b = jl.at("bias").get<std::vector<double>>();
    require_shape(static_cast<Eigen::Index>(w.size()) == rows * cols &&
                      static_cast<Eigen::Index>(b.size()) == rows,
                  "ParamSet json: inconsistent layer arrays");
    Layer l{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) l.weight(r, c) = w[r * cols + c];
    for (Eigen::Index r = 0; r < rows; ++r) l.bias[r] = b[r];
    p.layers.push_back(std::move(l));
  }
}

void to_json(nlohmann::json& j, const DenseNet& net) {
  j = {{"format", "irl.dense_net"},
       {"version", 1},
       {"layer_dims", net.dims()},
       {"hidden_activation", to_string(net.hidden_activation())},
       {"output_activation", to_string(net.output_activation())},
       {"layers", net.params()}};
}

void from_json(const nlohmann::json& j, DenseNet& net) {
  if (j.value("format", "") != "irl.dense_net" || j.value("version", 0) != 1)
    throw ConfigError("not an irl.dense_net v1 document");
  DenseNet fresh(j.at("layer_dims").get<std::vector<int>>(),
                 activation_from_string(j.at("hidden_activation").get<std::string>()),
                 activation_from_string(j.at("output_activation").get<std::string>()));
  ParamSet p = j.at("layers").get<ParamSet>();
  require_shape(p.same_shape(fresh.params()), "DenseNet json: layer shapes disagree with dims");
  fresh.params() = std::move(p);
  net = std::move(fresh);
}

}  // namespace irl::net
