#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "irl/rng.hpp"

namespace irl::net {

// ReLU-family activations are intentionally absent: every objective that
// touches the value network needs bounded second input derivatives.
enum class Activation { Linear, Sigmoid, Tanh, Softplus };

std::string to_string(Activation a);
Activation activation_from_string(std::string_view name);

struct Layer {
  Eigen::MatrixXd weight;  // (out x in)
  Eigen::VectorXd bias;    // (out)
};

/// Parameters, gradients and optimizer moments all share this layout.
struct ParamSet {
  std::vector<Layer> layers;

  ParamSet& operator+=(const ParamSet& other);
  ParamSet& operator*=(double s);
  void add_scaled(const ParamSet& other, double s);
  void set_zero();
  double squared_norm() const;
  double norm() const;
  bool all_finite() const;
  bool same_shape(const ParamSet& other) const;
  std::size_t size() const;
  std::vector<double> flatten() const;
  void assign(const std::vector<double>& flat);
};

ParamSet operator*(double s, ParamSet p);

/// Result of a forward pass that also pushes tangent directions through the net.
struct TangentForward {
  Eigen::MatrixXd out;      // (out_dim x batch)
  Eigen::MatrixXd tangent;  // (out_dim x batch): J(x_b) v_b per column
};

class DenseNet {
 public:
  DenseNet() = default;
  /// Zero-initialized network. dims = {input, hidden..., output}.
  DenseNet(std::vector<int> dims, Activation hidden = Activation::Sigmoid,
           Activation output = Activation::Linear);

  /// Uniform Glorot initialization in +-sqrt(6 / (fan_in + fan_out)); biases zero.
  static DenseNet glorot(std::vector<int> dims, Activation hidden, Activation output,
                         RngStream& rng);

  const std::vector<int>& dims() const { return dims_; }
  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }
  Activation hidden_activation() const { return hidden_; }
  Activation output_activation() const { return output_; }

  const ParamSet& params() const { return params_; }
  ParamSet& params() { return params_; }
  ParamSet zeros_like() const;

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& xs) const;

  /// d(upstream . forward(x)) / d(params).
  ParamSet param_gradients(const Eigen::VectorXd& x, const Eigen::VectorXd& upstream) const;
  /// Sum over columns of d(upstream_b . forward(x_b)) / d(params).
  ParamSet param_gradients_batch(const Eigen::MatrixXd& xs, const Eigen::MatrixXd& upstream) const;

  /// Exact row `output_index` of the input Jacobian.
  Eigen::VectorXd input_gradient(const Eigen::VectorXd& x, int output_index) const;
  /// Exact input Jacobian, (output_dim x input_dim).
  Eigen::MatrixXd input_jacobian(const Eigen::VectorXd& x) const;
  /// Central differences of input_gradient, step 1e-4 * max(1, |x_i|), symmetrized.
  Eigen::MatrixXd input_hessian(const Eigen::VectorXd& x, int output_index) const;

  /// Forward pass with tangents: column b of the result's tangent is J(xs_b) * dirs_b.
  TangentForward forward_tangent(const Eigen::MatrixXd& xs, const Eigen::MatrixXd& dirs) const;
  /// Several tangent blocks at the same points: dirs holds k blocks of xs.cols()
  /// columns, block-major, and the activations are evaluated once for all of them.
  TangentForward forward_tangents(const Eigen::MatrixXd& xs, const Eigen::MatrixXd& dirs) const;

  /// Parameter gradient of sum_b [ out_cot_b . out_b + tan_cot_b . tangent_b ],
  /// i.e. reverse mode through the tangent pass. With tan_cot = 0 this is
  /// param_gradients_batch; with out_cot = 0 it differentiates directional
  /// input derivatives with respect to the parameters. dirs and tan_cot may hold
  /// several blocks at the same points, as in forward_tangents.
  ParamSet tangent_param_gradients(const Eigen::MatrixXd& xs, const Eigen::MatrixXd& dirs,
                                   const Eigen::MatrixXd& out_cot,
                                   const Eigen::MatrixXd& tan_cot) const;

  bool operator==(const DenseNet& other) const;

 private:
  void check_input(Eigen::Index rows) const;
  Activation activation_of(std::size_t layer) const {
    return layer + 1 == params_.layers.size() ? output_ : hidden_;
  }

  std::vector<int> dims_;
  Activation hidden_ = Activation::Sigmoid;
  Activation output_ = Activation::Linear;
  ParamSet params_;
};

inline constexpr double kHessianStep = 1e-4;

void to_json(nlohmann::json& j, const DenseNet& net);
void from_json(const nlohmann::json& j, DenseNet& net);
void to_json(nlohmann::json& j, const ParamSet& p);
void from_json(const nlohmann::json& j, ParamSet& p);

}  // namespace irl::net
