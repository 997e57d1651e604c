#pragma once

#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "chiplet/rng.hpp"

namespace chiplet {

// Fully connected net with tanh hidden layers and a linear output layer.
// Parameters live in one flat vector: for each layer, the weight matrix
// (out x in, column-major) followed by its bias.
class Mlp {
 public:
  using Matrix = Eigen::MatrixXd;
  using Vector = Eigen::VectorXd;

  Mlp() = default;
  explicit Mlp(std::vector<int> sizes);

  const std::vector<int>& sizes() const { return sizes_; }
  int num_layers() const { return static_cast<int>(sizes_.size()) - 1; }
  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  Eigen::Index num_params() const { return params_.size(); }

  Vector& params() { return params_; }
  const Vector& params() const { return params_; }

  Eigen::Map<const Matrix> weight(int layer) const;
  Eigen::Map<const Vector> bias(int layer) const;

  // Orthogonal weights scaled by `hidden_gain` (hidden layers) and `out_gain`
  // (last layer); zero biases.
  void init_orthogonal(Rng& rng, double hidden_gain, double out_gain);

  // Activations per layer, input first; each column is one sample.
  struct Cache {
    std::vector<Matrix> acts;
  };

  Matrix forward(const Matrix& x, Cache* cache = nullptr) const;
  // Accumulates dLoss/dparams into `grad` (same layout as params()) given
  // dLoss/doutput for the batch in `cache`.
  void backward(const Cache& cache, const Matrix& d_out, Vector& grad) const;

  // {"sizes": [...], "layers": [{"weight": [[row], ...], "bias": [...]}, ...]}
  nlohmann::json to_json() const;
  static Mlp from_json(const nlohmann::json& j);

 private:
  std::vector<int> sizes_;
  std::vector<Eigen::Index> w_off_, b_off_;
  Vector params_;
};

// Adaptive-moment optimizer over a flat parameter vector.
class Adam {
 public:
  Adam() = default;
  Adam(Eigen::Index n, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);
  long steps() const { return t_; }

 private:
  double lr_ = 3e-4, b1_ = 0.9, b2_ = 0.999, eps_ = 1e-8;
  long t_ = 0;
  Eigen::VectorXd m_, v_;
};

}  // namespace chiplet
