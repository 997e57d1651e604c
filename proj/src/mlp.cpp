#include "chiplet/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace chiplet {

Mlp::Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw std::invalid_argument("an MLP needs at least two layer sizes");
  Eigen::Index off = 0;
  for (int l = 0; l < num_layers(); ++l) {
    if (sizes_[l] < 1 || sizes_[l + 1] < 1) throw std::invalid_argument("layer sizes must be >= 1");
    w_off_.push_back(off);
    off += static_cast<Eigen::Index>(sizes_[l]) * sizes_[l + 1];
    b_off_.push_back(off);
    off += sizes_[l + 1];
  }
  params_ = Vector::Zero(off);
}

Eigen::Map<const Mlp::Matrix> Mlp::weight(int l) const {
  return {params_.data() + w_off_[l], sizes_[l + 1], sizes_[l]};
}

Eigen::Map<const Mlp::Vector> Mlp::bias(int l) const {
  return {params_.data() + b_off_[l], sizes_[l + 1]};
}

void Mlp::init_orthogonal(Rng& rng, double hidden_gain, double out_gain) {
  for (int l = 0; l < num_layers(); ++l) {
    const int rows = sizes_[l + 1], cols = sizes_[l];
    const bool tall = rows >= cols;
    const int r = tall ? rows : cols, c = tall ? cols : rows;
    Matrix a(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) a(i, j) = rng.normal();
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ() * Matrix::Identity(r, c);
    const Matrix rr = qr.matrixQR().topLeftCorner(c, c).triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < c; ++j)
      if (rr(j, j) < 0) q.col(j) *= -1.0;
    const double gain = l + 1 == num_layers() ? out_gain : hidden_gain;
    Eigen::Map<Matrix> w(params_.data() + w_off_[l], rows, cols);
    w = gain * (tall ? q : Matrix(q.transpose()));
    Eigen::Map<Vector>(params_.data() + b_off_[l], rows).setZero();
  }
}

Mlp::Matrix Mlp::forward(const Matrix& x, Cache* cache) const {
  if (x.rows() != input_dim()) throw std::invalid_argument("MLP input has wrong width");
  Matrix h = x;
  if (cache) {
    cache->acts.clear();
    cache->acts.push_back(h);
  }
  for (int l = 0; l < num_layers(); ++l) {
    Matrix z = weight(l) * h;
    z.colwise() += bias(l);
    if (l + 1 < num_layers()) z = z.array().tanh().matrix();
    h = std::move(z);
    if (cache && l + 1 < num_layers()) cache->acts.push_back(h);
  }
  return h;
}

void Mlp::backward(const Cache& cache, const Matrix& d_out, Vector& grad) const {
  if (grad.size() != num_params()) grad = Vector::Zero(num_params());
  Matrix delta = d_out;
  for (int l = num_layers() - 1; l >= 0; --l) {
    const Matrix& in = cache.acts[l];
    Eigen::Map<Matrix>(grad.data() + w_off_[l], sizes_[l + 1], sizes_[l]).noalias() +=
        delta * in.transpose();
    Eigen::Map<Vector>(grad.data() + b_off_[l], sizes_[l + 1]) += delta.rowwise().sum();
    if (l == 0) break;
    Matrix back = weight(l).transpose() * delta;
    delta = back.array() * (1.0 - in.array().square());
  }
}

nlohmann::json Mlp::to_json() const {
  nlohmann::json layers = nlohmann::json::array();
  for (int l = 0; l < num_layers(); ++l) {
    const auto w = weight(l);
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      std::vector<double> row(static_cast<std::size_t>(w.cols()));
      for (Eigen::Index j = 0; j < w.cols(); ++j) row[static_cast<std::size_t>(j)] = w(i, j);
      rows.push_back(std::move(row));
    }
    const auto b = bias(l);
    layers.push_back({{"weight", std::move(rows)}, {"bias", std::vector<double>(b.begin(), b.end())}});
  }
  return {{"sizes", sizes_}, {"layers", std::move(layers)}};
}

Mlp Mlp::from_json(const nlohmann::json& j) {
  Mlp m(j.at("sizes").get<std::vector<int>>());
  const auto& layers = j.at("layers");
  if (!layers.is_array() || static_cast<int>(layers.size()) != m.num_layers())
    throw std::invalid_argument("layer count does not match layer sizes");
  auto take = [](double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite parameter");
    return v;
  };
  for (int l = 0; l < m.num_layers(); ++l) {
    const auto rows = layers[static_cast<std::size_t>(l)].at("weight").get<std::vector<std::vector<double>>>();
    const auto b = layers[static_cast<std::size_t>(l)].at("bias").get<std::vector<double>>();
    const int out = m.sizes_[l + 1], in = m.sizes_[l];
    if (static_cast<int>(rows.size()) != out || static_cast<int>(b.size()) != out)
      throw std::invalid_argument("layer " + std::to_string(l) + " has the wrong output width");
    Eigen::Map<Matrix> w(m.params_.data() + m.w_off_[l], out, in);
    for (int i = 0; i < out; ++i) {
      if (static_cast<int>(rows[i].size()) != in)
        throw std::invalid_argument("layer " + std::to_string(l) + " has the wrong input width");
      for (int c = 0; c < in; ++c) w(i, c) = take(rows[i][c]);
      m.params_[m.b_off_[l] + i] = take(b[i]);
    }
  }
  return m;
}

Adam::Adam(Eigen::Index n, double lr, double beta1, double beta2, double eps)
    : lr_(lr), b1_(beta1), b2_(beta2), eps_(eps), m_(Eigen::VectorXd::Zero(n)),
      v_(Eigen::VectorXd::Zero(n)) {}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  ++t_;
  m_ = b1_ * m_ + (1 - b1_) * grad;
  v_ = b2_ * v_ + (1 - b2_) * grad.cwiseProduct(grad);
  const double c1 = 1 - std::pow(b1_, static_cast<double>(t_));
  const double c2 = 1 - std::pow(b2_, static_cast<double>(t_));
  params.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
}

}  // namespace chiplet
