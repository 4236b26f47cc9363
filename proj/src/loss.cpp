#include "stixelforge/loss.hpp"

#include <algorithm>
#include <cmath>

namespace stixelforge::loss {
namespace {

void require_same_shape(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    raise(Errc::DimensionMismatch, "matrix shapes differ: " + std::to_string(a.rows()) + "x" +
                                       std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                                       std::to_string(b.cols()));
  }
}

void require_finite(const Matrix& m) {
  if (!m.allFinite()) raise(Errc::NonFiniteInput, "matrix contains NaN or Inf");
}

}  // namespace

void LossWeights::validate() const {
  for (double v : {alpha, beta, gamma}) {
    if (!std::isfinite(v) || v < 0.0) raise(Errc::InvalidArgument, "loss weights must be finite and >= 0");
  }
}

Matrix clamp_probabilities(const Matrix& m) { return m.cwiseMax(kEpsClamp).cwiseMin(1.0 - kEpsClamp); }

PredictionPair::PredictionPair(Matrix occ, Matrix cut, Matrix target_occ, Matrix target_cut)
    : target_occ_(std::move(target_occ)), target_cut_(std::move(target_cut)) {
  require_same_shape(occ, target_occ_);
  require_same_shape(cut, target_cut_);
  require_same_shape(occ, cut);
  require_finite(occ);
  require_finite(cut);
  occ_ = clamp_probabilities(occ);
  cut_ = clamp_probabilities(cut);
}

PredictionPair::PredictionPair(Matrix occ, Matrix cut, const TargetGrid& targets)
    : PredictionPair(std::move(occ), std::move(cut), targets.occ.cast<double>(), targets.cut.cast<double>()) {}

double bce_loss(const Matrix& target, const Matrix& prediction) {
  require_same_shape(target, prediction);
  require_finite(prediction);
  if (prediction.size() == 0) raise(Errc::DimensionMismatch, "empty matrices");
  const Matrix yhat = clamp_probabilities(prediction);
  const auto y = target.array();
  const double sum = (y * yhat.array().log() + (1.0 - y) * (1.0 - yhat.array()).log()).sum();
  return -sum / static_cast<double>(prediction.size());
}

double sum_loss(const Matrix& prediction) {
  require_finite(prediction);
  if (prediction.size() == 0) raise(Errc::DimensionMismatch, "empty matrix");
  return prediction.sum() / static_cast<double>(prediction.size());
}

double total_loss(const PredictionPair& pred, const LossWeights& w) {
  w.validate();
  return w.alpha * bce_loss(pred.target_occ(), pred.occ()) + w.beta * sum_loss(pred.occ()) +
         w.gamma * bce_loss(pred.target_cut(), pred.cut());
}

LossGradient loss_gradient(const PredictionPair& pred, const LossWeights& w) {
  w.validate();
  const double n = static_cast<double>(pred.occ().size());
  auto bce_grad = [n](const Matrix& y, const Matrix& yhat) -> Matrix {
    return (-(y.array() / yhat.array() - (1.0 - y.array()) / (1.0 - yhat.array())) / n).matrix();
  };
  LossGradient g;
  g.occ = w.alpha * bce_grad(pred.target_occ(), pred.occ());
  g.occ.array() += w.beta / n;
  g.cut = w.gamma * bce_grad(pred.target_cut(), pred.cut());
  return g;
}

GradientCheck check_gradient(const PredictionPair& pred, const LossWeights& w, double step) {
  const auto analytic = loss_gradient(pred, w);
  GradientCheck out;
  auto probe = [&](bool occ_channel, Eigen::Index r, Eigen::Index c, double analytic_value) {
    Matrix occ = pred.occ();
    Matrix cut = pred.cut();
    Matrix& m = occ_channel ? occ : cut;
    const double x = m(r, c);
    m(r, c) = x + step;
    const double up = total_loss(PredictionPair(occ, cut, pred.target_occ(), pred.target_cut()), w);
    m(r, c) = x - step;
    const double down = total_loss(PredictionPair(occ, cut, pred.target_occ(), pred.target_cut()), w);
    const double fd = (up - down) / (2.0 * step);
    const double abs_err = std::abs(fd - analytic_value);
    const double denom = std::max({std::abs(fd), std::abs(analytic_value), 1e-12});
    out.max_absolute_error = std::max(out.max_absolute_error, abs_err);
    out.max_relative_error = std::max(out.max_relative_error, abs_err / denom);
  };
  for (Eigen::Index r = 0; r < pred.occ().rows(); ++r) {
    for (Eigen::Index c = 0; c < pred.occ().cols(); ++c) {
      probe(true, r, c, analytic.occ(r, c));
      probe(false, r, c, analytic.cut(r, c));
    }
  }
  return out;
}

}  // namespace stixelforge::loss
