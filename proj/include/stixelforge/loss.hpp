#pragma once

#include "stixelforge/core.hpp"

namespace stixelforge::loss {

inline constexpr double kEpsClamp = 1e-7;

struct LossWeights {
  double alpha = 1.0;  // occupancy BCE
  double beta = 0.1;   // occupancy summation penalty
  double gamma = 1.0;  // cut BCE

  void validate() const;
};

/// Predictions ŷ (clamped into [eps, 1 - eps]) paired with their targets y.
class PredictionPair {
 public:
  PredictionPair(Matrix occ, Matrix cut, Matrix target_occ, Matrix target_cut);
  PredictionPair(Matrix occ, Matrix cut, const TargetGrid& targets);

  const Matrix& occ() const noexcept { return occ_; }
  const Matrix& cut() const noexcept { return cut_; }
  const Matrix& target_occ() const noexcept { return target_occ_; }
  const Matrix& target_cut() const noexcept { return target_cut_; }

 private:
  Matrix occ_, cut_, target_occ_, target_cut_;
};

Matrix clamp_probabilities(const Matrix& m);

/// Mean binary cross entropy, natural log: -(1/N) sum y log ŷ + (1-y) log(1-ŷ).
double bce_loss(const Matrix& target, const Matrix& prediction);

/// Mean prediction mass +(1/N) sum ŷ. The sign is positive so that minimising
/// the objective suppresses spurious activations.
double sum_loss(const Matrix& prediction);

/// alpha * BCE(occ) + beta * Sum(occ) + gamma * BCE(cut).
double total_loss(const PredictionPair& pred, const LossWeights& w);

struct LossGradient {
  Matrix occ;
  Matrix cut;
};

/// Analytic d total_loss / d ŷ for both channels.
LossGradient loss_gradient(const PredictionPair& pred, const LossWeights& w);

struct GradientCheck {
  double max_relative_error = 0.0;
  double max_absolute_error = 0.0;
};

/// Compares loss_gradient against central differences of total_loss.
GradientCheck check_gradient(const PredictionPair& pred, const LossWeights& w, double step = 1e-6);

}  // namespace stixelforge::loss
