#pragma once

#include <cstdint>
#include <vector>

#include "eegdec/matrix.hpp"
#include "eegdec/rng.hpp"

namespace eegdec {

// L1-regularized binary logistic regression fitted by proximal gradient
// descent (ISTA) with backtracking line search. The soft-threshold step
// produces exact zeros, so nonzero_support needs no tolerance.
struct LogRegModel {
  std::vector<double> weights;  // original feature space, even when standardized
  double intercept = 0.0;
  double lambda = 0.0;
  int n_iter_run = 0;
  bool converged = false;
};

struct FitConfig {
  double lambda = 0.1;
  int max_iter = 2000;
  double tol = 1e-7;  // max absolute parameter change per unit step
  bool standardize = true;
  std::uint64_t rng_seed = 0;
  // Scale of the random initialization around zero. The default of exactly
  // zero keeps fits deterministic functions of (X, y, lambda); seeded decoding
  // protocols switch this on to make their seeds mean something.
  double init_jitter = 0.0;
};

// Minimizes (1/n) * sum_i log(1 + exp(-yt_i * (w.x_i + b))) + lambda*||w||_1
// with yt in {-1,+1} and the intercept unpenalized. With cfg.standardize the
// problem is solved on centered/unit-variance columns and the solution mapped
// back, which changes what the penalty measures (documented, default on).
LogRegModel fit(const Matrix& X, const std::vector<int>& y, const FitConfig& cfg,
                std::vector<double>* objective_trace = nullptr);

// sigma(X w + b), overflow-safe.
std::vector<double> predict_proba(const LogRegModel& model, const Matrix& X);

std::vector<bool> nonzero_support(const LogRegModel& model);

// Pieces exposed for direct testing.
double soft_threshold(double v, double t);
double sigmoid(double z);
double logreg_objective(const Matrix& X, const std::vector<int>& y,
                        const std::vector<double>& w, double b, double lambda);
void logreg_smooth_gradient(const Matrix& X, const std::vector<int>& y,
                            const std::vector<double>& w, double b,
                            std::vector<double>& grad_w, double& grad_b);

// Row indices achieving a balanced class mix: all original rows followed by
// uniformly-redrawn minority rows until both classes match the majority count.
std::vector<std::size_t> oversample_indices(const std::vector<int>& y, Rng& rng);

}  // namespace eegdec
