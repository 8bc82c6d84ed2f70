#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "envtrace/rational.hpp"

namespace envtrace {

// Semi-supervised node classification (or regression) instance for the
// distance-kernel graph network. The adjacency is built from the hyper-
// parameter: A_ij = (delta(i,j) + alpha)^kernel_degree, self-loops added,
// then row-normalized. Weights are W0 (dfeat x d0) and W1 (d0 x F).
struct GcnInstance {
  int n = 0;
  int dfeat = 1;
  int d0 = 1;
  int F = 2;
  int kernel_degree = 1;
  Eigen::MatrixXd X;      // n x dfeat features
  Eigen::MatrixXd delta;  // n x n symmetric nonnegative distances
  std::vector<int> labeled;   // labeled vertex indices
  std::vector<int> labels;    // class per labeled vertex, in [0, F)
  std::vector<double> targets;  // regression targets per labeled vertex
  double weight_lo = -1.0;
  double weight_hi = 1.0;

  int num_labeled() const { return static_cast<int>(labeled.size()); }
  int num_weights() const { return dfeat * d0 + d0 * F; }
};

void validate_gcn_instance(const GcnInstance& inst, bool regression = false);

// Row-stochastic propagation matrix at alpha > 0.
Eigen::MatrixXd gcn_adjacency(const GcnInstance& inst, double alpha);

// Z = A_hat * relu(A_hat * X * W0) * W1  (n x F scores).
Eigen::MatrixXd gcn_forward(const GcnInstance& inst, double alpha,
                            const Eigen::MatrixXd& W0,
                            const Eigen::MatrixXd& W1);

// Fraction of labeled vertices whose argmax score (ties toward the lowest
// class index) disagrees with the label.
double gcn_classification_loss(const GcnInstance& inst, double alpha,
                               const Eigen::MatrixXd& W0,
                               const Eigen::MatrixXd& W1);

// Mean squared error over labeled vertices; W1 must have one column.
double gcn_regression_loss(const GcnInstance& inst, double alpha,
                           const Eigen::MatrixXd& W0,
                           const Eigen::MatrixXd& W1);

struct GcnDualConfig {
  int grid_points = 41;  // per-weight grid resolution for the exhaustive path
  int multistarts = 64;  // fallback budget when the grid would be too large
  std::uint64_t seed = 0x67636eULL;
};

struct GcnDualResult {
  double loss = 0.0;
  std::string method;  // "grid-exhaustive" or "multistart"
};

// min over weights of the classification loss; exhaustive over the weight
// grid when dfeat == d0 == 1 (grid size grid_points^(1+F)), multistart
// otherwise. Always an upper estimate of the true minimum.
GcnDualResult gcn_dual_loss(const GcnInstance& inst, double alpha,
                            const GcnDualConfig& cfg = {});

// Dual loss over an alpha grid; parallel and serial twins agree exactly.
std::vector<double> gcn_dual_sweep(const GcnInstance& inst,
                                   const std::vector<double>& alphas,
                                   const GcnDualConfig& cfg = {});
std::vector<double> gcn_dual_sweep_serial(const GcnInstance& inst,
                                          const std::vector<double>& alphas,
                                          const GcnDualConfig& cfg = {});

// Piece-count ceiling for the alpha-sweep of the dual loss, evaluated with
// unit constants: (n F^2 (2D+6) / (1+W))^(1+W) * (D+1)^(n d0) with W the
// weight count and D the kernel degree.
double gcn_component_bound(const GcnInstance& inst);

// Deterministic tiny-instance generator (n in [2,4], scalar features,
// two classes, a random nonempty prefix of vertices labeled).
GcnInstance gen_gcn_instance(std::uint64_t seed);

GcnInstance load_gcn_instance(const std::string& json_text);
std::string gcn_instance_json(const GcnInstance& inst);

}  // namespace envtrace
