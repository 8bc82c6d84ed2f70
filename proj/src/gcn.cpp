#include "envtrace/gcn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "envtrace/error.hpp"
#include "envtrace/random.hpp"

#include "json.hpp"

namespace envtrace {

namespace {

int argmax_lowest(const Eigen::MatrixXd& Z, int row) {
  int best = 0;
  for (int c = 1; c < Z.cols(); ++c)
    if (Z(row, c) > Z(row, best)) best = c;
  return best;
}

double grid_value(double lo, double hi, int t, int pts) {
  return lo + (hi - lo) * t / (pts - 1);
}

}  // namespace

void validate_gcn_instance(const GcnInstance& inst, bool regression) {
  if (inst.n < 1) fail_input("gcn instance: needs at least one vertex");
  if (inst.dfeat < 1 || inst.d0 < 1 || inst.F < 1)
    fail_input("gcn instance: widths must be positive");
  if (inst.kernel_degree < 1)
    fail_input("gcn instance: kernel degree must be positive");
  if (inst.X.rows() != inst.n || inst.X.cols() != inst.dfeat)
    fail_input("gcn instance: feature matrix shape mismatch");
  if (inst.delta.rows() != inst.n || inst.delta.cols() != inst.n)
    fail_input("gcn instance: distance matrix shape mismatch");
  for (int i = 0; i < inst.n; ++i)
    for (int j = 0; j < inst.n; ++j) {
      if (inst.delta(i, j) < 0.0)
        fail_input("gcn instance: distances must be nonnegative");
      if (std::fabs(inst.delta(i, j) - inst.delta(j, i)) > 0.0)
        fail_input("gcn instance: distance matrix must be symmetric");
    }
  if (inst.labeled.empty()) fail_input("gcn instance: needs labeled vertices");
  for (int v : inst.labeled)
    if (v < 0 || v >= inst.n) fail_input("gcn instance: labeled index range");
  if (regression) {
    if (inst.targets.size() != inst.labeled.size())
      fail_input("gcn instance: one target per labeled vertex");
  } else {
    if (inst.labels.size() != inst.labeled.size())
      fail_input("gcn instance: one label per labeled vertex");
    for (int y : inst.labels)
      if (y < 0 || y >= inst.F) fail_input("gcn instance: label out of range");
  }
  if (!(inst.weight_lo < inst.weight_hi))
    fail_input("gcn instance: empty weight box");
}

Eigen::MatrixXd gcn_adjacency(const GcnInstance& inst, double alpha) {
  if (!(alpha > 0.0)) fail_input("gcn adjacency: alpha must be positive");
  Eigen::MatrixXd A(inst.n, inst.n);
  for (int i = 0; i < inst.n; ++i)
    for (int j = 0; j < inst.n; ++j)
      A(i, j) = std::pow(inst.delta(i, j) + alpha, inst.kernel_degree);
  A += Eigen::MatrixXd::Identity(inst.n, inst.n);
  for (int i = 0; i < inst.n; ++i) {
    double rowsum = A.row(i).sum();
    if (!(rowsum > 0.0)) fail_numeric("gcn adjacency: zero row sum");
    A.row(i) /= rowsum;
  }
  return A;
}

Eigen::MatrixXd gcn_forward(const GcnInstance& inst, double alpha,
                            const Eigen::MatrixXd& W0,
                            const Eigen::MatrixXd& W1) {
  if (W0.rows() != inst.dfeat || W0.cols() != inst.d0)
    fail_input("gcn forward: W0 shape mismatch");
  if (W1.rows() != inst.d0)
    fail_input("gcn forward: W1 shape mismatch");
  Eigen::MatrixXd Ahat = gcn_adjacency(inst, alpha);
  Eigen::MatrixXd H = (Ahat * inst.X * W0).cwiseMax(0.0);
  return Ahat * H * W1;
}

double gcn_classification_loss(const GcnInstance& inst, double alpha,
                               const Eigen::MatrixXd& W0,
                               const Eigen::MatrixXd& W1) {
  if (W1.cols() != inst.F) fail_input("gcn loss: W1 needs F columns");
  Eigen::MatrixXd Z = gcn_forward(inst, alpha, W0, W1);
  int wrong = 0;
  for (size_t k = 0; k < inst.labeled.size(); ++k)
    if (argmax_lowest(Z, inst.labeled[k]) != inst.labels[k]) ++wrong;
  return static_cast<double>(wrong) / static_cast<double>(inst.labeled.size());
}

double gcn_regression_loss(const GcnInstance& inst, double alpha,
                           const Eigen::MatrixXd& W0,
                           const Eigen::MatrixXd& W1) {
  if (W1.cols() != 1) fail_input("gcn regression: W1 needs one column");
  Eigen::MatrixXd Z = gcn_forward(inst, alpha, W0, W1);
  double total = 0.0;
  for (size_t k = 0; k < inst.labeled.size(); ++k) {
    double e = Z(inst.labeled[k], 0) - inst.targets[k];
    total += e * e;
  }
  return total / static_cast<double>(inst.labeled.size());
}

GcnDualResult gcn_dual_loss(const GcnInstance& inst, double alpha,
                            const GcnDualConfig& cfg) {
  validate_gcn_instance(inst);
  GcnDualResult out;
  const int L = inst.num_labeled();
  const int pts = std::max(3, cfg.grid_points);

  if (inst.dfeat == 1 && inst.d0 == 1 && inst.F >= 2 && pts >= 3) {
    // Exhaustive weight grid, factored exactly. The hidden activation
    // depends only on the scalar W0, giving one propagated vector u per W0
    // grid value. A labeled vertex's prediction then depends only on which
    // class carries the largest (u_i > 0) or smallest (u_i < 0) W1 entry,
    // ties toward the lowest index, so the minimum over the whole W1 grid
    // equals the minimum over the prediction patterns the grid realizes:
    // (amax, amin) for every ordered pair of distinct classes, plus the
    // all-equal pattern predicting class 0. Same result as enumerating
    // grid_points^F W1 columns, without the enumeration.
    out.method = "grid-exhaustive";
    Eigen::MatrixXd Ahat = gcn_adjacency(inst, alpha);
    Eigen::VectorXd v = Ahat * inst.X;  // n x 1
    int best_wrong = L + 1;
    for (int t0 = 0; t0 < pts && best_wrong > 0; ++t0) {
      double w0 = grid_value(inst.weight_lo, inst.weight_hi, t0, pts);
      Eigen::VectorXd u = Ahat * (v * w0).cwiseMax(0.0);
      for (int amax = 0; amax < inst.F && best_wrong > 0; ++amax) {
        for (int amin = 0; amin < inst.F; ++amin) {
          if ((amax == amin) != (amax == 0 && amin == 0)) continue;
          int wrong = 0;
          for (int k = 0; k < L; ++k) {
            double ui = u(inst.labeled[static_cast<size_t>(k)]);
            int pred = ui > 0.0 ? amax : ui < 0.0 ? amin : 0;
            if (pred != inst.labels[static_cast<size_t>(k)]) ++wrong;
          }
          best_wrong = std::min(best_wrong, wrong);
          if (best_wrong == 0) break;
        }
      }
    }
    out.loss = static_cast<double>(best_wrong) / static_cast<double>(L);
    return out;
  }

  // Multistart random search with local descent over the weight vector.
  out.method = "multistart";
  Rng rng(Rng::mix(cfg.seed, static_cast<std::uint64_t>(alpha * 1e9)));
  const int W = inst.num_weights();
  auto unpack = [&](const std::vector<double>& w, Eigen::MatrixXd* W0,
                    Eigen::MatrixXd* W1) {
    int idx = 0;
    W0->resize(inst.dfeat, inst.d0);
    for (int i = 0; i < inst.dfeat; ++i)
      for (int j = 0; j < inst.d0; ++j)
        (*W0)(i, j) = w[static_cast<size_t>(idx++)];
    W1->resize(inst.d0, inst.F);
    for (int i = 0; i < inst.d0; ++i)
      for (int j = 0; j < inst.F; ++j)
        (*W1)(i, j) = w[static_cast<size_t>(idx++)];
  };
  double best = 1.0;
  Eigen::MatrixXd W0, W1;
  for (int s = 0; s < cfg.multistarts && best > 0.0; ++s) {
    std::vector<double> w(static_cast<size_t>(W));
    for (double& x : w) x = rng.next_range(inst.weight_lo, inst.weight_hi);
    unpack(w, &W0, &W1);
    double cur = gcn_classification_loss(inst, alpha, W0, W1);
    // coordinate descent on the discrete loss
    bool improved = true;
    while (improved && cur > 0.0) {
      improved = false;
      for (int i = 0; i < W; ++i) {
        double save = w[static_cast<size_t>(i)];
        for (int t = 0; t < 9; ++t) {
          w[static_cast<size_t>(i)] =
              grid_value(inst.weight_lo, inst.weight_hi, t, 9);
          unpack(w, &W0, &W1);
          double trial = gcn_classification_loss(inst, alpha, W0, W1);
          if (trial < cur) {
            cur = trial;
            save = w[static_cast<size_t>(i)];
            improved = true;
          }
        }
        w[static_cast<size_t>(i)] = save;
      }
    }
    best = std::min(best, cur);
  }
  out.loss = best;
  return out;
}

namespace {

std::vector<double> dual_sweep_impl(const GcnInstance& inst,
                                    const std::vector<double>& alphas,
                                    const GcnDualConfig& cfg, bool parallel) {
  std::vector<double> out(alphas.size());
  const long n = static_cast<long>(alphas.size());
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (long k = 0; k < n; ++k)
      out[static_cast<size_t>(k)] =
          gcn_dual_loss(inst, alphas[static_cast<size_t>(k)], cfg).loss;
  } else {
    for (long k = 0; k < n; ++k)
      out[static_cast<size_t>(k)] =
          gcn_dual_loss(inst, alphas[static_cast<size_t>(k)], cfg).loss;
  }
  return out;
}

}  // namespace

std::vector<double> gcn_dual_sweep(const GcnInstance& inst,
                                   const std::vector<double>& alphas,
                                   const GcnDualConfig& cfg) {
  return dual_sweep_impl(inst, alphas, cfg, true);
}

std::vector<double> gcn_dual_sweep_serial(const GcnInstance& inst,
                                          const std::vector<double>& alphas,
                                          const GcnDualConfig& cfg) {
  return dual_sweep_impl(inst, alphas, cfg, false);
}

double gcn_component_bound(const GcnInstance& inst) {
  const double W = inst.num_weights();
  const double D = inst.kernel_degree;
  double base =
      inst.n * inst.F * inst.F * (2.0 * D + 6.0) / (1.0 + W);
  return std::pow(base, 1.0 + W) *
         std::pow(D + 1.0, static_cast<double>(inst.n) * inst.d0);
}

GcnInstance gen_gcn_instance(std::uint64_t seed) {
  Rng rng(Rng::mix(seed, 0x6763ULL));
  GcnInstance inst;
  inst.n = rng.next_int(2, 4);
  inst.dfeat = 1;
  inst.d0 = 1;
  inst.F = 2;
  inst.kernel_degree = rng.next_int(1, 3);
  inst.X.resize(inst.n, 1);
  for (int i = 0; i < inst.n; ++i) {
    double mag = rng.next_range(0.2, 1.5);
    inst.X(i, 0) = rng.next_u01() < 0.5 ? -mag : mag;
  }
  inst.delta = Eigen::MatrixXd::Zero(inst.n, inst.n);
  for (int i = 0; i < inst.n; ++i)
    for (int j = i + 1; j < inst.n; ++j)
      inst.delta(i, j) = inst.delta(j, i) = rng.next_range(0.0, 2.0);
  const int num_labeled = rng.next_int(1, inst.n);
  for (int i = 0; i < num_labeled; ++i) {
    inst.labeled.push_back(i);
    inst.labels.push_back(rng.next_int(0, 1));
  }
  validate_gcn_instance(inst);
  return inst;
}

GcnInstance load_gcn_instance(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    fail_input(std::string("gcn instance: parse error: ") + e.what());
  }
  GcnInstance inst;
  try {
    inst.n = j.at("n").get<int>();
    inst.dfeat = j.value("dfeat", 1);
    inst.d0 = j.value("d0", 1);
    inst.F = j.value("F", 2);
    inst.kernel_degree = j.value("kernel_degree", 1);
    inst.X.resize(inst.n, inst.dfeat);
    const auto& X = j.at("X");
    for (int i = 0; i < inst.n; ++i)
      for (int c = 0; c < inst.dfeat; ++c)
        inst.X(i, c) = X.at(static_cast<size_t>(i))
                           .at(static_cast<size_t>(c))
                           .get<double>();
    inst.delta.resize(inst.n, inst.n);
    const auto& D = j.at("delta");
    for (int i = 0; i < inst.n; ++i)
      for (int c = 0; c < inst.n; ++c)
        inst.delta(i, c) = D.at(static_cast<size_t>(i))
                               .at(static_cast<size_t>(c))
                               .get<double>();
    inst.labeled = j.at("labeled").get<std::vector<int>>();
    if (j.contains("labels"))
      inst.labels = j.at("labels").get<std::vector<int>>();
    if (j.contains("targets"))
      inst.targets = j.at("targets").get<std::vector<double>>();
    inst.weight_lo = j.value("weight_lo", -1.0);
    inst.weight_hi = j.value("weight_hi", 1.0);
  } catch (const nlohmann::json::exception& e) {
    fail_input(std::string("gcn instance: bad field: ") + e.what());
  }
  validate_gcn_instance(inst, inst.labels.empty());
  return inst;
}

std::string gcn_instance_json(const GcnInstance& inst) {
  nlohmann::json j;
  j["n"] = inst.n;
  j["dfeat"] = inst.dfeat;
  j["d0"] = inst.d0;
  j["F"] = inst.F;
  j["kernel_degree"] = inst.kernel_degree;
  j["X"] = nlohmann::json::array();
  for (int i = 0; i < inst.n; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < inst.dfeat; ++c) row.push_back(inst.X(i, c));
    j["X"].push_back(row);
  }
  j["delta"] = nlohmann::json::array();
  for (int i = 0; i < inst.n; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < inst.n; ++c) row.push_back(inst.delta(i, c));
    j["delta"].push_back(row);
  }
  j["labeled"] = inst.labeled;
  if (!inst.labels.empty()) j["labels"] = inst.labels;
  if (!inst.targets.empty()) j["targets"] = inst.targets;
  j["weight_lo"] = inst.weight_lo;
  j["weight_hi"] = inst.weight_hi;
  return j.dump(2);
}

}  // namespace envtrace
