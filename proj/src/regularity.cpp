#include "envtrace/regularity.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "envtrace/error.hpp"
#include "envtrace/fasteval.hpp"

namespace envtrace {

namespace {

// One active constraint: gradient and Hessian (in w) at the point. Box faces
// are affine, so their Hessian term vanishes.
struct ActiveConstraint {
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

}  // namespace

RegularityReport check_regularity(const Landscape& l,
                                  const std::vector<StationarityPoint>& pts,
                                  double threshold) {
  RegularityReport rep;
  const int d = l.d();
  CompiledLandscape cl = CompiledLandscape::compile(l);

  for (const StationarityPoint& sp : pts) {
    if (static_cast<int>(sp.w.size()) != d)
      fail_input("check_regularity: point dimension does not match domain");
    std::vector<double> x(static_cast<size_t>(d) + 1);
    x[0] = sp.alpha;
    std::copy(sp.w.begin(), sp.w.end(), x.begin() + 1);

    int region = sp.region >= 0 ? sp.region : cl.region_of(x);
    if (region < 0 || region >= l.num_regions())
      fail_input("check_regularity: point lies in no region");
    const Polynomial& f = l.regions[static_cast<size_t>(region)].piece;

    std::vector<ActiveConstraint> act;
    for (int j : sp.active_boundaries) {
      if (j < 0 || j >= l.num_boundaries())
        fail_input("check_regularity: active boundary index out of range");
      const Polynomial& h = l.boundaries[static_cast<size_t>(j)];
      ActiveConstraint c;
      c.grad = Eigen::VectorXd(d);
      c.hess = Eigen::MatrixXd::Zero(d, d);
      for (int z = 0; z < d; ++z) {
        Polynomial hz = h.partial(z + 1);
        c.grad(z) = hz.eval(x);
        for (int y = z; y < d; ++y) {
          double v = hz.partial(y + 1).eval(x);
          c.hess(z, y) = v;
          c.hess(y, z) = v;
        }
      }
      act.push_back(std::move(c));
    }
    for (int z : sp.active_edges) {
      if (z < 0 || z >= d)
        fail_input("check_regularity: active edge axis out of range");
      ActiveConstraint c;
      c.grad = Eigen::VectorXd::Zero(d);
      c.grad(z) = 1.0;
      c.hess = Eigen::MatrixXd::Zero(d, d);
      act.push_back(std::move(c));
    }
    const int m = static_cast<int>(act.size());

    Eigen::VectorXd g(d);
    Eigen::MatrixXd hf(d, d);
    for (int z = 0; z < d; ++z) {
      Polynomial fz = f.partial(z + 1);
      g(z) = fz.eval(x);
      for (int y = z; y < d; ++y) {
        double v = fz.partial(y + 1).eval(x);
        hf(z, y) = v;
        hf(y, z) = v;
      }
    }

    // Multipliers from the first-order condition, least squares when the
    // constraint gradients are rank-deficient (that is what we are probing).
    Eigen::VectorXd lam = Eigen::VectorXd::Zero(std::max(m, 1));
    Eigen::MatrixXd G(d, std::max(m, 1));
    G.setZero();
    for (int j = 0; j < m; ++j) G.col(j) = act[static_cast<size_t>(j)].grad;
    if (m > 0) {
      lam = G.leftCols(m)
                .jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV)
                .solve(-g);
    }

    // Jacobian of [grad_w f + sum lam_j grad_w h_j ; h_j] in (w, lambda):
    //   [ H  G ]
    //   [ G' 0 ]
    // with H the Hessian of the Lagrangian.
    Eigen::MatrixXd H = hf;
    for (int j = 0; j < m; ++j)
      H += lam(j) * act[static_cast<size_t>(j)].hess;
    Eigen::MatrixXd J(d + m, d + m);
    J.setZero();
    J.topLeftCorner(d, d) = H;
    if (m > 0) {
      J.topRightCorner(d, m) = G.leftCols(m);
      J.bottomLeftCorner(m, d) = G.leftCols(m).transpose();
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
    const auto& sig = svd.singularValues();
    double smax = sig.size() > 0 ? sig(0) : 0.0;
    int rank = 0;
    double kept_min = 0.0;
    for (int i = 0; i < sig.size(); ++i) {
      if (sig(i) > threshold * std::max(smax, 1e-300)) {
        ++rank;
        kept_min = sig(i);
      }
    }

    RegularityPointReport pr;
    pr.point = sp;
    pr.required_rank = d + m;
    pr.rank = rank;
    pr.min_singular = rank == d + m ? kept_min : sig(sig.size() - 1);
    pr.deficient = rank < d + m;
    if (pr.deficient) rep.all_regular = false;
    rep.points.push_back(std::move(pr));
  }
  if (!rep.all_regular) rep.recommendation = "perturb_landscape(tau=1e-3)";
  return rep;
}

}  // namespace envtrace
