#include "ncvx/oracle.hpp"

#include <cmath>
#include <vector>

#include "ncvx/errors.hpp"

namespace ncvx::oracle {

namespace {

// Magnitude of a q-shrinkage output as a function of its input u >= lambda.
double shrink_forward(double u, double lambda, double q) {
  return u - std::pow(lambda, 2.0 - q) * std::pow(u, q - 1.0);
}

double implicit_from_u(double u, double lambda, double q) {
  const double c = std::pow(lambda, 2.0 - q);
  return c / q * (std::pow(u, q) - std::pow(lambda, q)) -
         0.5 * c * c * (std::pow(u, 2.0 * q - 2.0) - std::pow(lambda, 2.0 * q - 2.0));
}

// Solves shrink_forward(u) = x for u >= lambda. The map is increasing and
// concave with shrink_forward(lambda) = 0, so Newton steps from u = lambda
// increase monotonically onto the root.
double shrink_inverse(double x, double lambda, double q) {
  const double c = std::pow(lambda, 2.0 - q);
  double u = lambda;
  for (int i = 0; i < 100; ++i) {
    const double f = u - c * std::pow(u, q - 1.0) - x;
    const double step = -f / (1.0 + c * (1.0 - q) * std::pow(u, q - 2.0));
    if (!(step > 1e-16 * u)) break;
    u += step;
  }
  return u;
}

void check_step(double grid_step) {
  if (!(grid_step > 0.0)) throw InvalidArgument("grid_step must be positive");
}

}  // namespace

double penalty(const Penalty& p, double x) {
  if (p.has_value()) return penalty_value(p, x);
  const double ax = std::abs(x);
  if (ax == 0.0 || p.lambda() == 0.0) return 0.0;
  return implicit_from_u(shrink_inverse(ax, p.lambda(), p.q()), p.lambda(), p.q());
}

double prox_objective(const Penalty& p, double t, double x, double scale) {
  return scale * penalty(p, x) + 0.5 * (x - t) * (x - t);
}

double prox_oracle(const Penalty& p, double t, double grid_step, double scale) {
  check_step(grid_step);
  const double at = std::abs(t);
  const double sign = t < 0.0 ? -1.0 : 1.0;
  double best_x = 0.0;
  double best = prox_objective(p, t, 0.0, scale);
  auto consider = [&](double x) {
    const double f = prox_objective(p, t, x, scale);
    if (f < best) {
      best = f;
      best_x = x;
    }
  };
  // P is even, so a point with the sign opposite to t never beats its
  // mirror image; scanning [0, |t|] in increasing magnitude gives the same
  // argmin as the full symmetric grid, ties included.
  if (!p.has_value() && p.lambda() > 0.0 && scale == 1.0) {
    // Sweep the q-shrinkage penalty in its natural parameter u, whose image
    // has spacing at most 2 * (grid_step / 2).
    const double lambda = p.lambda();
    const double q = p.q();
    const double du = 0.5 * grid_step;
    for (long k = 1;; ++k) {
      const double u = lambda + static_cast<double>(k) * du;
      const double x = shrink_forward(u, lambda, q);
      if (x > at) break;
      const double f = implicit_from_u(u, lambda, q) + 0.5 * (x - at) * (x - at);
      if (f < best) {
        best = f;
        best_x = sign * x;
      }
    }
  } else {
    const long n = static_cast<long>(std::floor(at / grid_step));
    for (long k = 1; k <= n; ++k) consider(sign * static_cast<double>(k) * grid_step);
  }
  consider(t);
  return best_x;
}

double group_objective(const Penalty& p, const Eigen::Vector2d& t, const Eigen::Vector2d& x,
                       double scale) {
  return scale * penalty(p, x.norm()) + 0.5 * (x - t).squaredNorm();
}

Eigen::Vector2d group_prox_oracle(const Penalty& p, const Eigen::Vector2d& t, double grid_step,
                                  double scale) {
  check_step(grid_step);
  const double radius = t.norm();
  struct Candidate {
    Eigen::Vector2d x = Eigen::Vector2d::Zero();
    double f = 0.0;
  };
  auto better = [](const Candidate& a, const Candidate& b) {
    return a.f < b.f || (a.f == b.f && a.x.norm() < b.x.norm());
  };
  auto consider = [&](Candidate& best, const Eigen::Vector2d& x) {
    if (x.norm() > radius) return;
    const Candidate c{x, group_objective(p, t, x, scale)};
    if (better(c, best)) best = c;
  };
  Candidate zero{Eigen::Vector2d::Zero(), group_objective(p, t, Eigen::Vector2d::Zero(), scale)};
  if (radius == 0.0) return zero.x;

  constexpr int kCoarse = 100;
  const double h0 = std::max(grid_step, radius / kCoarse);
  std::vector<Candidate> coarse;
  for (int i = -kCoarse; i <= kCoarse; ++i) {
    for (int j = -kCoarse; j <= kCoarse; ++j) {
      const Eigen::Vector2d x(i * h0, j * h0);
      if (x.norm() <= radius) coarse.push_back({x, group_objective(p, t, x, scale)});
    }
  }
  coarse.push_back({t, group_objective(p, t, t, scale)});
  // Refine around the best coarse point and the best one away from it, so a
  // second basin (zero versus the shrunk point) is not lost.
  Candidate first = zero;
  for (const Candidate& c : coarse) {
    if (better(c, first)) first = c;
  }
  Candidate second = zero;
  for (const Candidate& c : coarse) {
    if ((c.x - first.x).norm() > 3.0 * h0 && better(c, second)) second = c;
  }

  auto refine = [&](Candidate best) {
    double h = h0;
    while (h > grid_step) {
      const Eigen::Vector2d center = best.x;
      const double next = std::max(grid_step, h / 5.0);
      const int reach = static_cast<int>(std::ceil(2.0 * h / next));
      for (int i = -reach; i <= reach; ++i) {
        for (int j = -reach; j <= reach; ++j) {
          consider(best, center + Eigen::Vector2d(i * next, j * next));
        }
      }
      h = next;
    }
    return best;
  };
  Candidate best = refine(first);
  const Candidate alt = refine(second);
  if (better(alt, best)) best = alt;
  if (better(zero, best)) best = zero;
  return best.x;
}

Eigen::VectorXd svt_oracle_diag(const Penalty& p, const Eigen::VectorXd& diag_entries,
                                double grid_step) {
  Eigen::VectorXd out(diag_entries.size());
  for (Eigen::Index i = 0; i < diag_entries.size(); ++i) {
    out(i) = prox_oracle(p, diag_entries(i), grid_step);
  }
  return out;
}

}  // namespace ncvx::oracle
