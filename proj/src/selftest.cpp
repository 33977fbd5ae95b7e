#include "ncvx/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "ncvx/format.hpp"
#include "ncvx/oracle.hpp"
#include "ncvx/proxext.hpp"
#include "ncvx/rng.hpp"

namespace ncvx {

namespace {

constexpr PenaltyFamily kFamilies[] = {PenaltyFamily::Soft, PenaltyFamily::Hard, PenaltyFamily::Lq,
                                       PenaltyFamily::QShrink, PenaltyFamily::Scad, PenaltyFamily::Mcp,
                                       PenaltyFamily::Firm};

Penalty draw_penalty(PenaltyFamily f, Rng& rng) {
  const double lambda = 0.05 + 1.95 * rng.uniform();
  const double q = 0.1 + 0.8 * rng.uniform();
  switch (f) {
    case PenaltyFamily::Soft: return Penalty::soft(lambda);
    case PenaltyFamily::Hard: return Penalty::hard(lambda);
    case PenaltyFamily::Lq: return Penalty::lq(lambda, q);
    case PenaltyFamily::QShrink: return Penalty::qshrink(lambda, q);
    case PenaltyFamily::Scad: return Penalty::scad(lambda);
    case PenaltyFamily::Mcp: return Penalty::mcp(lambda);
    case PenaltyFamily::Firm: return Penalty::firm(lambda);
  }
  return Penalty::soft(lambda);
}

double angle(const Eigen::Vector2d& x, const Eigen::Vector2d& t) {
  if (x.norm() == 0.0 || t.norm() == 0.0) return 0.0;
  return std::acos(std::clamp(x.dot(t) / (x.norm() * t.norm()), -1.0, 1.0));
}

}  // namespace

std::vector<SelftestRow> run_oracle_suite(std::uint64_t seed, int draws) {
  std::vector<SelftestRow> rows;
  std::uint64_t stream = 0;
  for (PenaltyFamily f : kFamilies) {
    const std::string name(family_name(f));
    Rng rng(seed, ++stream);

    SelftestRow scalar{"prox_objective_gap", name, draws, 0.0, 1e-8, false};
    for (int i = 0; i < draws; ++i) {
      const Penalty p = draw_penalty(f, rng);
      const double t = 12.0 * rng.uniform() - 6.0;
      const double gap = oracle::prox_objective(p, t, prox_scalar(p, t)) -
                         oracle::prox_objective(p, t, oracle::prox_oracle(p, t, 1e-4));
      scalar.worst = std::max(scalar.worst, gap);
    }

    const int group_draws = std::max(1, draws / 2);
    SelftestRow collinear{"group_angle_rad", name, group_draws, 0.0, 1e-3, false};
    SelftestRow group{"group_objective_gap", name, group_draws, 0.0, 1e-6, false};
    for (int i = 0; i < group_draws; ++i) {
      const Penalty p = draw_penalty(f, rng);
      const Eigen::Vector2d t(8.0 * rng.uniform() - 4.0, 8.0 * rng.uniform() - 4.0);
      const Eigen::Vector2d x = prox_group(p, t);
      collinear.worst = std::max(collinear.worst, angle(x, t));
      const double gap = oracle::group_objective(p, t, x) -
                         oracle::group_objective(p, t, oracle::group_prox_oracle(p, t, 1e-4));
      group.worst = std::max(group.worst, gap);
    }

    const int diag_draws = std::max(1, draws / 4);
    SelftestRow diag{"svt_diag_objective_gap", name, diag_draws, 0.0, 1e-8, false};
    for (int i = 0; i < diag_draws; ++i) {
      const Penalty p = draw_penalty(f, rng);
      Eigen::VectorXd d(4);
      for (Eigen::Index k = 0; k < d.size(); ++k) d(k) = 4.0 * rng.uniform();
      const Eigen::VectorXd shrunk = svt_generalized(p, Eigen::MatrixXd(d.asDiagonal())).diagonal();
      const Eigen::VectorXd ref = oracle::svt_oracle_diag(p, d);
      double gap = 0.0;
      for (Eigen::Index k = 0; k < d.size(); ++k) {
        gap += oracle::prox_objective(p, d(k), shrunk(k)) - oracle::prox_objective(p, d(k), ref(k));
      }
      diag.worst = std::max(diag.worst, gap);
    }

    for (SelftestRow* r : {&scalar, &collinear, &group, &diag}) {
      r->pass = r->worst <= r->tolerance;
      rows.push_back(*r);
    }
  }
  return rows;
}

void write_selftest_csv(std::ostream& out, const std::vector<SelftestRow>& rows) {
  out << "check,family,cases,worst,tolerance,pass\n";
  for (const SelftestRow& r : rows) {
    out << r.check << ',' << r.family << ',' << r.cases << ',' << format_double(r.worst) << ','
        << format_double(r.tolerance) << ',' << (r.pass ? "true" : "false") << '\n';
  }
}

}  // namespace ncvx
