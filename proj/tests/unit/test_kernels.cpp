#include <doctest.h>

#include <cstring>
#include <vector>

#include "ncvx/kernels.hpp"
#include "ncvx/rng.hpp"

using namespace ncvx;
using namespace ncvx::kernels;

namespace {

bool bit_equal(std::span<const double> a, std::span<const double> b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("parallel gemv is bit-identical to the serial loop") {
  Rng rng(1);
  for (auto [rows, cols] : {std::pair{1, 1}, std::pair{37, 91}, std::pair{300, 257}}) {
    RowMatrix a(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) a(i, j) = rng.normal();
    std::vector<double> x(cols);
    for (double& v : x) v = rng.normal();
    std::vector<double> ys(rows), yp(rows);
    serial::gemv(a, x, ys);
    parallel::gemv(a, x, yp);
    CHECK(bit_equal(ys, yp));
    Eigen::VectorXd ref = a * Eigen::Map<Eigen::VectorXd>(x.data(), cols);
    for (int i = 0; i < rows; ++i) CHECK(ys[i] == doctest::Approx(ref(i)).epsilon(1e-12));
  }
}

TEST_CASE("parallel prox maps are bit-identical to the serial loop") {
  Rng rng(2);
  std::vector<double> in(5000);
  for (double& v : in) v = 3.0 * rng.normal();
  for (const Penalty& p : {Penalty::soft(0.7), Penalty::lq(0.7, 0.3), Penalty::scad(0.4),
                           Penalty::qshrink(0.9, 0.5)}) {
    std::vector<double> s(in.size()), q(in.size());
    serial::prox_map(p, 0.8, in, s);
    parallel::prox_map(p, 0.8, in, q);
    CHECK(bit_equal(s, q));
    CHECK(s[17] == prox_scalar(p, in[17], 0.8));
  }
  Eigen::MatrixXd t(800, 3);
  for (Eigen::Index j = 0; j < 3; ++j)
    for (Eigen::Index i = 0; i < 800; ++i) t(i, j) = rng.normal();
  Eigen::MatrixXd gs, gp;
  serial::group_prox_rows(Penalty::mcp(1.2), 0.5, t, gs);
  parallel::group_prox_rows(Penalty::mcp(1.2), 0.5, t, gp);
  CHECK(bit_equal({gs.data(), static_cast<std::size_t>(gs.size())},
                  {gp.data(), static_cast<std::size_t>(gp.size())}));
  CHECK(max_threads() >= 1);
}
