#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>

#include "ncvx/experiment.hpp"

namespace ncvx::detail {

// Solver output in a problem-agnostic shape; b is empty for one-block
// problems.
struct Estimate {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
};

struct CellResult {
  Estimate est;
  double metric = 0.0;
  int iterations = 0;
};

struct MetricInfo {
  std::string name;
  bool higher_is_better = true;
};

// One generated trial: ground truth, measurements and the data scale that
// turns a grid value into an absolute threshold.
class Instance {
 public:
  virtual ~Instance() = default;

  // p is the swept penalty at grid value `factor`; p2 the second-block
  // penalty. init == nullptr means zero. Throws NumericalError on divergence.
  virtual CellResult solve(const Penalty& p, const Penalty& p2, double factor,
                           const Estimate* init) const = 0;

  // Whether solve() honors init (cov does not, so its Soft path is not chained).
  virtual bool uses_init() const { return true; }

  virtual bool has_image() const { return false; }
  // Writes the reconstruction as PGM or PPM; returns the file extension.
  virtual std::string write_image(const Estimate&, std::ostream&) const { return {}; }
};

MetricInfo metric_info(const ExperimentConfig& cfg);

bool uses_snr(Problem p);
bool uses_sparsity(Problem p);

std::unique_ptr<Instance> make_instance(const ExperimentConfig& cfg, std::uint64_t seed,
                                        double snr_db, double sparsity);

}  // namespace ncvx::detail
