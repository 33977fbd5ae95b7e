#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ncvx {

/// One line of the oracle self-test: the worst value of `check` over
/// `cases` random draws for one penalty family, against `tolerance`.
struct SelftestRow {
  std::string check;
  std::string family;
  int cases = 0;
  double worst = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Compares the prox operators with the brute-force oracles on random draws:
/// scalar objective gap (grid step 1e-4), group-prox collinearity and
/// objective gap, and diagonal singular-value shrinkage.
std::vector<SelftestRow> run_oracle_suite(std::uint64_t seed, int draws = 200);

void write_selftest_csv(std::ostream& out, const std::vector<SelftestRow>& rows);

}  // namespace ncvx
