#pragma once

#include <string>
#include <vector>

#include "neupde/grid_function.hpp"

namespace neupde {

struct PicardOptions {
  double tol = 1e-8;  // absolute tolerance on the weighted iterate distance
  int max_iter = 25;
};

struct PicardRecord {
  int k = 0;             // index of the distance d_k = ||u^{k+1} - u^k||
  double distance = 0.0;
  double distance_se = 0.0;  // propagated MC uncertainty (0 for FD)
  double ratio = 0.0;        // d_k / d_{k-1}, recorded for k >= 1
  double ratio_se = 0.0;
};

struct PicardResult {
  GridFunction u;
  std::vector<PicardRecord> history;
  bool converged = false;
  bool divergence_alarm = false;
  int iterations = 0;
};

}  // namespace neupde
