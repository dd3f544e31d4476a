#pragma once

// Line-based run configuration:
//
//   [model]
//   name = spin-rotating-field
//   theta = 0.7853981633974483
//
//   [run]
//   T = 16,32,64,128,256,512,1024
//   K = 2048
//
//   [output]
//   path = sweep.csv
//   format = csv
//
// '#' starts a comment. Unknown sections or keys are hard errors carrying
// the offending line number; model parameters are validated against the
// catalog entry of the named model.

#include <map>
#include <string>
#include <vector>

#include "adlab/numerics.hpp"

namespace adlab::cli {

struct RunConfig {
  // [model]
  std::string model_name;
  std::map<std::string, double> model_scalars;
  std::map<std::string, std::vector<double>> model_lists;

  // [run]
  std::vector<double> T_values = {16, 32, 64, 128, 256, 512, 1024};
  long steps = 0;        // 0 = automatic step rule
  int level = 0;
  char picture = 'a';    // 'a' = original system, 'b' = its dual
  int grid_size = 2048;  // eigenpath grid ("K")
  int sample_count = 513;
  std::string mode = "self-consistent";  // or "frozen"

  // [output]
  std::string out_path;  // empty = stdout
  std::string format = "csv";
};

RunConfig parse_config(const std::string& text);

}  // namespace adlab::cli
