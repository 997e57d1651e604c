#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "chiplet/design_space.hpp"

namespace chiplet {

// A box of the design space seen by the optimizers: some parameters are free
// (each with its list of admissible full-space indices), the rest are pinned to
// `base`. Local actions index into the free dimensions only.
class SearchSpace {
 public:
  // Every parameter free; n_chiplets truncated to `n_chiplets_max`.
  static SearchSpace full(int n_chiplets_max = 128);

  // {"base": <design point>, "free": {"<param>": [values...] | {"min": a, "max": b}}}
  // Missing base defaults to the case (i) reference point.
  static SearchSpace from_json(const nlohmann::json& j);

  SearchSpace(ActionVector base, std::vector<int> free_params,
              std::vector<std::vector<int>> choices);

  const ActionVector& base() const { return base_; }
  const std::vector<int>& free_params() const { return free_params_; }
  const std::vector<std::vector<int>>& choices() const { return choices_; }

  int num_dims() const { return static_cast<int>(free_params_.size()); }
  std::vector<int> dims() const;
  int dims_sum() const;
  // Number of points, saturating at UINT64_MAX.
  std::uint64_t size() const;

  ActionVector expand(std::span<const int> local) const;
  // Mixed-radix decode of a linear index into a local action (last dim fastest).
  std::vector<int> unrank(std::uint64_t index) const;

 private:
  ActionVector base_{};
  std::vector<int> free_params_;
  std::vector<std::vector<int>> choices_;
};

}  // namespace chiplet
