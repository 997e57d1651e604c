#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "chiplet/calibration.hpp"
#include "chiplet/search_space.hpp"

namespace chiplet {

inline constexpr std::uint64_t kEnumerateLimit = 1'000'000;

class SpaceTooLarge : public std::length_error {
 public:
  using std::length_error::length_error;
};

struct EnumEntry {
  std::uint64_t index = 0;  // mixed-radix rank in the search space
  ActionVector action{};
  double reward = 0.0;
  bool feasible = false;
};

// Evaluates every point of `space`; entries come back in index order.
std::vector<EnumEntry> enumerate_serial(const SearchSpace& space, const Calibration& cal,
                                        std::uint64_t limit = kEnumerateLimit);
// Same result, OpenMP over indices.
std::vector<EnumEntry> enumerate_parallel(const SearchSpace& space, const Calibration& cal,
                                          std::uint64_t limit = kEnumerateLimit);

// Reward descending, index ascending.
void rank_entries(std::vector<EnumEntry>& entries);

// Header: rank,index,reward,feasible,<14 parameter names> (parameter indices).
void write_ranked_csv(std::ostream& os, const std::vector<EnumEntry>& ranked);

}  // namespace chiplet
