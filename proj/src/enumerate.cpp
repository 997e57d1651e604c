#include "chiplet/enumerate.hpp"

#include <algorithm>

#include "chiplet/ppac_model.hpp"

namespace chiplet {

namespace {

void guard(const SearchSpace& space, std::uint64_t limit) {
  if (space.size() > limit)
    throw SpaceTooLarge("restricted space has " + std::to_string(space.size()) +
                        " points; the limit is " + std::to_string(limit));
}

EnumEntry eval_at(const SearchSpace& space, const Calibration& cal, std::uint64_t i) {
  EnumEntry e;
  e.index = i;
  e.action = space.expand(space.unrank(i));
  const PpacResult r = evaluate(decode(e.action), cal);
  e.reward = r.reward;
  e.feasible = r.feasible;
  return e;
}

}  // namespace

std::vector<EnumEntry> enumerate_serial(const SearchSpace& space, const Calibration& cal,
                                        std::uint64_t limit) {
  guard(space, limit);
  std::vector<EnumEntry> out(space.size());
  for (std::uint64_t i = 0; i < out.size(); ++i) out[i] = eval_at(space, cal, i);
  return out;
}

std::vector<EnumEntry> enumerate_parallel(const SearchSpace& space, const Calibration& cal,
                                          std::uint64_t limit) {
  guard(space, limit);
  const auto n = static_cast<std::int64_t>(space.size());
  std::vector<EnumEntry> out(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = eval_at(space, cal, static_cast<std::uint64_t>(i));
  return out;
}

void rank_entries(std::vector<EnumEntry>& entries) {
  std::sort(entries.begin(), entries.end(), [](const EnumEntry& a, const EnumEntry& b) {
    if (a.reward != b.reward) return a.reward > b.reward;
    return a.index < b.index;
  });
}

void write_ranked_csv(std::ostream& os, const std::vector<EnumEntry>& ranked) {
  os << "rank,index,reward,feasible";
  for (const auto& p : param_specs()) os << ',' << p.name;
  os << '\n';
  const auto prec = os.precision(12);
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    const auto& e = ranked[r];
    os << r + 1 << ',' << e.index << ',' << e.reward << ',' << (e.feasible ? 1 : 0);
    for (int a : e.action) os << ',' << a;
    os << '\n';
  }
  os.precision(prec);
}

}  // namespace chiplet
