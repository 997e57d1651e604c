#include "chiplet/search_space.hpp"

#include <limits>
#include <numeric>
#include <stdexcept>

namespace chiplet {

SearchSpace::SearchSpace(ActionVector base, std::vector<int> free_params,
                         std::vector<std::vector<int>> choices)
    : base_(base), free_params_(std::move(free_params)), choices_(std::move(choices)) {
  if (free_params_.size() != choices_.size())
    throw std::invalid_argument("free parameter list and choice list differ in length");
  const auto cards = cardinalities();
  for (std::size_t d = 0; d < free_params_.size(); ++d) {
    const int p = free_params_[d];
    if (p < 0 || p >= kNumParams) throw std::invalid_argument("bad parameter id");
    if (choices_[d].empty())
      throw std::invalid_argument("free parameter '" + param_specs()[p].name +
                                  "' has no admissible values");
    for (int idx : choices_[d])
      if (idx < 0 || idx >= cards[p]) throw IndexOutOfRange(param_specs()[p].name, idx, cards[p]);
  }
  decode(base_);
}

SearchSpace SearchSpace::full(int n_chiplets_max) {
  if (n_chiplets_max < 1 || n_chiplets_max > 128)
    throw std::invalid_argument("n_chiplets_max must be in 1..128");
  const auto cards = cardinalities();
  std::vector<int> params(kNumParams);
  std::iota(params.begin(), params.end(), 0);
  std::vector<std::vector<int>> choices(kNumParams);
  for (int p = 0; p < kNumParams; ++p) {
    const int card = param_specs()[p].name == "n_chiplets" ? n_chiplets_max : cards[p];
    choices[p].resize(card);
    std::iota(choices[p].begin(), choices[p].end(), 0);
  }
  return SearchSpace(encode(reference_case_i()), std::move(params), std::move(choices));
}

SearchSpace SearchSpace::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("space restriction must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (key != "base" && key != "free")
      throw std::invalid_argument("unknown key '" + key + "' in space restriction");

  ActionVector base = encode(j.contains("base") ? design_point_from_json(j.at("base"))
                                                : reference_case_i());
  std::vector<int> params;
  std::vector<std::vector<int>> choices;
  if (j.contains("free")) {
    const auto& free = j.at("free");
    if (!free.is_object()) throw std::invalid_argument("'free' must be an object");
    for (const auto& [key, _] : free.items()) param_index(key);
    for (int p = 0; p < kNumParams; ++p) {
      const auto& name = param_specs()[p].name;
      if (!free.contains(name)) continue;
      const auto& v = free.at(name);
      std::vector<int> idx;
      if (v.is_array()) {
        for (const auto& e : v) idx.push_back(param_index_of(p, e));
      } else if (v.is_object() && v.contains("min") && v.contains("max")) {
        const int lo = param_index_of(p, v.at("min"));
        const int hi = param_index_of(p, v.at("max"));
        if (hi < lo) throw std::invalid_argument(name + ": max below min");
        for (int i = lo; i <= hi; ++i) idx.push_back(i);
      } else {
        throw std::invalid_argument(name + ": expected a value list or {min,max}");
      }
      params.push_back(p);
      choices.push_back(std::move(idx));
    }
  }
  return SearchSpace(base, std::move(params), std::move(choices));
}

std::vector<int> SearchSpace::dims() const {
  std::vector<int> d;
  d.reserve(choices_.size());
  for (const auto& c : choices_) d.push_back(static_cast<int>(c.size()));
  return d;
}

int SearchSpace::dims_sum() const {
  int s = 0;
  for (const auto& c : choices_) s += static_cast<int>(c.size());
  return s;
}

std::uint64_t SearchSpace::size() const {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t n = 1;
  for (const auto& c : choices_) {
    if (n > kMax / c.size()) return kMax;
    n *= c.size();
  }
  return n;
}

ActionVector SearchSpace::expand(std::span<const int> local) const {
  if (local.size() != free_params_.size())
    throw IndexOutOfRange("<arity>", static_cast<int>(local.size()), num_dims());
  ActionVector a = base_;
  for (std::size_t d = 0; d < local.size(); ++d) {
    const int card = static_cast<int>(choices_[d].size());
    if (local[d] < 0 || local[d] >= card)
      throw IndexOutOfRange(param_specs()[free_params_[d]].name, local[d], card);
    a[free_params_[d]] = choices_[d][local[d]];
  }
  return a;
}

std::vector<int> SearchSpace::unrank(std::uint64_t index) const {
  std::vector<int> local(choices_.size());
  for (std::size_t d = choices_.size(); d-- > 0;) {
    const std::uint64_t card = choices_[d].size();
    local[d] = static_cast<int>(index % card);
    index /= card;
  }
  return local;
}

}  // namespace chiplet
