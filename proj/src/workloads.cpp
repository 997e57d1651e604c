#include "chiplet/workloads.hpp"

#include <stdexcept>

namespace chiplet {

void Workload::validate() const {
  if (name.empty()) throw std::invalid_argument("workload name is empty");
  if (!(ops_g > 0)) throw std::invalid_argument(name + ": ops_g must be > 0");
  if (ops_ng < 0) throw std::invalid_argument(name + ": ops_ng must be >= 0");
  if (!(m_eff > 0 && m_eff <= 1)) throw std::invalid_argument(name + ": m_eff must be in (0,1]");
  if (d_w <= 0) throw std::invalid_argument(name + ": d_w must be > 0");
}

std::vector<Workload> builtin_benchmarks() {
  constexpr double G = 1e9;
  return {
      {"ResNet50", "Image classification", 4 * G, 0, 1.0, 8},
      {"Efficientdet", "Light weight object detection", 410 * G, 0, 1.0, 8},
      {"mask-RCNN", "Heavy weight object detection", 447 * G, 0, 1.0, 8},
      {"3D-UNet", "Biomedical image segmentation", 947 * G, 0, 1.0, 8},
      {"BERT", "Natural Language Processing", 32 * G, 0, 1.0, 8},
  };
}

double tasks_per_sec(double system_ops, const Workload& w) {
  if (system_ops < 0) throw std::invalid_argument("system ops must be >= 0");
  return system_ops * w.m_eff / (w.ops_g + w.ops_ng);
}

double tasks_per_joule(double e_op_pj, const Workload& w) {
  if (!(e_op_pj > 0)) throw std::invalid_argument("energy per op must be > 0");
  return 1.0 / (e_op_pj * 1e-12 * (w.ops_g + w.ops_ng));
}

nlohmann::json to_json(const Workload& w) {
  return {{"name", w.name},
          {"domain", w.domain},
          {"ops_g_gflops", w.ops_g / 1e9},
          {"ops_ng_gflops", w.ops_ng / 1e9},
          {"m_eff", w.m_eff},
          {"d_w_bits", w.d_w}};
}

Workload workload_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("workload row must be an object");
  for (const auto& [k, _] : j.items())
    if (k != "name" && k != "domain" && k != "ops_g_gflops" && k != "ops_ng_gflops" &&
        k != "m_eff" && k != "d_w_bits")
      throw std::invalid_argument("unknown workload field '" + k + "'");
  Workload w;
  try {
    w.name = j.at("name").get<std::string>();
    w.domain = j.value("domain", std::string{});
    w.ops_g = j.at("ops_g_gflops").get<double>() * 1e9;
    w.ops_ng = j.value("ops_ng_gflops", 0.0) * 1e9;
    w.m_eff = j.value("m_eff", 1.0);
    w.d_w = j.value("d_w_bits", 8);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("workload row: ") + e.what());
  }
  w.validate();
  return w;
}

std::vector<Workload> workloads_from_json(const nlohmann::json& rows) {
  if (!rows.is_array()) throw std::invalid_argument("workload file must be a JSON array");
  std::vector<Workload> out;
  for (const auto& r : rows) out.push_back(workload_from_json(r));
  return out;
}

}  // namespace chiplet
