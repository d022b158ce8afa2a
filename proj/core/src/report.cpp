#include "apsim/report.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace apsim {

using nlohmann::ordered_json;

std::string format_sig(double v) {
  if (v == 0) return "0";
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

namespace {

// Rounds through the 6-digit text form so JSON and CSV agree.
double sig(double v) { return v == 0 ? 0.0 : std::stod(format_sig(v)); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

template <typename... Ts>
std::string join(const Ts&... parts) {
  std::string out;
  bool first = true;
  ((out += first ? "" : ",", out += parts, first = false), ...);
  return out;
}

ordered_json breakdown_json(const CostReport& r) {
  ordered_json b = ordered_json::object();
  for (std::size_t i = 0; i < kCostCategories; ++i) {
    const auto c = static_cast<CostCategory>(i);
    b[std::string(to_string(c))] = {
        {"energy_J", sig(r.category(c).energy_J)},
        {"latency_s", sig(r.category(c).latency_s)},
        {"energy_share", sig(r.energy_share(c))},
        {"latency_share", sig(r.latency_share(c))},
    };
  }
  return b;
}

ordered_json report_json(const CostReport& r, bool with_layers) {
  ordered_json j = {
      {"model", r.model},
      {"precision", r.precision},
      {"tech", r.tech},
      {"hw", r.hw},
      {"voltage", sig(r.voltage)},
      {"average_bits", sig(r.average_bits)},
      {"macs", r.macs},
      {"ops", r.ops},
      {"steps", r.steps},
      {"utilization", sig(r.utilization)},
      {"energy_J", sig(r.energy_J)},
      {"latency_s", sig(r.latency_s)},
      {"area_mm2", sig(r.area_mm2)},
      {"gops", sig(r.gops)},
      {"gops_per_w", sig(r.gops_per_w)},
      {"gops_per_w_per_mm2", sig(r.gops_per_w_per_mm2)},
      {"edp_Js", sig(r.edp_Js)},
      {"breakdown", breakdown_json(r)},
  };
  if (with_layers) {
    ordered_json layers = ordered_json::array();
    for (const auto& l : r.layers)
      layers.push_back({{"name", l.name},
                        {"kind", std::string(to_string(l.kind))},
                        {"bits", l.bits},
                        {"fold_factor", l.fold_factor},
                        {"energy_J", sig(l.energy_J)},
                        {"latency_s", sig(l.latency_s)},
                        {"compute_s", sig(l.compute_s)},
                        {"transfer_s", sig(l.transfer_s)}});
    j["layers"] = std::move(layers);
  }
  return j;
}

ordered_json envelope(const char* kind, ordered_json items) {
  return {{"schema", "apsim"},
          {"version", kReportSchemaVersion},
          {"kind", kind},
          {"items", std::move(items)}};
}

}  // namespace

std::string csv_header() {
  std::string h =
      "schema_version,model,precision,tech,hw,voltage,average_bits,macs,ops,steps,utilization,"
      "energy_J,latency_s,area_mm2,gops,gops_per_w,gops_per_w_per_mm2,edp_Js";
  for (std::size_t i = 0; i < kCostCategories; ++i) {
    const std::string c(to_string(static_cast<CostCategory>(i)));
    h += "," + c + "_energy_J," + c + "_latency_s," + c + "_energy_share," + c + "_latency_share";
  }
  return h;
}

std::string csv_row(const CostReport& r) {
  std::string row = join(std::to_string(kReportSchemaVersion), csv_field(r.model),
                         csv_field(r.precision), csv_field(r.tech), csv_field(r.hw),
                         format_sig(r.voltage), format_sig(r.average_bits), std::to_string(r.macs),
                         std::to_string(r.ops), std::to_string(r.steps), format_sig(r.utilization),
                         format_sig(r.energy_J), format_sig(r.latency_s), format_sig(r.area_mm2),
                         format_sig(r.gops), format_sig(r.gops_per_w),
                         format_sig(r.gops_per_w_per_mm2), format_sig(r.edp_Js));
  for (std::size_t i = 0; i < kCostCategories; ++i) {
    const auto c = static_cast<CostCategory>(i);
    row += "," + join(format_sig(r.category(c).energy_J), format_sig(r.category(c).latency_s),
                      format_sig(r.energy_share(c)), format_sig(r.latency_share(c)));
  }
  return row;
}

void write_csv(std::ostream& os, const std::vector<CostReport>& reports) {
  os << csv_header() << '\n';
  for (const auto& r : reports) os << csv_row(r) << '\n';
}

void write_layers_csv(std::ostream& os, const CostReport& r) {
  os << "schema_version,model,layer,kind,bits,fold_factor,energy_J,latency_s,compute_s,transfer_s\n";
  for (const auto& l : r.layers)
    os << join(std::to_string(kReportSchemaVersion), csv_field(r.model), csv_field(l.name),
               std::string(to_string(l.kind)), std::to_string(l.bits),
               std::to_string(l.fold_factor), format_sig(l.energy_J), format_sig(l.latency_s),
               format_sig(l.compute_s), format_sig(l.transfer_s))
       << '\n';
}

std::string to_json(const CostReport& r, bool with_layers) {
  return report_json(r, with_layers).dump(2);
}

void write_json(std::ostream& os, const std::vector<CostReport>& reports, bool with_layers) {
  ordered_json items = ordered_json::array();
  for (const auto& r : reports) items.push_back(report_json(r, with_layers));
  os << envelope("cost_report", std::move(items)).dump(2) << '\n';
}

void write_csv(std::ostream& os, const std::vector<PeakMetrics>& peaks) {
  os << "schema_version,bits,gops,gops_per_w,gops_per_w_per_mm2,step_s,step_energy_J\n";
  for (const auto& p : peaks)
    os << join(std::to_string(kReportSchemaVersion), std::to_string(p.bits), format_sig(p.gops),
               format_sig(p.gops_per_w), format_sig(p.gops_per_w_per_mm2), format_sig(p.step_s),
               format_sig(p.step_energy_J))
       << '\n';
}

void write_json(std::ostream& os, const std::vector<PeakMetrics>& peaks) {
  ordered_json items = ordered_json::array();
  for (const auto& p : peaks)
    items.push_back({{"bits", p.bits},
                     {"gops", sig(p.gops)},
                     {"gops_per_w", sig(p.gops_per_w)},
                     {"gops_per_w_per_mm2", sig(p.gops_per_w_per_mm2)},
                     {"step_s", sig(p.step_s)},
                     {"step_energy_J", sig(p.step_energy_J)}});
  os << envelope("peak", std::move(items)).dump(2) << '\n';
}

void write_csv(std::ostream& os, const std::vector<MixedPrecisionRow>& rows) {
  os << "schema_version,config,average_bits,top1_accuracy,energy_J,latency_s,edp_Js,"
        "energy_factor,normalized_latency,normalized_edp\n";
  for (const auto& r : rows)
    os << join(std::to_string(kReportSchemaVersion), csv_field(r.name),
               format_sig(r.average_bits),
               r.top1_accuracy ? format_sig(*r.top1_accuracy) : std::string(),
               format_sig(r.energy_J), format_sig(r.latency_s), format_sig(r.edp_Js),
               format_sig(r.energy_factor), format_sig(r.normalized_latency),
               format_sig(r.normalized_edp))
       << '\n';
}

void write_json(std::ostream& os, const std::vector<MixedPrecisionRow>& rows) {
  ordered_json items = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json j = {{"config", r.name},
                      {"average_bits", sig(r.average_bits)},
                      {"top1_accuracy", nullptr},
                      {"energy_J", sig(r.energy_J)},
                      {"latency_s", sig(r.latency_s)},
                      {"edp_Js", sig(r.edp_Js)},
                      {"energy_factor", sig(r.energy_factor)},
                      {"normalized_latency", sig(r.normalized_latency)},
                      {"normalized_edp", sig(r.normalized_edp)}};
    if (r.top1_accuracy) j["top1_accuracy"] = sig(*r.top1_accuracy);
    items.push_back(std::move(j));
  }
  os << envelope("mixed_precision", std::move(items)).dump(2) << '\n';
}

void write_csv(std::ostream& os, const CalibrationResult& cal) {
  os << "schema_version,bits,target_ratio,fitted_ratio,e_compare_cell_J\n";
  for (std::size_t i = 0; i < cal.bits.size(); ++i)
    os << join(std::to_string(kReportSchemaVersion), std::to_string(cal.bits[i]),
               format_sig(cal.targets[i]), format_sig(cal.ratios[i]),
               format_sig(cal.e_compare_cell))
       << '\n';
}

void write_json(std::ostream& os, const CalibrationResult& cal) {
  ordered_json points = ordered_json::array();
  for (std::size_t i = 0; i < cal.bits.size(); ++i)
    points.push_back({{"bits", cal.bits[i]},
                      {"target_ratio", sig(cal.targets[i])},
                      {"fitted_ratio", sig(cal.ratios[i])}});
  ordered_json body = {{"e_compare_cell_J", sig(cal.e_compare_cell)},
                       {"rms_log_error", sig(cal.rms_log_error)},
                       {"points", std::move(points)}};
  os << envelope("calibration", ordered_json::array({std::move(body)})).dump(2) << '\n';
}

std::string to_json(const ExecutionPlan& plan) {
  ordered_json layers = ordered_json::array();
  for (const auto& l : plan.layers) {
    ordered_json blocks = ordered_json::array();
    for (const auto& b : l.blocks)
      blocks.push_back({{"category", std::string(to_string(b.category))},
                        {"op", std::string(to_string(b.op))},
                        {"m", b.params.m},
                        {"l", b.params.l},
                        {"s", b.params.s},
                        {"i", b.params.i},
                        {"j", b.params.j},
                        {"u", b.params.u},
                        {"instances", b.instances},
                        {"tail_instances", b.tail_instances},
                        {"steps", b.steps}});
    layers.push_back({{"name", l.name},
                      {"kind", std::string(to_string(l.kind))},
                      {"bits", l.bits},
                      {"out_bits", l.out_bits},
                      {"macs", l.macs},
                      {"ops", l.ops},
                      {"fold_factor", l.fold_factor},
                      {"utilization", sig(l.utilization)},
                      {"output_columns", l.output_columns},
                      {"active_clusters", l.active_clusters},
                      {"blocks", std::move(blocks)},
                      {"traffic",
                       {{"weight_bits", sig(l.traffic.weight_bits)},
                        {"input_bits", sig(l.traffic.input_bits)},
                        {"output_bits", sig(l.traffic.output_bits)},
                        {"busiest_cluster_bits", sig(l.traffic.busiest_cluster_bits)}}},
                      {"reshape",
                       {{"flits_to_map", l.reshape.flits_to_map},
                        {"flits_to_caps", l.reshape.flits_to_caps}}}});
  }
  const auto& hw = plan.hw;
  ordered_json j = {{"schema", "apsim"},
                    {"version", kReportSchemaVersion},
                    {"kind", "plan"},
                    {"model", plan.model},
                    {"hw",
                     {{"mode", std::string(to_string(hw.mode))},
                      {"clusters", hw.clusters()},
                      {"caps_per_cluster", hw.caps_per_cluster()},
                      {"maps_per_cluster", hw.maps_per_cluster},
                      {"ap_rows", hw.ap_rows},
                      {"ap_cols", hw.ap_cols},
                      {"variant", std::string(to_string(hw.variant))}}},
                    {"total_steps", plan.total_steps()},
                    {"total_macs", plan.total_macs()},
                    {"gemm_utilization", sig(plan.gemm_utilization())},
                    {"layers", std::move(layers)}};
  return j.dump(2);
}

}  // namespace apsim
