#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "apsim/mapper.hpp"
#include "apsim/tech.hpp"
#include "apsim/workload.hpp"

namespace apsim {

struct CategoryCost {
  double energy_J = 0;
  double latency_s = 0;
};

struct LayerCost {
  std::string name;
  LayerKind kind = LayerKind::conv;
  unsigned bits = 0;
  std::uint64_t fold_factor = 1;
  double energy_J = 0;
  double latency_s = 0;
  double compute_s = 0;
  double transfer_s = 0;
};

/// End-to-end cost of one inference.
struct CostReport {
  std::string model;
  std::string precision;
  std::string tech;
  std::string hw;
  double voltage = 1.0;
  double average_bits = 0;
  std::uint64_t macs = 0;
  std::uint64_t ops = 0;
  std::uint64_t steps = 0;
  double utilization = 0;
  double energy_J = 0;
  double latency_s = 0;
  double area_mm2 = 0;
  double gops = 0;
  double gops_per_w = 0;
  double gops_per_w_per_mm2 = 0;
  double edp_Js = 0;
  std::array<CategoryCost, kCostCategories> breakdown{};
  std::vector<LayerCost> layers;

  [[nodiscard]] const CategoryCost& category(CostCategory c) const {
    return breakdown[static_cast<std::size_t>(c)];
  }
  [[nodiscard]] double energy_share(CostCategory c) const;
  [[nodiscard]] double latency_share(CostCategory c) const;
};

/// Everything besides the model and precision that a run depends on.
struct SimConfig {
  HardwareConfig hw = limited_resources();
  TechProfile tech = sram16nm();
  InterconnectProfile net;
  ClockProfile clock;
};

/// Costs a plan. Throws AccountingError if a category total drifts from the
/// layer sums.
CostReport cost_plan(const ExecutionPlan& plan, const SimConfig& cfg);

/// Plans (IR or LR per cfg.hw.mode) and costs one inference.
CostReport simulate(const ModelSpec& model, const PrecisionConfig& precision, const SimConfig& cfg);

/// Convolution-only peak numbers at full occupancy of every CAP. One step
/// is a lane-parallel multiply on every row plus the buffering of the
/// double-width products to the MAPs, which overlaps the next step.
struct PeakMetrics {
  unsigned bits = 0;
  double gops = 0;
  double gops_per_w = 0;
  double gops_per_w_per_mm2 = 0;
  double step_s = 0;
  double step_energy_J = 0;
};
PeakMetrics peak_metrics(unsigned bits, const SimConfig& cfg = {});
/// Largest precision peak_metrics accepts.
inline constexpr unsigned kMaxPeakBits = 16;

/// One row of the mixed-precision table, normalised to the INT8 baseline.
struct MixedPrecisionRow {
  std::string name;
  double average_bits = 0;
  double energy_J = 0;
  double latency_s = 0;
  double edp_Js = 0;
  double energy_factor = 1;      // baseline energy / this energy
  double normalized_latency = 1; // this latency / baseline latency
  double normalized_edp = 1;     // this EDP / baseline EDP
  std::optional<double> top1_accuracy;
};

/// Evaluates every config against `baseline` (fixed INT8 when empty). Throws
/// ConfigError when a config does not cover the model's quantized layers.
std::vector<MixedPrecisionRow> evaluate_mixed_precision(const ModelSpec& model,
                                                        const std::vector<PrecisionConfig>& configs,
                                                        const SimConfig& cfg,
                                                        std::optional<PrecisionConfig> baseline = {});

/// Result of fitting the shared compare energy per active cell.
struct CalibrationResult {
  double e_compare_cell = 0;           // J
  double rms_log_error = 0;            // over all target points
  std::vector<unsigned> bits;
  std::vector<double> targets;         // ReRAM/SRAM energy ratios asked for
  std::vector<double> ratios;          // ratios at the fitted value
};

/// VGG16 ReRAM/SRAM energy ratios at fixed precisions 2..8.
std::vector<double> default_ratio_targets();

/// Fits one e_compare_cell, shared by both technologies, so that
/// E(reram)/E(sram) of `model` at fixed:b matches `targets` in the
/// least-squares sense on log ratios. Throws UsageError on mismatched or
/// empty inputs.
CalibrationResult calibrate_compare_energy(const ModelSpec& model, const std::vector<unsigned>& bits,
                                           const std::vector<double>& targets, const SimConfig& sram,
                                           const TechProfile& reram);

/// Cartesian design-space sweep. Empty axes fall back to the defaults.
struct SweepSpec {
  std::vector<std::string> models{"vgg16"};
  std::vector<std::string> precisions{"fixed:8"};
  std::vector<std::string> techs{"sram16nm"};
  std::vector<double> voltages{1.0};
  std::vector<HwMode> modes{HwMode::lr};
  ApVariant variant = ApVariant::ap2d;
  unsigned threads = 0;  // 0 = hardware concurrency

  [[nodiscard]] std::size_t size() const;
};

/// Parses `name=v1,v2,...` for the axes model, precision, tech, voltage and
/// hw. A precision range `fixed:2..8` expands to seven points.
void apply_axis(SweepSpec& spec, const std::string& axis);

/// Runs every grid point (in parallel) and returns reports in axis order:
/// model, then precision, tech, voltage, hw.
std::vector<CostReport> sweep(const SweepSpec& spec);

/// Same as sweep() but hands each report to `sink` in order as it is ready.
void sweep(const SweepSpec& spec, const std::function<void(const CostReport&)>& sink);

}  // namespace apsim
