#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "apsim/cycle_model.hpp"
#include "apsim/event_trace.hpp"
#include "apsim/workload.hpp"

namespace apsim {

enum class HwMode { ir, lr };

std::string_view to_string(HwMode m);
HwMode parse_hw_mode(std::string_view s);

/// Accelerator organisation: clusters of CAPs, each cluster with its MAP(s)
/// and one mesh port. Every AP is ap_rows x ap_cols cells.
struct HardwareConfig {
  HwMode mode = HwMode::lr;
  std::uint64_t cluster_grid_rows = 8;
  std::uint64_t cluster_grid_cols = 8;
  std::uint64_t cap_grid_rows = 8;
  std::uint64_t cap_grid_cols = 8;
  std::uint64_t maps_per_cluster = 1;
  std::uint64_t ap_rows = 4800;
  std::uint64_t ap_cols = 16;  // two words at the widest supported precision
  ApVariant variant = ApVariant::ap2d;

  [[nodiscard]] std::uint64_t clusters() const { return cluster_grid_rows * cluster_grid_cols; }
  [[nodiscard]] std::uint64_t caps_per_cluster() const { return cap_grid_rows * cap_grid_cols; }
  [[nodiscard]] std::uint64_t total_caps() const { return clusters() * caps_per_cluster(); }
  [[nodiscard]] std::uint64_t total_maps() const { return clusters() * maps_per_cluster; }
  [[nodiscard]] std::uint64_t total_aps() const { return total_caps() + total_maps(); }
  [[nodiscard]] std::uint64_t total_cells() const { return total_aps() * ap_rows * ap_cols; }
};

/// 8x8 clusters of 8x8 CAPs plus one MAP each, 4800x16 APs.
HardwareConfig limited_resources();
/// One cluster with `caps` CAPs in a single row and a MAP sized in
/// proportion (one MAP-equivalent per 64 CAPs, rounded up).
HardwareConfig infinite_resources(std::uint64_t caps);

enum class CostCategory { gemm, addition, pooling, relu, data_movement };
inline constexpr std::size_t kCostCategories = 5;
std::string_view to_string(CostCategory c);

/// A batch of identical AP op instances. Instances run `per_step` at a time
/// (one per CAP), so the block takes `steps` consecutive AP steps. The last
/// step may hold a smaller `tail` instance.
struct ComputeBlock {
  CostCategory category = CostCategory::gemm;
  OpKind op = OpKind::matmat;
  OpParams params;
  std::uint64_t instances = 0;
  OpParams tail;                 // used when tail_instances > 0
  std::uint64_t tail_instances = 0;
  std::uint64_t steps = 0;
};

/// Mesh traffic of one layer. `*_bits` are totals over all clusters;
/// `busiest_cluster_bits` is what the most loaded mesh port must carry.
struct LayerTraffic {
  double weight_bits = 0;
  double input_bits = 0;
  double output_bits = 0;
  double busiest_cluster_bits = 0;
  [[nodiscard]] double total_bits() const { return weight_bits + input_bits + output_bits; }
};

/// Cost of moving one tensor through the MAP: CAP word reads, bus to the
/// MAP, MAP word writes, MAP word reads, bus back, CAP word writes.
struct ReshapeCost {
  EventTrace cells;             // array activity of the six steps
  std::uint64_t flits_to_map = 0;
  std::uint64_t flits_to_caps = 0;
  double bits_to_map = 0;
  double bits_to_caps = 0;
};

/// `out_elements` leave the producing CAPs, `in_elements` (the rearranged
/// operand set of the consumer, duplicates included) arrive at the consuming
/// CAPs. Both at `bits` per element; flits are 1024 bits unless overridden.
ReshapeCost reshape_cost(std::uint64_t out_elements, std::uint64_t in_elements, unsigned bits,
                         std::uint64_t flit_bits = 1024);
ReshapeCost reshape_cost(const Shape3& out, const Shape3& next_in, unsigned bits,
                         std::uint64_t flit_bits = 1024);

struct LayerPlan {
  std::string name;
  LayerKind kind = LayerKind::conv;
  unsigned bits = 8;          // operand precision M of the layer's AP ops
  unsigned out_bits = 8;      // precision of the tensor it hands on
  std::uint64_t macs = 0;
  std::uint64_t ops = 0;      // operations credited for GOPS
  std::uint64_t fold_factor = 1;
  double utilization = 0;     // occupied CAP rows over available CAP rows
  std::uint64_t output_columns = 0;     // output-matrix columns produced
  std::uint64_t active_clusters = 0;
  std::vector<ComputeBlock> blocks;     // run one after another
  LayerTraffic traffic;
  ReshapeCost reshape;                  // input arrival plus output departure
};

struct ExecutionPlan {
  std::string model;
  HardwareConfig hw;
  std::vector<LayerPlan> layers;

  [[nodiscard]] std::uint64_t total_steps() const;
  [[nodiscard]] std::uint64_t total_macs() const;
  [[nodiscard]] std::uint64_t total_ops() const;
  /// Row-weighted utilization over all GEMM steps.
  [[nodiscard]] double gemm_utilization() const;
};

/// CAPs an unfolded layer needs, i.e. its op instance count.
std::uint64_t caps_needed(const LayerSpec& layer, unsigned bits, const HardwareConfig& hw);

/// Maximum-parallelism plan: one cluster with enough CAPs to finish every
/// layer in one step. Weights are resident before inference and not charged.
ExecutionPlan plan_ir(const ModelSpec& model, const PrecisionConfig& precision,
                      ApVariant variant = ApVariant::ap2d);

/// Weight-stationary plan on a fixed machine, folded in time. Throws
/// CapacityError when a layer cannot be placed even after folding.
ExecutionPlan plan_lr(const ModelSpec& model, const PrecisionConfig& precision,
                      const HardwareConfig& hw = limited_resources());

/// Dispatches on hw.mode (IR ignores the LR grid fields).
ExecutionPlan plan(const ModelSpec& model, const PrecisionConfig& precision,
                   const HardwareConfig& hw);

/// Plain-text dump: one line per layer with steps, fold and traffic.
std::string to_text(const ExecutionPlan& plan);

}  // namespace apsim
