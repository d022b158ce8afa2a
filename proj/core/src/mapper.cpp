#include "apsim/mapper.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <sstream>

#include "apsim/errors.hpp"

namespace apsim {

std::string_view to_string(HwMode m) { return m == HwMode::ir ? "ir" : "lr"; }

HwMode parse_hw_mode(std::string_view s) {
  if (s == "ir" || s == "IR") return HwMode::ir;
  if (s == "lr" || s == "LR") return HwMode::lr;
  throw ConfigError("hardware mode must be ir or lr, got '" + std::string(s) + "'");
}

std::string_view to_string(CostCategory c) {
  switch (c) {
    case CostCategory::gemm: return "gemm";
    case CostCategory::addition: return "addition";
    case CostCategory::pooling: return "pooling";
    case CostCategory::relu: return "relu";
    case CostCategory::data_movement: return "data_movement";
  }
  return "?";
}

HardwareConfig limited_resources() { return HardwareConfig{}; }

HardwareConfig infinite_resources(std::uint64_t caps) {
  HardwareConfig hw;
  hw.mode = HwMode::ir;
  hw.cluster_grid_rows = 1;
  hw.cluster_grid_cols = 1;
  hw.cap_grid_rows = 1;
  hw.cap_grid_cols = caps;
  hw.maps_per_cluster = std::max<std::uint64_t>(1, (caps + 63) / 64);
  return hw;
}

namespace {

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return b == 0 ? 0 : (a + b - 1) / b; }

// Largest x in [1, hi] with fits(x); 0 when even x = 1 does not fit.
template <typename F>
std::uint64_t largest_fitting(std::uint64_t hi, F fits) {
  if (hi == 0 || !fits(1)) return 0;
  std::uint64_t lo = 1;
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo + 1) / 2;
    if (fits(mid)) lo = mid;
    else hi = mid - 1;
  }
  return lo;
}

// How a GEMM layer is cut into op instances of at most one CAP each.
struct GemmTiling {
  std::uint64_t j = 0;        // full dot-product length
  std::uint64_t chunks = 1;   // pieces the dot product is split into
  std::uint64_t jc = 0;       // length of one piece
  std::uint64_t g = 0;        // outputs (dot products) per instance
};

GemmTiling tile_gemm(std::uint64_t j, unsigned m, const HardwareConfig& hw) {
  auto rows_for = [&](std::uint64_t jj, std::uint64_t u) {
    OpParams p;
    p.m = m;
    p.i = 1;
    p.j = jj;
    p.u = u;
    return op_geometry(OpKind::matmat, p, hw.variant).rows;
  };
  GemmTiling t;
  t.j = j;
  std::uint64_t jmax = largest_fitting(j, [&](std::uint64_t jj) { return rows_for(jj, 1) <= hw.ap_rows; });
  if (jmax == 0) throw CapacityError("an AP of " + std::to_string(hw.ap_rows) + " rows cannot hold one product lane");
  t.chunks = ceil_div(j, jmax);
  t.jc = ceil_div(j, t.chunks);
  t.g = largest_fitting(hw.ap_rows, [&](std::uint64_t u) { return rows_for(t.jc, u) <= hw.ap_rows; });
  return t;
}

OpParams matmat_params(unsigned m, std::uint64_t j, std::uint64_t outputs) {
  OpParams p;
  p.m = m;
  p.i = 1;
  p.j = j;
  p.u = outputs;
  return p;
}

OpParams add_params(unsigned m, std::uint64_t pairs) {
  OpParams p;
  p.m = m;
  p.l = 2 * pairs;
  return p;
}

OpParams relu_params(unsigned m, std::uint64_t words) {
  OpParams p;
  p.m = m;
  p.l = words;
  return p;
}

OpParams pool_params(unsigned m, std::uint64_t s, std::uint64_t k) {
  OpParams p;
  p.m = m;
  p.s = s;
  p.k = k;
  return p;
}

// Splits `items` work items, each needing one instance slot of `per`
// items, over the active clusters. Returns the block with total and tail
// instances and the steps of the busiest cluster.
ComputeBlock make_block(CostCategory cat, OpKind op, std::uint64_t items, std::uint64_t per,
                        std::uint64_t repeat, std::uint64_t items_per_cluster,
                        std::uint64_t caps_per_cluster, const std::function<OpParams(std::uint64_t)>& params) {
  ComputeBlock b;
  b.category = cat;
  b.op = op;
  b.params = params(per);
  b.instances = (items / per) * repeat;
  const std::uint64_t rem = items % per;
  if (rem > 0) {
    b.tail = params(rem);
    b.tail_instances = repeat;
  }
  b.steps = ceil_div(ceil_div(items_per_cluster, per) * repeat, caps_per_cluster);
  return b;
}

struct Split {
  std::uint64_t col_split = 1;
  std::uint64_t row_split = 1;
  [[nodiscard]] std::uint64_t active() const { return col_split * row_split; }
};

// Clusters take disjoint output columns; when there are fewer columns than
// clusters the rows of each column are divided as well.
Split split_outputs(std::uint64_t rows, std::uint64_t cols, std::uint64_t clusters) {
  Split s;
  if (cols >= clusters) {
    s.col_split = clusters;
  } else {
    s.col_split = std::max<std::uint64_t>(1, cols);
    s.row_split = std::max<std::uint64_t>(1, std::min(clusters / s.col_split, rows));
  }
  return s;
}

std::uint64_t gemm_ops_credit(const LayerSpec& l) { return 2 * macs_of(l); }

std::uint64_t pool_ops_credit(const LayerSpec& l) {
  const auto out = l.output();
  return out.elements() * (l.z * l.z - 1);
}

struct Planner {
  const HardwareConfig& hw;
  bool resident_weights;  // IR: weights loaded before inference

  void gemm(const LayerSpec& l, unsigned m, LayerPlan& lp) const {
    const auto dims = im2col_dims(l);
    const std::uint64_t j = dims.p.rows;
    const std::uint64_t cols = dims.o.cols;
    const std::uint64_t ck = dims.k.rows;  // all filters, every group
    const std::uint64_t outputs = ck * cols;
    const auto t = tile_gemm(j, m, hw);

    const Split split = split_outputs(ck, cols, hw.clusters());
    const std::uint64_t cols_c = ceil_div(cols, split.col_split);
    const std::uint64_t rows_c = ceil_div(ck, split.row_split);
    const std::uint64_t outputs_c = rows_c * cols_c;
    lp.active_clusters = split.active();
    lp.output_columns = cols;

    auto mm = [&](std::uint64_t u) { return matmat_params(m, t.jc, u); };
    auto main = make_block(CostCategory::gemm, OpKind::matmat, outputs, t.g, t.chunks, outputs_c,
                           hw.caps_per_cluster(), mm);
    lp.fold_factor = std::max<std::uint64_t>(1, main.steps);

    const auto inst_rows = op_geometry(OpKind::matmat, main.params, hw.variant).rows;
    double used_rows = static_cast<double>(main.instances) * static_cast<double>(inst_rows);
    if (main.tail_instances > 0) {
      used_rows += static_cast<double>(main.tail_instances) *
                   static_cast<double>(op_geometry(OpKind::matmat, main.tail, hw.variant).rows);
    }
    lp.utilization = used_rows / (static_cast<double>(main.steps) * static_cast<double>(hw.total_caps()) *
                                  static_cast<double>(hw.ap_rows));
    lp.blocks.push_back(main);

    const unsigned acc_bits = 2 * m + static_cast<unsigned>(ceil_log2(t.jc));
    double partial_bits = 0;
    if (t.chunks > 1) {
      // Partial sums of the dot-product pieces are combined pairwise.
      std::uint64_t parts = t.chunks;
      unsigned width = acc_bits;
      while (parts > 1) {
        const std::uint64_t pairs = outputs * (parts / 2);
        const std::uint64_t pairs_c = outputs_c * (parts / 2);
        auto add = [&](std::uint64_t p) { return add_params(width, p); };
        lp.blocks.push_back(make_block(CostCategory::gemm, OpKind::addition, pairs, std::min(pairs, hw.ap_rows), 1,
                                       pairs_c, hw.caps_per_cluster(), add));
        partial_bits += static_cast<double>(pairs) * width;
        parts = ceil_div(parts, 2);
        ++width;
      }
    }
    const unsigned sum_bits = acc_bits + static_cast<unsigned>(ceil_log2(t.chunks));
    // Offset encoding: one correction vector is added to every layer output.
    auto fix = [&](std::uint64_t p) { return add_params(sum_bits, p); };
    lp.blocks.push_back(make_block(CostCategory::addition, OpKind::addition, outputs,
                                   std::min(outputs, hw.ap_rows), 1, outputs_c, hw.caps_per_cluster(), fix));

    // Mesh traffic. One operand stays put while the other is streamed; the
    // one that fits (or the cheaper re-stream) stays.
    const std::uint64_t groups_c = ceil_div(l.groups, split.row_split);
    const double k_words = static_cast<double>(rows_c) * static_cast<double>(j);
    const double p_words = static_cast<double>(j) * static_cast<double>(cols_c) * static_cast<double>(groups_c);
    const double lanes_c = static_cast<double>(hw.caps_per_cluster()) * static_cast<double>(t.g * t.jc);
    double w_words = 0;
    double in_words = p_words;
    if (!resident_weights) {
      const double k_slices = std::ceil(k_words / lanes_c);
      const double p_slices = std::ceil(p_words / lanes_c);
      const double k_stationary = k_words + p_words * k_slices;
      const double p_stationary = p_words + k_words * p_slices;
      if (k_stationary <= p_stationary) {
        w_words = k_words;
        in_words = p_words * k_slices;
      } else {
        w_words = k_words * p_slices;
        in_words = p_words;
      }
    }
    const double active = static_cast<double>(lp.active_clusters);
    const double partial_c = partial_bits / active;
    lp.traffic.weight_bits = w_words * m * active;
    lp.traffic.input_bits = in_words * m * active + partial_bits;
    lp.traffic.output_bits = static_cast<double>(outputs) * m;
    lp.traffic.busiest_cluster_bits =
        (w_words + in_words) * m + partial_c + static_cast<double>(outputs_c) * m;
    lp.reshape = reshape_cost(outputs, static_cast<std::uint64_t>(std::llround((w_words + in_words) * active)), m);
  }

  void pool(const LayerSpec& l, unsigned m, LayerPlan& lp) const {
    const auto out = l.output();
    const std::uint64_t windows = out.elements();
    const std::uint64_t s = l.z * l.z;
    const OpKind op = l.kind == LayerKind::maxpool ? OpKind::max_pool : OpKind::avg_pool;
    const std::uint64_t k = largest_fitting(windows, [&](std::uint64_t kk) {
      return op_geometry(op, pool_params(m, s, kk), hw.variant).rows <= hw.ap_rows;
    });
    if (k == 0) throw CapacityError(l.name + ": one pooling window does not fit an AP");
    const std::uint64_t active = std::min(hw.clusters(), windows);
    const std::uint64_t windows_c = ceil_div(windows, active);
    auto pp = [&](std::uint64_t kk) { return pool_params(m, s, kk); };
    lp.blocks.push_back(make_block(CostCategory::pooling, op, windows, k, 1, windows_c, hw.caps_per_cluster(), pp));
    lp.active_clusters = active;
    lp.fold_factor = lp.blocks.back().steps;
    lp.output_columns = out.h * out.w;
    const double in_words = static_cast<double>(windows) * static_cast<double>(s);
    lp.traffic.input_bits = in_words * m;
    lp.traffic.output_bits = static_cast<double>(windows) * m;
    lp.traffic.busiest_cluster_bits = static_cast<double>(windows_c) * static_cast<double>(s + 1) * m;
    lp.reshape = reshape_cost(windows, windows * s, m);
  }

  void elementwise(const LayerSpec& l, unsigned m, LayerPlan& lp) const {
    const std::uint64_t elems = l.input.elements();
    const std::uint64_t active = std::min(hw.clusters(), elems);
    const std::uint64_t elems_c = ceil_div(elems, active);
    const std::uint64_t per = std::min(elems, hw.ap_rows);
    const bool relu = l.kind == LayerKind::relu;
    const std::uint64_t operands = relu ? 1 : 2;
    if (relu) {
      auto rp = [&](std::uint64_t w) { return relu_params(m, w); };
      lp.blocks.push_back(make_block(CostCategory::relu, OpKind::relu, elems, per, 1, elems_c, hw.caps_per_cluster(), rp));
    } else {
      auto ap = [&](std::uint64_t p) { return add_params(m, p); };
      lp.blocks.push_back(
          make_block(CostCategory::addition, OpKind::addition, elems, per, 1, elems_c, hw.caps_per_cluster(), ap));
    }
    lp.active_clusters = active;
    lp.fold_factor = lp.blocks.back().steps;
    lp.output_columns = l.input.h * l.input.w;
    lp.traffic.input_bits = static_cast<double>(elems * operands) * m;
    lp.traffic.output_bits = static_cast<double>(elems) * m;
    lp.traffic.busiest_cluster_bits = static_cast<double>(elems_c * (operands + 1)) * m;
    lp.reshape = reshape_cost(elems, elems * operands, m);
  }

  LayerPlan layer(const LayerSpec& l, unsigned m) const {
    LayerPlan lp;
    lp.name = l.name;
    lp.kind = l.kind;
    lp.bits = m;
    lp.out_bits = m;
    switch (l.kind) {
      case LayerKind::conv:
      case LayerKind::fc:
        lp.macs = macs_of(l);
        lp.ops = gemm_ops_credit(l);
        gemm(l, m, lp);
        break;
      case LayerKind::maxpool:
      case LayerKind::avgpool:
        lp.ops = pool_ops_credit(l);
        pool(l, m, lp);
        break;
      case LayerKind::relu:
        lp.ops = l.input.elements();
        elementwise(l, m, lp);
        break;
      case LayerKind::residual_add:
        elementwise(l, m, lp);
        break;
    }
    return lp;
  }
};

ExecutionPlan build(const ModelSpec& model, const PrecisionConfig& precision, const HardwareConfig& hw,
                    bool resident_weights) {
  ExecutionPlan plan;
  plan.model = model.name;
  plan.hw = hw;
  if (model.layers.empty()) return plan;
  const auto bits = layer_bitwidths(model, precision);
  const Planner planner{hw, resident_weights};
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    plan.layers.push_back(planner.layer(model.layers[i], bits[i]));
  }
  return plan;
}

}  // namespace

std::uint64_t caps_needed(const LayerSpec& layer, unsigned bits, const HardwareConfig& hw) {
  // A single cluster large enough for anything, so the count is not capped.
  HardwareConfig one = hw;
  one.cluster_grid_rows = one.cluster_grid_cols = 1;
  one.cap_grid_rows = 1;
  one.cap_grid_cols = 1;
  const Planner planner{one, true};
  const auto lp = planner.layer(layer, bits);
  std::uint64_t caps = 0;
  for (const auto& b : lp.blocks) caps = std::max(caps, b.instances + b.tail_instances);
  return caps;
}

ExecutionPlan plan_ir(const ModelSpec& model, const PrecisionConfig& precision, ApVariant variant) {
  HardwareConfig probe;
  probe.variant = variant;
  std::uint64_t caps = 1;
  if (!model.layers.empty()) {
    const auto bits = layer_bitwidths(model, precision);
    for (std::size_t i = 0; i < model.layers.size(); ++i) {
      caps = std::max(caps, caps_needed(model.layers[i], bits[i], probe));
    }
  }
  auto hw = infinite_resources(caps);
  hw.variant = variant;
  return build(model, precision, hw, true);
}

ExecutionPlan plan_lr(const ModelSpec& model, const PrecisionConfig& precision, const HardwareConfig& hw) {
  if (hw.mode != HwMode::lr) throw UsageError("plan_lr needs a limited-resources hardware config");
  if (hw.total_caps() == 0 || hw.ap_rows == 0) throw CapacityError("hardware config has no CAP rows");
  return build(model, precision, hw, false);
}

ExecutionPlan plan(const ModelSpec& model, const PrecisionConfig& precision, const HardwareConfig& hw) {
  return hw.mode == HwMode::ir ? plan_ir(model, precision, hw.variant) : plan_lr(model, precision, hw);
}

ReshapeCost reshape_cost(std::uint64_t out_elements, std::uint64_t in_elements, unsigned bits,
                         std::uint64_t flit_bits) {
  ReshapeCost r;
  r.bits_to_map = static_cast<double>(out_elements) * bits;
  r.bits_to_caps = static_cast<double>(in_elements) * bits;
  r.flits_to_map = ceil_div(out_elements * bits, flit_bits);
  r.flits_to_caps = ceil_div(in_elements * bits, flit_bits);
  // CAP word reads and MAP word writes of the outputs, then MAP word reads
  // of the rearranged operands. The CAP-side writes land in the consumer's
  // populate phase, which its op trace already charges.
  r.cells.n_read = out_elements + in_elements;
  r.cells.n_write = out_elements + in_elements;
  r.cells.cells_read = (out_elements + in_elements) * bits;
  r.cells.cells_written = out_elements * bits;
  return r;
}

ReshapeCost reshape_cost(const Shape3& out, const Shape3& next_in, unsigned bits, std::uint64_t flit_bits) {
  return reshape_cost(out.elements(), next_in.elements(), bits, flit_bits);
}

std::uint64_t ExecutionPlan::total_steps() const {
  std::uint64_t s = 0;
  for (const auto& l : layers) {
    for (const auto& b : l.blocks) s += b.steps;
  }
  return s;
}

std::uint64_t ExecutionPlan::total_macs() const {
  std::uint64_t s = 0;
  for (const auto& l : layers) s += l.macs;
  return s;
}

std::uint64_t ExecutionPlan::total_ops() const {
  std::uint64_t s = 0;
  for (const auto& l : layers) s += l.ops;
  return s;
}

double ExecutionPlan::gemm_utilization() const {
  double used = 0;
  double steps = 0;
  for (const auto& l : layers) {
    if (l.kind != LayerKind::conv && l.kind != LayerKind::fc) continue;
    used += l.utilization * static_cast<double>(l.fold_factor);
    steps += static_cast<double>(l.fold_factor);
  }
  return steps == 0 ? 0.0 : used / steps;
}

std::string to_text(const ExecutionPlan& plan) {
  std::ostringstream os;
  os << "plan " << plan.model << " mode=" << to_string(plan.hw.mode) << " clusters=" << plan.hw.clusters()
     << " caps=" << plan.hw.total_caps() << " variant=" << to_string(plan.hw.variant) << '\n';
  os << std::setprecision(6);
  for (const auto& l : plan.layers) {
    os << l.name << ' ' << to_string(l.kind) << " bits=" << l.bits << " fold=" << l.fold_factor
       << " clusters=" << l.active_clusters << " util=" << l.utilization << " mesh_bits=" << l.traffic.total_bits();
    for (const auto& b : l.blocks) {
      os << " [" << to_string(b.op) << " x" << b.instances;
      if (b.tail_instances) os << "+" << b.tail_instances;
      os << " steps=" << b.steps << ']';
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace apsim
