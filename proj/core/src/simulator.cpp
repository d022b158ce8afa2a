#include "apsim/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "apsim/errors.hpp"

namespace apsim {

double CostReport::energy_share(CostCategory c) const {
  return energy_J > 0 ? category(c).energy_J / energy_J : 0.0;
}

double CostReport::latency_share(CostCategory c) const {
  return latency_s > 0 ? category(c).latency_s / latency_s : 0.0;
}

namespace {

std::size_t idx(CostCategory c) { return static_cast<std::size_t>(c); }

std::string hw_label(const HardwareConfig& hw) {
  std::ostringstream os;
  os << to_string(hw.mode) << '-' << to_string(hw.variant);
  return os.str();
}

}  // namespace

CostReport cost_plan(const ExecutionPlan& plan, const SimConfig& cfg) {
  CostReport r;
  r.model = plan.model;
  r.tech = cfg.tech.name;
  r.hw = hw_label(plan.hw);
  r.voltage = cfg.tech.v_dd;
  r.macs = plan.total_macs();
  r.ops = plan.total_ops();
  r.steps = plan.total_steps();
  r.utilization = plan.gemm_utilization();
  r.area_mm2 = area_of(static_cast<double>(plan.hw.total_cells()), cfg.tech);

  for (const auto& lp : plan.layers) {
    LayerCost lc;
    lc.name = lp.name;
    lc.kind = lp.kind;
    lc.bits = lp.bits;
    lc.fold_factor = lp.fold_factor;
    std::array<double, kCostCategories> compute_by_cat{};
    for (const auto& b : lp.blocks) {
      const auto full = analytic_trace(b.op, b.params, plan.hw.variant);
      double energy = static_cast<double>(b.instances) * energy_of(full, cfg.tech);
      double step_s = latency_of(full, cfg.tech, cfg.clock);
      if (b.tail_instances > 0) {
        const auto tail = analytic_trace(b.op, b.tail, plan.hw.variant);
        energy += static_cast<double>(b.tail_instances) * energy_of(tail, cfg.tech);
        if (b.instances == 0) step_s = latency_of(tail, cfg.tech, cfg.clock);
      }
      const double block_s = static_cast<double>(b.steps) * step_s;
      compute_by_cat[idx(b.category)] += block_s;
      r.breakdown[idx(b.category)].energy_J += energy;
      lc.compute_s += block_s;
      lc.energy_J += energy;
    }
    lc.transfer_s = cfg.net.transfer_latency(lp.traffic.busiest_cluster_bits);
    lc.latency_s = std::max(lc.compute_s, lc.transfer_s);
    for (std::size_t c = 0; c < kCostCategories; ++c) r.breakdown[c].latency_s += compute_by_cat[c];
    r.breakdown[idx(CostCategory::data_movement)].latency_s += lc.latency_s - lc.compute_s;

    const double move_J = energy_of(lp.reshape.cells, cfg.tech) + cfg.net.transfer_energy(lp.traffic.total_bits());
    r.breakdown[idx(CostCategory::data_movement)].energy_J += move_J;
    lc.energy_J += move_J;

    r.energy_J += lc.energy_J;
    r.latency_s += lc.latency_s;
    r.layers.push_back(std::move(lc));
  }

  double e_sum = 0;
  double t_sum = 0;
  for (const auto& c : r.breakdown) {
    e_sum += c.energy_J;
    t_sum += c.latency_s;
  }
  const auto drift = [](double a, double b) { return std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(b)); };
  if (drift(e_sum, r.energy_J) || drift(t_sum, r.latency_s)) {
    throw AccountingError("cost breakdown does not add up to the totals");
  }

  r.edp_Js = r.energy_J * r.latency_s;
  if (r.latency_s > 0 && r.energy_J > 0) {
    r.gops = static_cast<double>(r.ops) / r.latency_s / 1e9;
    r.gops_per_w = r.gops / (r.energy_J / r.latency_s);
    r.gops_per_w_per_mm2 = r.area_mm2 > 0 ? r.gops_per_w / r.area_mm2 : 0.0;
  }
  return r;
}

CostReport simulate(const ModelSpec& model, const PrecisionConfig& precision, const SimConfig& cfg) {
  const auto p = plan(model, precision, cfg.hw);
  auto r = cost_plan(p, cfg);
  r.precision = precision.name;
  if (!model.layers.empty()) r.average_bits = average_precision(precision);
  return r;
}

PeakMetrics peak_metrics(unsigned bits, const SimConfig& cfg) {
  if (bits < 1 || bits > kMaxPeakBits) {
    throw UsageError("peak metrics support 1.." + std::to_string(kMaxPeakBits) + " bits");
  }
  const auto& hw = cfg.hw;
  OpParams p;
  p.m = bits;
  p.l = 2 * hw.ap_rows;
  const auto mul = analytic_trace(OpKind::multiplication, p, hw.variant);

  PeakMetrics pm;
  pm.bits = bits;
  pm.step_s = latency_of(mul, cfg.tech, cfg.clock);
  const double caps = static_cast<double>(hw.total_caps());
  const double lanes = caps * static_cast<double>(hw.ap_rows);
  // Buffering: every double-width product goes over the mesh and into a MAP.
  const double buffer_bits = lanes * 2.0 * bits;
  EventTrace map_writes;
  map_writes.n_write = 1;
  map_writes.cells_written = static_cast<std::uint64_t>(buffer_bits);
  pm.step_energy_J = caps * energy_of(mul, cfg.tech) + energy_of(map_writes, cfg.tech) +
                     cfg.net.transfer_energy(buffer_bits);
  const double ops = 2.0 * lanes;
  pm.gops = ops / pm.step_s / 1e9;
  pm.gops_per_w = ops / pm.step_energy_J / 1e9;
  const double area = area_of(static_cast<double>(hw.total_cells()), cfg.tech);
  pm.gops_per_w_per_mm2 = area > 0 ? pm.gops_per_w / area : 0.0;
  return pm;
}

std::vector<MixedPrecisionRow> evaluate_mixed_precision(const ModelSpec& model,
                                                        const std::vector<PrecisionConfig>& configs,
                                                        const SimConfig& cfg,
                                                        std::optional<PrecisionConfig> baseline) {
  const auto base_cfg = baseline ? *baseline : fixed_precision(8);
  const auto base = simulate(model, base_cfg, cfg);
  std::vector<MixedPrecisionRow> rows;
  rows.reserve(configs.size());
  for (const auto& c : configs) {
    const auto r = simulate(model, c, cfg);
    MixedPrecisionRow row;
    row.name = c.name;
    row.average_bits = average_precision(c);
    row.energy_J = r.energy_J;
    row.latency_s = r.latency_s;
    row.edp_Js = r.edp_Js;
    row.energy_factor = base.energy_J / r.energy_J;
    row.normalized_latency = r.latency_s / base.latency_s;
    row.normalized_edp = r.edp_Js / base.edp_Js;
    row.top1_accuracy = c.top1_accuracy;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> default_ratio_targets() { return {80.9, 72.9, 68.9, 66.6, 65.0, 63.9, 63.1}; }

CalibrationResult calibrate_compare_energy(const ModelSpec& model, const std::vector<unsigned>& bits,
                                           const std::vector<double>& targets, const SimConfig& sram,
                                           const TechProfile& reram) {
  if (bits.empty() || bits.size() != targets.size())
    throw UsageError("calibration needs one target ratio per precision");
  for (double t : targets)
    if (!(t > 0)) throw UsageError("calibration targets must be positive");

  // Energy is affine in e_compare_cell: E = a + e * c. Two runs per point
  // give both coefficients for each technology.
  struct Affine {
    double a = 0, c = 0;
    [[nodiscard]] double at(double e) const { return a + e * c; }
  };
  constexpr double kProbe = 1e-15;
  const auto fit_line = [&](const TechProfile& tech, unsigned b) {
    SimConfig cfg = sram;
    cfg.tech = tech;
    cfg.tech.e_compare_cell = 0;
    const double a = simulate(model, fixed_precision(b), cfg).energy_J;
    cfg.tech.e_compare_cell = kProbe;
    const double e1 = simulate(model, fixed_precision(b), cfg).energy_J;
    return Affine{a, (e1 - a) / kProbe};
  };
  std::vector<Affine> s_lines, r_lines;
  for (unsigned b : bits) {
    s_lines.push_back(fit_line(sram.tech, b));
    r_lines.push_back(fit_line(reram, b));
  }
  const auto cost = [&](double log_e) {
    const double e = std::exp(log_e);
    double sum = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
      const double d = std::log(r_lines[i].at(e) / s_lines[i].at(e)) - std::log(targets[i]);
      sum += d * d;
    }
    return sum;
  };

  // Coarse scan over six decades, then golden-section refinement.
  double lo = std::log(1e-18), hi = std::log(1e-12);
  constexpr int kGrid = 240;
  int best = 0;
  double best_cost = cost(lo);
  for (int k = 1; k <= kGrid; ++k) {
    const double c = cost(lo + (hi - lo) * k / kGrid);
    if (c < best_cost) best_cost = c, best = k;
  }
  const double step = (hi - lo) / kGrid;
  double a = lo + step * std::max(best - 1, 0), b = lo + step * std::min(best + 1, kGrid);
  const double phi = (std::sqrt(5.0) - 1) / 2;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = cost(x1), f2 = cost(x2);
  for (int it = 0; it < 100; ++it) {
    if (f1 < f2) {
      b = x2, x2 = x1, f2 = f1;
      x1 = b - phi * (b - a), f1 = cost(x1);
    } else {
      a = x1, x1 = x2, f1 = f2;
      x2 = a + phi * (b - a), f2 = cost(x2);
    }
  }

  CalibrationResult out;
  const double x = (a + b) / 2;
  out.e_compare_cell = std::exp(x);
  out.rms_log_error = std::sqrt(cost(x) / static_cast<double>(bits.size()));
  out.bits = bits;
  out.targets = targets;
  for (std::size_t i = 0; i < bits.size(); ++i)
    out.ratios.push_back(r_lines[i].at(out.e_compare_cell) / s_lines[i].at(out.e_compare_cell));
  return out;
}

std::size_t SweepSpec::size() const {
  return models.size() * precisions.size() * techs.size() * voltages.size() * modes.size();
}

namespace {

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) {
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

std::vector<std::string> expand_precisions(const std::vector<std::string>& vals) {
  std::vector<std::string> out;
  for (const auto& v : vals) {
    const auto dots = v.find("..");
    if (v.rfind("fixed:", 0) == 0 && dots != std::string::npos) {
      unsigned lo = 0;
      unsigned hi = 0;
      try {
        lo = static_cast<unsigned>(std::stoul(v.substr(6, dots - 6)));
        hi = static_cast<unsigned>(std::stoul(v.substr(dots + 2)));
      } catch (const std::exception&) {
        throw ConfigError("bad precision range '" + v + "'");
      }
      if (lo < 1 || hi < lo || hi > 16) throw ConfigError("bad precision range '" + v + "'");
      for (unsigned b = lo; b <= hi; ++b) out.push_back("fixed:" + std::to_string(b));
    } else {
      out.push_back(v);
    }
  }
  return out;
}

}  // namespace

void apply_axis(SweepSpec& spec, const std::string& axis) {
  const auto eq = axis.find('=');
  if (eq == std::string::npos) throw ConfigError("axis must be name=v1,v2,...: '" + axis + "'");
  const auto name = axis.substr(0, eq);
  const auto vals = split_csv(axis.substr(eq + 1));
  if (vals.empty()) throw ConfigError("axis '" + name + "' has no values");
  if (name == "model") {
    spec.models = vals;
  } else if (name == "precision") {
    spec.precisions = expand_precisions(vals);
  } else if (name == "tech") {
    spec.techs = vals;
  } else if (name == "voltage") {
    spec.voltages.clear();
    for (const auto& v : vals) {
      try {
        spec.voltages.push_back(std::stod(v));
      } catch (const std::exception&) {
        throw ConfigError("bad voltage '" + v + "'");
      }
    }
  } else if (name == "hw") {
    spec.modes.clear();
    for (const auto& v : vals) spec.modes.push_back(parse_hw_mode(v));
  } else {
    throw ConfigError("unknown sweep axis '" + name + "' (model, precision, tech, voltage, hw)");
  }
}

void sweep(const SweepSpec& spec, const std::function<void(const CostReport&)>& sink) {
  struct Point {
    std::string model, precision, tech;
    double voltage;
    HwMode mode;
  };
  std::vector<Point> points;
  points.reserve(spec.size());
  for (const auto& m : spec.models)
    for (const auto& p : spec.precisions)
      for (const auto& t : spec.techs)
        for (double v : spec.voltages)
          for (auto mode : spec.modes) points.push_back({m, p, t, v, mode});

  // Validate every axis value before starting the workers.
  std::map<std::string, ModelSpec> models;
  for (const auto& m : spec.models) models.emplace(m, resolve_model(m));
  std::map<std::string, PrecisionConfig> precisions;
  for (const auto& p : spec.precisions) precisions.emplace(p, resolve_precision(p));
  std::map<std::pair<std::string, double>, TechProfile> techs;
  for (const auto& t : spec.techs) {
    const auto base = resolve_profile(t);
    for (double v : spec.voltages) techs.emplace(std::pair{t, v}, apply_voltage(base, v));
  }

  std::vector<std::optional<CostReport>> results(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::condition_variable cv;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= points.size()) return;
      const auto& pt = points[i];
      try {
        SimConfig cfg;
        cfg.hw.mode = pt.mode;
        cfg.hw.variant = spec.variant;
        cfg.tech = techs.at({pt.tech, pt.voltage});
        auto r = simulate(models.at(pt.model), precisions.at(pt.precision), cfg);
        std::lock_guard lock(mu);
        results[i] = std::move(r);
      } catch (...) {
        std::lock_guard lock(mu);
        errors[i] = std::current_exception();
      }
      cv.notify_all();
    }
  };

  unsigned n = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(1, points.size())));
  std::vector<std::thread> pool;
  pool.reserve(n);
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);

  std::exception_ptr first_error;
  try {
    for (std::size_t i = 0; i < points.size(); ++i) {
      std::unique_lock lock(mu);
      cv.wait(lock, [&] { return results[i].has_value() || errors[i]; });
      if (errors[i]) {
        first_error = errors[i];
        break;
      }
      auto r = std::move(*results[i]);
      results[i].reset();
      lock.unlock();
      sink(r);
    }
  } catch (...) {
    first_error = std::current_exception();
  }
  if (first_error) next = points.size();  // stop handing out work
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<CostReport> sweep(const SweepSpec& spec) {
  std::vector<CostReport> out;
  out.reserve(spec.size());
  sweep(spec, [&](const CostReport& r) { out.push_back(r); });
  return out;
}

}  // namespace apsim
