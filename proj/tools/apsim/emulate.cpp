#include "emulate.hpp"

#include <algorithm>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "apsim/ap_ops.hpp"
#include "apsim/errors.hpp"

namespace apsim::cli {

namespace {

using Vec = std::vector<std::int64_t>;

Vec draw(std::mt19937_64& rng, std::size_t n, std::int64_t lo, std::int64_t hi) {
  std::uniform_int_distribution<std::int64_t> d(lo, hi);
  Vec v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

// Direct computation of what the array should produce.
Vec expected(OpKind op, const EmulateOptions& o, const Vec& a, const Vec& b) {
  Vec out;
  switch (op) {
    case OpKind::addition:
      for (std::size_t n = 0; n < a.size(); ++n) out.push_back(a[n] + b[n]);
      break;
    case OpKind::multiplication:
      for (std::size_t n = 0; n < a.size(); ++n) out.push_back(a[n] * b[n]);
      break;
    case OpKind::reduction: {
      std::int64_t s = 0;
      for (auto x : a) s += x;
      out.push_back(s);
      break;
    }
    case OpKind::matmat:
      for (std::uint64_t r = 0; r < o.i; ++r)
        for (std::uint64_t c = 0; c < o.u; ++c) {
          std::int64_t acc = 0;
          for (std::uint64_t t = 0; t < o.j; ++t) acc += a[r * o.j + t] * b[t * o.u + c];
          out.push_back(acc);
        }
      break;
    case OpKind::relu:
      for (auto x : a) out.push_back(std::max<std::int64_t>(x, 0));
      break;
    case OpKind::max_pool:
    case OpKind::avg_pool:
      for (std::uint64_t w = 0; w < o.k; ++w) {
        const auto first = a.begin() + static_cast<std::ptrdiff_t>(w * o.s);
        const auto last = first + static_cast<std::ptrdiff_t>(o.s);
        if (op == OpKind::max_pool) {
          out.push_back(*std::max_element(first, last));
        } else {
          std::int64_t s = 0;
          for (auto it = first; it != last; ++it) s += *it;
          out.push_back(s / static_cast<std::int64_t>(o.s));
        }
      }
      break;
  }
  return out;
}

struct Instance {
  OpResult result;
  Vec want;
  OpParams params;
};

Instance run_once(const EmulateOptions& o, std::mt19937_64& rng) {
  const std::int64_t top = (std::int64_t{1} << o.m) - 1;
  Instance in;
  in.params.m = o.m;
  Vec a;
  Vec b;
  switch (o.op) {
    case OpKind::addition:
    case OpKind::multiplication: {
      if (o.l < 2 || o.l % 2 != 0) throw UsageError("--l must be an even word count of at least 2");
      a = draw(rng, o.l / 2, 0, top);
      b = draw(rng, o.l / 2, 0, top);
      in.params.l = o.l;
      in.result = o.op == OpKind::addition ? inplace_add(a, b, o.m, o.variant) : multiply(a, b, o.m, o.variant);
      break;
    }
    case OpKind::reduction:
      a = draw(rng, o.l, 0, top);
      in.params.l = o.l;
      in.result = reduce(a, o.m, o.variant);
      break;
    case OpKind::matmat: {
      a = draw(rng, o.i * o.j, 0, top);
      b = draw(rng, o.j * o.u, 0, top);
      IntMatrix km(o.i, o.j);
      km.data = a;
      IntMatrix pm(o.j, o.u);
      pm.data = b;
      in.params.i = o.i;
      in.params.j = o.j;
      in.params.u = o.u;
      in.result = matmat(km, pm, o.m, o.variant);
      break;
    }
    case OpKind::relu:
      a = draw(rng, o.l, -(top + 1) / 2, top / 2);
      in.params.l = o.l;
      in.result = relu(a, o.m, o.variant);
      break;
    case OpKind::max_pool:
    case OpKind::avg_pool:
      a = draw(rng, o.s * o.k, 0, top);
      in.params.s = o.s;
      in.params.k = o.k;
      in.result = o.op == OpKind::max_pool ? max_pool(a, o.s, o.k, o.m, o.variant)
                                           : avg_pool(a, o.s, o.k, o.m, o.variant);
      break;
  }
  in.want = expected(o.op, o, a, b);
  return in;
}

void print_trace(std::ostream& out, const char* label, const EventTrace& t) {
  out << "  " << label << ": compare=" << t.n_compare << " write=" << t.n_write << " read=" << t.n_read
      << " transfer=" << t.n_transfer << " cells_compared=" << t.active_cells_compared
      << " cells_read=" << t.cells_read << " cells_written=" << t.cells_written << '\n';
}

}  // namespace

unsigned run_emulate(const EmulateOptions& opt, std::ostream& out) {
  if (opt.m < 1 || opt.m > 16) throw UsageError("--m must be in 1..16");
  if (opt.trials == 0) throw UsageError("--trials must be at least 1");
  std::mt19937_64 rng(opt.seed);
  unsigned failures = 0;
  for (unsigned t = 0; t < opt.trials; ++t) {
    const auto in = run_once(opt, rng);
    const EventTrace formula = analytic_trace(opt.op, in.params, opt.variant);
    const EventTrace& seen = in.result.trace;
    const bool values_ok = in.result.values == in.want;
    // Written cells depend on the data, so only the schedule-determined
    // counts are compared.
    const bool trace_ok = seen.n_compare == formula.n_compare && seen.n_write == formula.n_write &&
                          seen.n_read == formula.n_read && seen.n_transfer == formula.n_transfer &&
                          seen.active_cells_compared == formula.active_cells_compared &&
                          seen.cells_read == formula.cells_read;
    if (!values_ok || !trace_ok) ++failures;
    if (opt.verbose || t == 0 || !values_ok || !trace_ok) {
      out << to_string(opt.op) << " variant=" << to_string(opt.variant) << " m=" << opt.m << " trial=" << t
          << " rows=" << in.result.geometry.rows << " cols=" << in.result.geometry.cols
          << " cycles=" << seen.total_stages() << " closed_form=" << in.result.analytic_cycles
          << " values=" << (values_ok ? "match" : "MISMATCH") << " trace=" << (trace_ok ? "match" : "MISMATCH")
          << '\n';
      print_trace(out, "emulated   ", seen);
      print_trace(out, "closed form", formula);
    }
  }
  out << (failures == 0 ? "OK" : "FAILED") << ": " << opt.trials - failures << '/' << opt.trials
      << " instances agree\n";
  return failures;
}

}  // namespace apsim::cli
