#include "refsyn/abstraction.hpp"

#include "refsyn/error.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>

namespace refsyn {

// ---------------------------------------------------------------------------
// Box, AffineMode, System

Box::Box(std::vector<double> lower, std::vector<double> upper)
    : lo(std::move(lower)), hi(std::move(upper)) {
  if (lo.size() != hi.size())
    throw UsageError("box bounds differ in dimension");
}

double Box::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < dim(); ++i)
    v *= hi[i] - lo[i];
  return v;
}

bool Box::contains(std::span<const double> x) const {
  if (x.size() != dim())
    throw UsageError("point dimension does not match the box");
  for (std::size_t i = 0; i < dim(); ++i)
    if (x[i] < lo[i] || x[i] > hi[i])
      return false;
  return true;
}

bool Box::contains(const Box &inner) const {
  for (std::size_t i = 0; i < dim(); ++i)
    if (inner.lo[i] < lo[i] || inner.hi[i] > hi[i])
      return false;
  return true;
}

bool Box::intersects(const Box &other) const {
  for (std::size_t i = 0; i < dim(); ++i)
    if (other.lo[i] > hi[i] || other.hi[i] < lo[i])
      return false;
  return true;
}

std::size_t Box::longest_axis() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < dim(); ++i)
    if (width(i) > width(best))
      best = i;
  return best;
}

std::vector<double> AffineMode::apply(std::span<const double> x,
                                      std::span<const double> d) const {
  std::vector<double> out(dim);
  for (std::size_t r = 0; r < dim; ++r) {
    double acc = k[r];
    for (std::size_t j = 0; j < dim; ++j)
      acc += a[r * dim + j] * x[j];
    for (std::size_t j = 0; j < dist_dim; ++j)
      acc += e[r * dist_dim + j] * d[j];
    out[r] = acc;
  }
  return out;
}

void AffineMode::validate() const {
  if (a.size() != dim * dim || k.size() != dim || e.size() != dim * dist_dim)
    throw ConfigError("affine mode: matrix sizes do not match its dimension");
  auto finite = [](const std::vector<double> &v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  if (!finite(a) || !finite(k) || !finite(e))
    throw ConfigError("affine mode: non-finite coefficient");
}

void System::validate() const {
  const std::size_t n = domain.dim();
  if (n == 0)
    throw ConfigError("system: empty domain");
  for (std::size_t i = 0; i < n; ++i)
    if (!(domain.lo[i] < domain.hi[i]))
      throw ConfigError("system: domain bounds must satisfy lower < upper");
  if (grid.size() != n)
    throw ConfigError("system: grid needs one cell count per axis");
  for (auto g : grid)
    if (g == 0)
      throw ConfigError("system: grid counts must be positive");
  if (modes.empty())
    throw ConfigError("system: at least one mode is required");
  for (const auto &m : modes) {
    m.validate();
    if (m.dim != n || m.dist_dim != disturbance.dim())
      throw ConfigError("system: mode dimensions do not match the domain");
  }
  for (std::size_t i = 0; i < disturbance.dim(); ++i)
    if (disturbance.lo[i] > disturbance.hi[i])
      throw ConfigError("system: disturbance bounds reversed");
  for (const auto &[name, box] : propositions)
    if (box.dim() != n)
      throw ConfigError("system: proposition '" + name +
                        "' has the wrong dimension");
}

namespace {

// Sum of terms with an exact record of the rounding error discarded so far.
struct ErrSum {
  double value = 0.0, err = 0.0;
  void add(double t) {
    const double s = value + t;
    const double bb = s - value;
    err += std::fabs((value - (s - bb)) + (t - bb));
    value = s;
  }
  void add_product(double a, double x) {
    const double p = a * x;
    err += std::fabs(std::fma(a, x, -p));
    add(p);
  }
};

// K + E * dist as an interval per row, rounded outward.
void disturbed_offset(const AffineMode &mode, const Box &dist,
                      std::vector<double> &lo, std::vector<double> &hi) {
  lo.assign(mode.dim, 0.0);
  hi.assign(mode.dim, 0.0);
  const double scale =
      1.0 + static_cast<double>(4 * mode.dist_dim + 4) * DBL_EPSILON;
  for (std::size_t r = 0; r < mode.dim; ++r) {
    ErrSum l, h;
    l.add(mode.k[r]);
    h.add(mode.k[r]);
    for (std::size_t j = 0; j < mode.dist_dim; ++j) {
      const double c = mode.e[r * mode.dist_dim + j];
      l.add_product(c, c >= 0.0 ? dist.lo[j] : dist.hi[j]);
      h.add_product(c, c >= 0.0 ? dist.hi[j] : dist.lo[j]);
    }
    lo[r] = kernels::widen_down(l.value, l.err * scale);
    hi[r] = kernels::widen_up(h.value, h.err * scale);
  }
}

} // namespace

Box reach(const Box &cell, const AffineMode &mode, const Box &dist) {
  std::vector<double> olo, ohi;
  disturbed_offset(mode, dist, olo, ohi);
  Box out(std::vector<double>(mode.dim), std::vector<double>(mode.dim));
  kernels::BoxesView in{cell.lo.data(), cell.hi.data(), mode.dim, 1, 1};
  kernels::BoxesOut o{out.lo.data(), out.hi.data(), 1};
  kernels::affine_image(mode.a, olo, ohi, in, o);
  return out;
}

// ---------------------------------------------------------------------------
// Partition

Partition::Partition(const Box &domain, const std::vector<std::size_t> &grid)
    : domain_(domain), grid_(grid) {
  if (grid.size() != domain.dim())
    throw UsageError("partition: grid dimension mismatch");
  std::size_t total = 1;
  for (auto g : grid)
    total *= g;
  cells_.resize(total + 1);
  reserve_soa(total + 1);
  for (std::size_t c = 0; c < total; ++c) {
    std::vector<double> lo(dim()), hi(dim());
    std::size_t rem = c;
    // axis 0 varies fastest
    for (std::size_t d = 0; d < dim(); ++d) {
      const std::size_t idx = rem % grid[d];
      rem /= grid[d];
      const double w = domain.width(d) / static_cast<double>(grid[d]);
      lo[d] = domain.lo[d] + w * static_cast<double>(idx);
      hi[d] = idx + 1 == grid[d] ? domain.hi[d]
                                 : domain.lo[d] + w * static_cast<double>(idx + 1);
    }
    auto &info = cells_[c];
    info.box = Box(std::move(lo), std::move(hi));
    info.live = true;
    info.leaf = static_cast<std::uint32_t>(tree_.size());
    tree_.push_back(TreeNode{-1, 0.0, 0, 0, static_cast<StateId>(c)});
    roots_.push_back(info.leaf);
    store_soa(static_cast<StateId>(c));
  }
  live_cells_ = total;
  sink_ = static_cast<StateId>(total);
  store_soa(sink_);
}

void Partition::reserve_soa(std::size_t n) {
  if (n <= soa_stride_)
    return;
  const std::size_t stride = std::max<std::size_t>(n, 2 * soa_stride_);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> lo(dim() * stride, nan), hi(dim() * stride, nan);
  for (std::size_t d = 0; d < dim(); ++d)
    for (std::size_t c = 0; c < soa_stride_; ++c) {
      lo[d * stride + c] = soa_lo_[d * soa_stride_ + c];
      hi[d * stride + c] = soa_hi_[d * soa_stride_ + c];
    }
  soa_lo_ = std::move(lo);
  soa_hi_ = std::move(hi);
  soa_stride_ = stride;
}

void Partition::store_soa(StateId q) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const bool cell = is_cell(q);
  for (std::size_t d = 0; d < dim(); ++d) {
    soa_lo_[d * soa_stride_ + q] = cell ? cells_[q].box.lo[d] : nan;
    soa_hi_[d * soa_stride_ + q] = cell ? cells_[q].box.hi[d] : nan;
  }
}

bool Partition::is_cell(StateId q) const {
  return q < cells_.size() && cells_[q].live;
}

const Box &Partition::cell(StateId q) const {
  if (!is_cell(q))
    throw UsageError("partition: " + std::to_string(q) + " is not a cell");
  return cells_[q].box;
}

std::size_t Partition::depth(StateId q) const {
  if (!is_cell(q))
    throw UsageError("partition: " + std::to_string(q) + " is not a cell");
  return cells_[q].depth;
}

std::vector<StateId> Partition::cells() const {
  std::vector<StateId> out;
  for (StateId q = 0; q < cells_.size(); ++q)
    if (cells_[q].live)
      out.push_back(q);
  return out;
}

std::optional<StateId> Partition::locate(std::span<const double> x) const {
  if (!domain_.contains(x))
    return std::nullopt;
  std::size_t root = 0, scale = 1;
  for (std::size_t d = 0; d < dim(); ++d) {
    const double w = domain_.width(d) / static_cast<double>(grid_[d]);
    auto idx = static_cast<std::size_t>((x[d] - domain_.lo[d]) / w);
    idx = std::min(idx, grid_[d] - 1);
    // the division can land one cell off near a grid line
    auto line = [&](std::size_t i) { return domain_.lo[d] + w * static_cast<double>(i); };
    while (idx > 0 && x[d] < line(idx))
      --idx;
    while (idx + 1 < grid_[d] && x[d] >= line(idx + 1))
      ++idx;
    root += idx * scale;
    scale *= grid_[d];
  }
  std::uint32_t node = roots_[root];
  while (tree_[node].axis >= 0) {
    const auto &t = tree_[node];
    node = x[static_cast<std::size_t>(t.axis)] < t.mid ? t.lower : t.upper;
  }
  return tree_[node].state;
}

void Partition::split(StateId q, StateId child) {
  if (q == sink_)
    throw UsageError("the sink state cannot be split");
  if (!is_cell(q))
    throw UsageError("split: " + std::to_string(q) + " is not a cell");
  if (child != cells_.size())
    throw UsageError("split: child id must be the next free id");
  CellInfo &parent = cells_[q];
  const std::size_t axis = parent.box.longest_axis();
  const double mid = 0.5 * (parent.box.lo[axis] + parent.box.hi[axis]);

  Box upper = parent.box;
  upper.lo[axis] = mid;
  parent.box.hi[axis] = mid;
  const std::uint32_t old_leaf = parent.leaf;
  const auto lower_node = static_cast<std::uint32_t>(tree_.size());
  tree_.push_back(TreeNode{-1, 0.0, 0, 0, q});
  const auto upper_node = static_cast<std::uint32_t>(tree_.size());
  tree_.push_back(TreeNode{-1, 0.0, 0, 0, child});
  tree_[old_leaf].axis = static_cast<int>(axis);
  tree_[old_leaf].mid = mid;
  tree_[old_leaf].lower = lower_node;
  tree_[old_leaf].upper = upper_node;

  const std::uint32_t depth = parent.depth + 1;
  parent.depth = depth;
  parent.leaf = lower_node;
  CellInfo info;
  info.box = std::move(upper);
  info.depth = depth;
  info.leaf = upper_node;
  info.live = true;
  cells_.push_back(std::move(info));
  ++live_cells_;
  reserve_soa(cells_.size());
  store_soa(q);
  store_soa(child);
}

kernels::BoxesView Partition::view() const {
  return kernels::BoxesView{soa_lo_.data(), soa_hi_.data(), dim(),
                            cells_.size(), soa_stride_};
}

// ---------------------------------------------------------------------------
// Labels

void label_cells(Fts &fts, const Partition &part,
                 const std::map<std::string, Box> &props) {
  for (const auto &[name, box] : props) {
    fts.define_label(name);
    for (StateId q = 0; q < part.id_bound(); ++q) {
      if (!fts.is_live(q))
        continue;
      fts.set_label(name, q, part.is_cell(q) && box.contains(part.cell(q)));
    }
  }
}

// ---------------------------------------------------------------------------
// Abstraction

Abstraction::Abstraction(System system)
    : system_(std::move(system)),
      partition_((system_.validate(), system_.domain), system_.grid),
      fts_(system_.modes.size()) {
  const std::size_t n = partition_.id_bound();
  for (std::size_t i = 0; i < n; ++i)
    fts_.add_state();

  // batched reach of every cell under each mode
  reach_.assign(n, std::vector<Box>(system_.modes.size()));
  const auto view = partition_.view();
  const std::size_t cells = n - 1; // sink is last
  std::vector<double> out_lo(partition_.dim() * cells), out_hi(out_lo.size());
  std::vector<double> olo, ohi;
  for (std::size_t u = 0; u < system_.modes.size(); ++u) {
    disturbed_offset(system_.modes[u], system_.disturbance, olo, ohi);
    kernels::BoxesView in{view.lo, view.hi, view.dim, cells, view.stride};
    kernels::BoxesOut out{out_lo.data(), out_hi.data(), cells};
    kernels::affine_image(system_.modes[u].a, olo, ohi, in, out);
    for (std::size_t c = 0; c < cells; ++c) {
      Box r(std::vector<double>(view.dim), std::vector<double>(view.dim));
      for (std::size_t d = 0; d < view.dim; ++d) {
        r.lo[d] = out_lo[d * cells + c];
        r.hi[d] = out_hi[d * cells + c];
      }
      reach_[c][u] = std::move(r);
    }
  }
  std::vector<StateId> hits;
  for (StateId q = 0; q < cells; ++q)
    for (ActionId u = 0; u < system_.modes.size(); ++u) {
      targets(reach_[q][u], hits);
      for (StateId p : hits)
        fts_.add_transition({q, u, p});
    }
  for (ActionId u = 0; u < system_.modes.size(); ++u)
    fts_.add_transition({sink(), u, sink()});
  label_cells(fts_, partition_, system_.propositions);
}

const Box &Abstraction::reach_box(StateId q, ActionId u) const {
  if (!partition_.is_cell(q) || u >= system_.modes.size())
    throw UsageError("reach_box: no such cell/mode");
  return reach_[q][u];
}

void Abstraction::targets(const Box &r, std::vector<StateId> &out) const {
  out.clear();
  std::vector<std::uint32_t> hits;
  kernels::intersecting(r.lo, r.hi, partition_.view(), hits);
  out.assign(hits.begin(), hits.end());
  if (!partition_.domain().contains(r))
    out.push_back(sink());
}

void Abstraction::compute_outgoing(StateId q, std::vector<Transition> &out) {
  std::vector<StateId> hits;
  for (ActionId u = 0; u < system_.modes.size(); ++u) {
    reach_[q][u] = reach(partition_.cell(q), system_.modes[u], system_.disturbance);
    targets(reach_[q][u], hits);
    for (StateId p : hits)
      out.push_back({q, u, p});
  }
}

void Abstraction::relabel(StateId q) {
  for (const auto &[name, box] : system_.propositions)
    fts_.set_label(name, q, box.contains(partition_.cell(q)));
}

StateId Abstraction::split(StateId q) {
  if (q == sink())
    throw UsageError("the sink state cannot be split");
  if (!partition_.is_cell(q))
    throw UsageError("split: " + std::to_string(q) + " is not a cell");

  // (p, u) pairs whose reach box met the old cell
  std::vector<std::pair<StateId, ActionId>> preds;
  for (const auto &t : fts_.list().triples())
    if (t.to == q && t.from != q)
      preds.emplace_back(t.from, t.action);

  const StateId child = fts_.split_state(q);
  partition_.split(q, child);
  reach_.emplace_back(system_.modes.size());

  std::vector<Transition> fresh;
  compute_outgoing(q, fresh);
  compute_outgoing(child, fresh);
  const Box &qb = partition_.cell(q);
  const Box &cb = partition_.cell(child);
  for (auto [p, u] : preds) {
    const Box &r = reach_[p][u];
    if (r.intersects(qb))
      fresh.push_back({p, u, q});
    if (r.intersects(cb))
      fresh.push_back({p, u, child});
  }
  for (const auto &t : fresh)
    fts_.add_transition(t);
  relabel(q);
  relabel(child);
  return child;
}

Fts Abstraction::rebuild() const {
  Fts out(system_.modes.size());
  const std::size_t n = partition_.id_bound();
  for (std::size_t i = 0; i < n; ++i)
    out.add_state();
  std::vector<StateId> hits;
  for (StateId q = 0; q < n; ++q) {
    if (!partition_.is_cell(q))
      continue;
    for (ActionId u = 0; u < system_.modes.size(); ++u) {
      const Box r = reach(partition_.cell(q), system_.modes[u], system_.disturbance);
      targets(r, hits);
      for (StateId p : hits)
        out.add_transition({q, u, p});
    }
  }
  for (ActionId u = 0; u < system_.modes.size(); ++u)
    out.add_transition({sink(), u, sink()});
  label_cells(out, partition_, system_.propositions);
  return out;
}

double Abstraction::volume(const Bitset &states) const {
  double v = 0.0;
  states.for_each([&](StateId q) {
    if (partition_.is_cell(q))
      v += partition_.cell(q).volume();
  });
  return v;
}

} // namespace refsyn
