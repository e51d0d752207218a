#pragma once

// Rectangular partitions of a box domain, interval reachability for
// discrete-time affine modes with box disturbances, and the finite
// transition system they induce.

#include "refsyn/fts.hpp"
#include "refsyn/kernels.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace refsyn {

struct Box {
  std::vector<double> lo, hi;

  Box() = default;
  Box(std::vector<double> lower, std::vector<double> upper);

  std::size_t dim() const { return lo.size(); }
  double volume() const;
  double width(std::size_t axis) const { return hi[axis] - lo[axis]; }
  bool contains(std::span<const double> x) const;
  bool contains(const Box &inner) const;
  bool intersects(const Box &other) const; // closed boxes
  /// Longest axis; ties go to the lowest index.
  std::size_t longest_axis() const;
  friend bool operator==(const Box &, const Box &) = default;
};

/// x+ = A x + K + E d with d in the disturbance box.
struct AffineMode {
  std::size_t dim = 0;
  std::size_t dist_dim = 0;
  std::vector<double> a; // dim x dim, row-major
  std::vector<double> k; // dim
  std::vector<double> e; // dim x dist_dim, row-major

  std::vector<double> apply(std::span<const double> x,
                            std::span<const double> d) const;
  void validate() const;
};

/// Everything the abstraction needs to know about the concrete system.
struct System {
  Box domain;
  std::vector<std::size_t> grid; // initial cells per axis
  std::vector<AffineMode> modes;
  Box disturbance; // may be zero-dimensional
  std::map<std::string, Box> propositions;
  std::vector<std::string> axis_names;

  void validate() const;
};

/// Tight enclosure of { A x + K + E d : x in cell, d in dist }.
Box reach(const Box &cell, const AffineMode &mode, const Box &dist);

/// Nonuniform rectangular partition. Cell ids coincide with Fts state ids;
/// the sink (outside the domain) has its own id and no box.
class Partition {
public:
  Partition(const Box &domain, const std::vector<std::size_t> &grid);

  std::size_t dim() const { return domain_.dim(); }
  const Box &domain() const { return domain_; }
  StateId sink() const { return sink_; }
  std::size_t id_bound() const { return cells_.size(); }
  std::size_t cell_count() const { return live_cells_; }
  bool is_cell(StateId q) const;
  const Box &cell(StateId q) const;
  std::size_t depth(StateId q) const;
  std::vector<StateId> cells() const;

  /// A cell whose closure contains x (points on a shared face go to the
  /// upper side); nullopt outside the domain.
  std::optional<StateId> locate(std::span<const double> x) const;

  /// Bisects q along its longest axis. q keeps the lower half; `child`
  /// (which must equal id_bound()) receives the upper half.
  void split(StateId q, StateId child);

  /// Structure-of-arrays copy of all boxes (sink and dead ids hold NaN so
  /// no intersection test matches them).
  kernels::BoxesView view() const;

private:
  struct TreeNode {
    int axis = -1; // -1: leaf
    double mid = 0.0;
    std::uint32_t lower = 0, upper = 0; // child nodes
    StateId state = 0;
  };
  struct CellInfo {
    Box box;
    std::uint32_t depth = 0;
    std::uint32_t leaf = 0; // tree node
    bool live = false;
  };
  void store_soa(StateId q);
  void reserve_soa(std::size_t n);

  Box domain_;
  std::vector<std::size_t> grid_;
  std::vector<CellInfo> cells_;
  std::size_t live_cells_ = 0;
  StateId sink_ = 0;
  std::vector<TreeNode> tree_;
  std::vector<std::uint32_t> roots_; // one per grid cell
  std::vector<double> soa_lo_, soa_hi_;
  std::size_t soa_stride_ = 0;
};

/// An Fts kept consistent with a partition of a System.
class Abstraction {
public:
  explicit Abstraction(System system);

  const System &system() const { return system_; }
  const Partition &partition() const { return partition_; }
  Fts &fts() { return fts_; }
  const Fts &fts() const { return fts_; }
  StateId sink() const { return partition_.sink(); }
  const Box &reach_box(StateId q, ActionId u) const;

  /// Splits cell q, updating partition, encodings (through the Fts) and
  /// only the transitions that can change. Returns the new child id.
  StateId split(StateId q);

  /// Builds a fresh Fts for the current partition from scratch.
  Fts rebuild() const;

  double volume(const Bitset &states) const;

private:
  void compute_outgoing(StateId q, std::vector<Transition> &out);
  void targets(const Box &r, std::vector<StateId> &out) const;
  void relabel(StateId q);

  System system_;
  Partition partition_;
  Fts fts_;
  std::vector<std::vector<Box>> reach_; // [state][mode]
};

/// Cell labels: P holds at a cell iff the cell lies inside P's box.
void label_cells(Fts &fts, const Partition &part,
                 const std::map<std::string, Box> &props);

} // namespace refsyn
