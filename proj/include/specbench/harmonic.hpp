#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "specbench/features.hpp"

namespace specbench {

struct Selection {
  std::string plot_id;
  Peak peak;
  /// Assigned at selection time, never reused; drives colour assignment.
  int selection_order = 0;

  bool operator==(const Selection&) const = default;
};

/// A pairing of two live selections, identified by their selection orders.
struct SelectionPair {
  int order_a = 0;
  int order_b = 0;
  double ratio = 1.0;

  bool operator==(const SelectionPair&) const = default;
};

struct RemovedPeak {
  std::string plot_id;
  std::size_t bin_index = 0;

  bool operator==(const RemovedPeak&) const = default;
  auto operator<=>(const RemovedPeak&) const = default;
};

/// Value type; every operation returns a new state.
struct SelectionState {
  std::vector<Selection> selections;
  std::vector<SelectionPair> pairs;
  /// Peaks withdrawn from candidacy with `remove`.
  std::vector<RemovedPeak> removed;
  int next_order = 1;

  const Selection* find(int order) const;
  const Selection* find(const std::string& plot_id, std::size_t bin_index) const;
  bool is_removed(const std::string& plot_id, std::size_t bin_index) const;

  /// Selections, pairs and removals equal; the order counter is ignored.
  bool same_content(const SelectionState& other) const;
  bool operator==(const SelectionState&) const = default;
};

using PeaksByPlot = std::map<std::string, std::vector<Peak>>;

inline constexpr int kDefaultAutoSelect = 4;
inline constexpr double kDefaultIntegerTolerance = 0.05;

/// Per plot (in plot id order), the top-n peaks by power become selections in
/// power order. Requires 1 <= n <= 5; throws InvalidParams otherwise.
SelectionState auto_select(const PeaksByPlot& peaks_by_plot, int n = kDefaultAutoSelect);

/// max(fa, fb) / min(fa, fb). Throws NonPositiveFrequency.
double compute_ratio(double fa_hz, double fb_hz);

/// Appends a selection with the next order number. Throws UnknownSelection if
/// the peak is already selected on that plot or has been removed.
SelectionState select(const SelectionState& state, const std::string& plot_id, const Peak& peak);

/// Drops a selection and every pair that references it. Throws UnknownSelection.
SelectionState deselect(const SelectionState& state, int selection_order);
SelectionState deselect(const SelectionState& state, const std::string& plot_id,
                        std::size_t bin_index);

/// Withdraws a detected peak from candidacy, deselecting it first if needed.
SelectionState remove(const SelectionState& state, const std::string& plot_id, const Peak& peak);

/// Pairs two distinct live selections. Throws UnknownSelection.
SelectionState pair(const SelectionState& state, int order_a, int order_b);

// ---------------------------------------------------------------------------
// Event log

struct SelectEvent {
  std::string plot_id;
  Peak peak;
};
struct DeselectEvent {
  int selection_order = 0;
};
struct RemoveEvent {
  std::string plot_id;
  Peak peak;
};
struct PairEvent {
  int order_a = 0;
  int order_b = 0;
};
using SelectionEvent = std::variant<SelectEvent, DeselectEvent, RemoveEvent, PairEvent>;

/// Applies one event. Throws like the corresponding operation.
SelectionState apply(const SelectionState& state, const SelectionEvent& event);

/// Folds a log from `initial`; events that would throw are skipped and their
/// indices reported through `rejected` when given.
SelectionState replay(const std::vector<SelectionEvent>& log, SelectionState initial = {},
                      std::vector<std::size_t>* rejected = nullptr);

// ---------------------------------------------------------------------------
// Graph

struct GraphNode {
  double freq_hz = 0.0;
  /// Plots contributing a selection at this frequency, sorted.
  std::vector<std::string> plot_ids;

  bool operator==(const GraphNode&) const = default;
};

struct GraphEdge {
  std::size_t node_a = 0;
  std::size_t node_b = 0;
  double ratio = 1.0;
  bool is_near_integer = false;
  int nearest_integer = 1;

  bool operator==(const GraphEdge&) const = default;
};

struct HarmonicGraph {
  std::vector<GraphNode> nodes;  // ascending frequency
  std::vector<GraphEdge> edges;  // one per pair, in pair order

  bool operator==(const HarmonicGraph&) const = default;
};

/// Node per distinct selected frequency, edge per pair. Tolerance must lie in
/// (0, 0.5); throws InvalidParams otherwise.
HarmonicGraph build_graph(const SelectionState& state,
                          double integer_tolerance = kDefaultIntegerTolerance);

}  // namespace specbench
