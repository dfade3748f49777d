#include "specbench/harmonic.hpp"

#include <algorithm>
#include <cmath>

#include "specbench/errors.hpp"
#include "specbench/format.hpp"

namespace specbench {

const Selection* SelectionState::find(int order) const {
  auto it = std::find_if(selections.begin(), selections.end(),
                         [&](const Selection& s) { return s.selection_order == order; });
  return it == selections.end() ? nullptr : &*it;
}

const Selection* SelectionState::find(const std::string& plot_id, std::size_t bin_index) const {
  auto it = std::find_if(selections.begin(), selections.end(), [&](const Selection& s) {
    return s.plot_id == plot_id && s.peak.bin_index == bin_index;
  });
  return it == selections.end() ? nullptr : &*it;
}

bool SelectionState::is_removed(const std::string& plot_id, std::size_t bin_index) const {
  return std::find(removed.begin(), removed.end(), RemovedPeak{plot_id, bin_index}) != removed.end();
}

bool SelectionState::same_content(const SelectionState& other) const {
  return selections == other.selections && pairs == other.pairs && removed == other.removed;
}

SelectionState auto_select(const PeaksByPlot& peaks_by_plot, int n) {
  if (n < 1 || n > 5) throw InvalidParams("auto-select count must be in [1, 5]");
  SelectionState state;
  for (const auto& [plot_id, peaks] : peaks_by_plot) {
    std::vector<Peak> ranked = peaks;
    std::stable_sort(ranked.begin(), ranked.end(), [](const Peak& a, const Peak& b) {
      if (a.power_linear != b.power_linear) return a.power_linear > b.power_linear;
      return a.bin_index < b.bin_index;
    });
    const auto take = std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < take; ++i) {
      state.selections.push_back({plot_id, ranked[i], state.next_order++});
    }
  }
  return state;
}

double compute_ratio(double fa_hz, double fb_hz) {
  if (!(fa_hz > 0.0) || !(fb_hz > 0.0)) {
    throw NonPositiveFrequency("ratio needs positive frequencies, got " + fmt_sig6(fa_hz) + " and " +
                               fmt_sig6(fb_hz));
  }
  return std::max(fa_hz, fb_hz) / std::min(fa_hz, fb_hz);
}

SelectionState select(const SelectionState& state, const std::string& plot_id, const Peak& peak) {
  if (state.find(plot_id, peak.bin_index)) {
    throw UnknownSelection("peak at bin " + std::to_string(peak.bin_index) + " on '" + plot_id +
                           "' is already selected");
  }
  if (state.is_removed(plot_id, peak.bin_index)) {
    throw UnknownSelection("peak at bin " + std::to_string(peak.bin_index) + " on '" + plot_id +
                           "' was removed");
  }
  SelectionState next = state;
  next.selections.push_back({plot_id, peak, next.next_order++});
  return next;
}

SelectionState deselect(const SelectionState& state, int selection_order) {
  if (!state.find(selection_order)) {
    throw UnknownSelection("no live selection with order " + std::to_string(selection_order));
  }
  SelectionState next = state;
  std::erase_if(next.selections,
                [&](const Selection& s) { return s.selection_order == selection_order; });
  std::erase_if(next.pairs, [&](const SelectionPair& p) {
    return p.order_a == selection_order || p.order_b == selection_order;
  });
  return next;
}

SelectionState deselect(const SelectionState& state, const std::string& plot_id,
                        std::size_t bin_index) {
  const Selection* s = state.find(plot_id, bin_index);
  if (!s) {
    throw UnknownSelection("no selection at bin " + std::to_string(bin_index) + " on '" + plot_id + "'");
  }
  return deselect(state, s->selection_order);
}

SelectionState remove(const SelectionState& state, const std::string& plot_id, const Peak& peak) {
  if (state.is_removed(plot_id, peak.bin_index)) {
    throw UnknownSelection("peak at bin " + std::to_string(peak.bin_index) + " on '" + plot_id +
                           "' is already removed");
  }
  SelectionState next = state;
  if (const Selection* s = state.find(plot_id, peak.bin_index)) {
    next = deselect(state, s->selection_order);
  }
  next.removed.push_back({plot_id, peak.bin_index});
  return next;
}

SelectionState pair(const SelectionState& state, int order_a, int order_b) {
  const Selection* a = state.find(order_a);
  const Selection* b = state.find(order_b);
  if (!a || !b) throw UnknownSelection("pair references a selection that is not live");
  if (order_a == order_b) throw UnknownSelection("cannot pair a selection with itself");
  const bool exists = std::any_of(state.pairs.begin(), state.pairs.end(), [&](const SelectionPair& p) {
    return (p.order_a == order_a && p.order_b == order_b) ||
           (p.order_a == order_b && p.order_b == order_a);
  });
  if (exists) throw UnknownSelection("selections are already paired");

  SelectionState next = state;
  next.pairs.push_back({order_a, order_b, compute_ratio(a->peak.freq_hz, b->peak.freq_hz)});
  return next;
}

SelectionState apply(const SelectionState& state, const SelectionEvent& event) {
  struct Visitor {
    const SelectionState& s;
    SelectionState operator()(const SelectEvent& e) const { return select(s, e.plot_id, e.peak); }
    SelectionState operator()(const DeselectEvent& e) const { return deselect(s, e.selection_order); }
    SelectionState operator()(const RemoveEvent& e) const { return remove(s, e.plot_id, e.peak); }
    SelectionState operator()(const PairEvent& e) const { return pair(s, e.order_a, e.order_b); }
  };
  return std::visit(Visitor{state}, event);
}

SelectionState replay(const std::vector<SelectionEvent>& log, SelectionState initial,
                      std::vector<std::size_t>* rejected) {
  SelectionState state = std::move(initial);
  for (std::size_t i = 0; i < log.size(); ++i) {
    try {
      state = specbench::apply(state, log[i]);
    } catch (const Error&) {
      if (rejected) rejected->push_back(i);
    }
  }
  return state;
}

HarmonicGraph build_graph(const SelectionState& state, double integer_tolerance) {
  if (!(integer_tolerance > 0.0 && integer_tolerance < 0.5))
    throw InvalidParams("integer tolerance must lie in (0, 0.5)");

  HarmonicGraph g;
  for (const auto& s : state.selections) {
    auto it = std::find_if(g.nodes.begin(), g.nodes.end(),
                           [&](const GraphNode& n) { return n.freq_hz == s.peak.freq_hz; });
    if (it == g.nodes.end()) {
      g.nodes.push_back({s.peak.freq_hz, {s.plot_id}});
    } else if (std::find(it->plot_ids.begin(), it->plot_ids.end(), s.plot_id) == it->plot_ids.end()) {
      it->plot_ids.push_back(s.plot_id);
    }
  }
  std::sort(g.nodes.begin(), g.nodes.end(),
            [](const GraphNode& a, const GraphNode& b) { return a.freq_hz < b.freq_hz; });
  for (auto& n : g.nodes) std::sort(n.plot_ids.begin(), n.plot_ids.end());

  auto node_of = [&](double f) {
    auto it = std::find_if(g.nodes.begin(), g.nodes.end(),
                           [&](const GraphNode& n) { return n.freq_hz == f; });
    return static_cast<std::size_t>(it - g.nodes.begin());
  };

  for (const auto& p : state.pairs) {
    const Selection* a = state.find(p.order_a);
    const Selection* b = state.find(p.order_b);
    if (!a || !b) throw UnknownSelection("pair references a selection that is not live");
    GraphEdge e;
    e.node_a = node_of(a->peak.freq_hz);
    e.node_b = node_of(b->peak.freq_hz);
    e.ratio = p.ratio;
    const double nearest = std::round(p.ratio);
    e.nearest_integer = static_cast<int>(nearest);
    e.is_near_integer = std::abs(p.ratio - nearest) <= integer_tolerance;
    g.edges.push_back(e);
  }
  return g;
}

}  // namespace specbench
