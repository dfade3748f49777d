#pragma once

#include <optional>
#include <string>
#include <vector>

#include "specbench/features.hpp"
#include "specbench/harmonic.hpp"
#include "specbench/manifest.hpp"
#include "specbench/spectral.hpp"

namespace specbench {

/// One (clip, method) panel: the spectrum plus everything drawn over it.
struct PlotData {
  std::string plot_id;
  std::string clip_id;
  SpectralResult result;
  std::vector<Peak> peaks;
  std::optional<Spectrogram> spectrogram;
  std::optional<Ridge> ridge;
  std::vector<Vein> veins;

  bool operator==(const PlotData&) const = default;
};

/// "<clip_id>:<METHOD>"
std::string make_plot_id(const std::string& clip_id, Method method);

/// Immutable input to every exporter.
struct SessionSnapshot {
  ParameterManifest manifest;
  std::vector<PlotData> plots;
  SelectionState selection;
  double integer_tolerance = kDefaultIntegerTolerance;

  const PlotData* find_plot(const std::string& plot_id) const;
  PeaksByPlot peaks_by_plot() const;
  HarmonicGraph graph() const { return build_graph(selection, integer_tolerance); }

  bool operator==(const SessionSnapshot&) const = default;
};

}  // namespace specbench
