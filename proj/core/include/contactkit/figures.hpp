#pragma once

#include <string>
#include <vector>

#include "contactkit/episodes.hpp"

namespace contactkit {

// Tidy table for one figure analog: one row per timestamp.
struct FigureTable {
  std::string kind;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::string to_csv() const;
};

// fz-wiping, tactile-norm, gravity-comp, grasp-force
const std::vector<std::string>& figure_kinds();

// Throws InvalidArgument for an unknown kind and FormatError naming the
// stream when the episode lacks one the figure needs.
FigureTable figure_data(const EpisodeRecord& episode, const std::string& kind);

}  // namespace contactkit
