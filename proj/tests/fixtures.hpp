#pragma once

// Probe grids recorded from full pipeline runs on three trace corpora
// (the public ADFA-LD host-intrusion set and two vehicle-service traces).
// Each row is one window length k; each nu column holds FAR,DR in percent.
// They pin down the window-ceiling rule against known-good outcomes.

#include <cstddef>
#include <vector>

#include "tracesift/selection.hpp"

namespace fixtures {

inline const std::vector<double> probe_nus{0.5, 0.2, 0.1, 0.05, 0.01};

// FAR,DR percent pairs, row-major over k=1..n then the five nu columns.
inline tsift::probe_result make_probe(const std::vector<std::vector<double>>& rows) {
  tsift::probe_result grid;
  grid.nus = probe_nus;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    grid.ks.push_back(i + 1);
    for (std::size_t j = 0; j < probe_nus.size(); ++j) {
      tsift::probe_cell cell;
      cell.k = i + 1;
      cell.nu = probe_nus[j];
      cell.ok = true;
      cell.far = rows[i][2 * j] / 100.0;
      cell.dr = rows[i][2 * j + 1] / 100.0;
      grid.cells.push_back(cell);
    }
  }
  return grid;
}

inline tsift::probe_result adfa_probe_grid() {
  return make_probe({
      {30.695, 77.748, 12.557, 28.150, 5.993, 11.528, 5.672, 10.456, 4.414, 8.847},
      {65.027, 66.890, 8.669, 7.775, 4.071, 4.155, 2.653, 4.558, 1.212, 3.619},
      {40.096, 78.954, 15.256, 41.957, 6.725, 33.780, 5.833, 33.110, 4.140, 30.831},
      {42.864, 92.627, 27.196, 67.024, 21.523, 62.064, 19.511, 61.260, 17.383, 60.188},
      {72.210, 98.257, 34.149, 93.566, 31.084, 89.678, 28.454, 87.265, 26.189, 84.316},
      {74.909, 99.330, 40.393, 98.794, 36.002, 95.040, 34.218, 92.895, 31.999, 92.493},
      {77.493, 99.598, 43.207, 98.928, 38.701, 95.174, 36.848, 93.164, 35.522, 93.164},
      {80.764, 99.866, 48.605, 98.525, 42.978, 95.040, 40.714, 93.164, 38.426, 93.164},
      {60.476, 99.732, 53.088, 96.381, 48.399, 94.370, 45.334, 93.700, 43.435, 93.700},
      {61.528, 99.732, 53.728, 96.381, 50.114, 94.504, 46.935, 93.834, 44.831, 93.834},
      {63.701, 99.464, 54.140, 95.576, 51.189, 94.102, 49.062, 93.834, 47.027, 93.834},
      {64.478, 97.185, 54.872, 94.906, 52.196, 93.834, 50.160, 93.834, 47.850, 93.834},
      {65.599, 97.051, 56.176, 94.504, 52.722, 93.834, 50.595, 93.834, 48.673, 93.700},
      {65.759, 98.257, 58.326, 94.906, 55.627, 94.102, 51.715, 93.968, 49.611, 93.700},
      {67.109, 98.257, 58.875, 96.113, 55.855, 94.102, 53.317, 93.834, 50.069, 93.834},
  });
}

inline tsift::probe_result localization_probe_grid() {
  return make_probe({
      {50.833, 100.000, 19.167, 99.791, 12.917, 99.582, 5.833, 99.374, 0.000, 36.326},
      {45.417, 99.791, 18.333, 99.791, 12.500, 99.791, 7.083, 99.582, 0.417, 36.534},
      {50.833, 100.000, 27.083, 99.791, 13.750, 99.791, 6.250, 99.791, 2.917, 37.161},
      {54.167, 100.000, 27.500, 100.000, 13.750, 100.000, 7.083, 100.000, 1.250, 99.791},
      {61.667, 100.000, 33.333, 100.000, 24.583, 100.000, 16.250, 100.000, 8.333, 100.000},
      {75.833, 100.000, 55.417, 100.000, 45.417, 100.000, 35.833, 100.000, 22.083, 100.000},
      {89.583, 100.000, 80.833, 100.000, 75.417, 100.000, 65.000, 100.000, 43.750, 100.000},
      {96.250, 100.000, 94.167, 100.000, 91.667, 100.000, 87.083, 100.000, 75.000, 100.000},
      {99.167, 100.000, 96.667, 100.000, 95.417, 100.000, 94.583, 100.000, 92.500, 100.000},
      {99.167, 100.000, 97.917, 100.000, 97.500, 100.000, 94.167, 100.000, 94.583, 100.000},
      {99.583, 100.000, 99.583, 100.000, 99.167, 100.000, 98.333, 100.000, 99.583, 100.000},
      {100.000, 100.000, 100.000, 100.000, 100.000, 100.000, 98.750, 100.000, 99.167, 100.000},
      {100.000, 100.000, 100.000, 100.000, 100.000, 100.000, 99.583, 100.000, 99.583, 100.000},
      {100.000, 100.000, 100.000, 100.000, 100.000, 100.000, 100.000, 100.000, 100.000, 100.000},
      {100.000, 100.000, 100.000, 100.000, 100.000, 100.000, 100.000, 100.000, 100.000, 100.000},
  });
}

inline tsift::probe_result mapping_probe_grid() {
  return make_probe({
      {56.000, 100.000, 17.333, 99.667, 10.000, 99.667, 2.667, 95.333, 0.667, 93.667},
      {33.333, 99.667, 14.000, 99.667, 10.000, 99.333, 2.000, 98.000, 0.000, 97.333},
      {48.667, 100.000, 20.667, 100.000, 16.667, 100.000, 8.667, 100.000, 6.000, 100.000},
      {52.667, 100.000, 24.000, 100.000, 16.000, 100.000, 14.000, 100.000, 7.333, 100.000},
      {65.333, 100.000, 40.000, 100.000, 27.333, 100.000, 22.000, 100.000, 12.667, 100.000},
      {87.333, 100.000, 73.333, 100.000, 63.333, 100.000, 47.333, 100.000, 36.667, 100.000},
      {93.333, 100.000, 86.000, 100.000, 83.333, 100.000, 80.667, 100.000, 62.000, 100.000},
      {99.333, 100.000, 98.667, 100.000, 98.000, 100.000, 97.333, 100.000, 93.333, 100.000},
      {99.333, 100.000, 99.333, 100.000, 99.333, 100.000, 98.667, 100.000, 98.667, 100.000},
      {100.000, 100.000, 100.000, 100.000, 100.000, 100.000, 100.000, 100.000, 100.000, 100.000},
      {100.000, 100.000, 100.000, 100.000, 100.000, 100.000, 100.000, 100.000, 100.000, 100.000},
      {100.000, 100.000, 100.000, 100.000, 100.000, 100.000, 100.000, 100.000, 100.000, 100.000},
  });
}

} // namespace fixtures
