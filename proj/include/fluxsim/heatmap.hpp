#ifndef FLUXSIM_HEATMAP_HPP
#define FLUXSIM_HEATMAP_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "fluxsim/errors.hpp"
#include "fluxsim/lindblad.hpp"

namespace fluxsim {

// Binary PPM rendering with a linear color scale from zero to the map
// maximum; flux runs left to right, frequency bottom to top.  NaN cells
// render gray.  Kept free of any imaging dependency on purpose.
inline void render_heatmap_ppm(const TransmissionMap& map,
                               const std::string& path, int cell_px = 6) {
  const int nf = static_cast<int>(map.flux.size());
  const int nw = static_cast<int>(map.freq_ghz.size());
  if (nf == 0 || nw == 0) throw InputError("heatmap: empty map");

  double amax = 0.0;
  for (int i = 0; i < nf; ++i)
    for (int j = 0; j < nw; ++j)
      if (std::isfinite(map.amplitude(i, j)))
        amax = std::max(amax, map.amplitude(i, j));
  if (amax <= 0) amax = 1.0;

  // Compact viridis-like ramp.
  static const unsigned char ramp[][3] = {
      {68, 1, 84},   {71, 44, 122},  {59, 81, 139},  {44, 113, 142},
      {33, 144, 141}, {39, 173, 129}, {92, 200, 99},  {170, 220, 50},
      {253, 231, 37}};
  const int nramp = sizeof(ramp) / sizeof(ramp[0]);

  const int width = nf * cell_px, height = nw * cell_px;
  std::string img(static_cast<size_t>(width) * height * 3, '\0');
  for (int j = 0; j < nw; ++j) {
    for (int i = 0; i < nf; ++i) {
      unsigned char rgb[3] = {128, 128, 128};
      const double a = map.amplitude(i, j);
      if (std::isfinite(a)) {
        const double t = std::clamp(a / amax, 0.0, 1.0) * (nramp - 1);
        const int lo = std::min(static_cast<int>(t), nramp - 2);
        const double frac = t - lo;
        for (int c = 0; c < 3; ++c)
          rgb[c] = static_cast<unsigned char>(
              std::lround(ramp[lo][c] + frac * (ramp[lo + 1][c] - ramp[lo][c])));
      }
      for (int py = 0; py < cell_px; ++py)
        for (int px = 0; px < cell_px; ++px) {
          const int y = (nw - 1 - j) * cell_px + py;
          const int x = i * cell_px + px;
          const size_t off = (static_cast<size_t>(y) * width + x) * 3;
          img[off] = static_cast<char>(rgb[0]);
          img[off + 1] = static_cast<char>(rgb[1]);
          img[off + 2] = static_cast<char>(rgb[2]);
        }
    }
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("heatmap: cannot open " + path);
  f << "P6\n" << width << " " << height << "\n255\n";
  f.write(img.data(), static_cast<std::streamsize>(img.size()));
}

}  // namespace fluxsim

#endif
