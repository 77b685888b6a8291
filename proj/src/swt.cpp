#include "fwfc/swt.hpp"

#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "fwfc/frame_io.hpp"

namespace fwfc {

const char* band_name(Band band) {
  switch (band) {
    case Band::A: return "A";
    case Band::H: return "H";
    case Band::V: return "V";
    case Band::D: return "D";
  }
  return "?";
}

Band band_from_name(const std::string& name) {
  if (name == "A" || name == "a") return Band::A;
  if (name == "H" || name == "h") return Band::H;
  if (name == "V" || name == "v") return Band::V;
  if (name == "D" || name == "d") return Band::D;
  throw std::invalid_argument("band_from_name: unknown band '" + name + "'");
}

Plane frame_to_plane(const Frame& frame) {
  Plane out(frame.width, frame.height);
  for (std::size_t i = 0; i < frame.size(); ++i)
    out.values[i] = static_cast<double>(frame.samples[i]);
  return out;
}

namespace {

// whole-sample reflection: ...c b | a b c d | c b a
int reflect_index(int idx, int n) {
  if (n == 1) return 0;
  while (idx < 0 || idx >= n) {
    if (idx < 0) idx = -idx;
    if (idx >= n) idx = 2 * n - 2 - idx;
  }
  return idx;
}

int wrap_index(int idx, int n) {
  idx %= n;
  return idx < 0 ? idx + n : idx;
}

void fill_shift_table(std::vector<int>& table, int n, int spacing, Boundary boundary) {
  table.resize(n);
  for (int i = 0; i < n; ++i)
    table[i] = boundary == Boundary::Periodic ? wrap_index(i + spacing, n)
                                              : reflect_index(i + spacing, n);
}

}  // namespace

Pyramid decompose(const Plane& image, int levels, Boundary boundary) {
  if (levels < 1) throw std::invalid_argument("decompose: levels must be >= 1");
  const int w = image.width, h = image.height;
  if (w < (1 << levels) || h < (1 << levels))
    throw std::invalid_argument("decompose: frame too small for requested levels");

  Pyramid pyr;
  pyr.levels = levels;
  pyr.width = w;
  pyr.height = h;
  pyr.planes.assign(static_cast<std::size_t>(levels) * 4, Plane(w, h));

  Plane row_lo(w, h), row_hi(w, h);
  std::vector<int> col_shift, row_shift;
  const Plane* src = &image;

  for (int level = 1; level <= levels; ++level) {
    const int spacing = 1 << (level - 1);
    fill_shift_table(col_shift, w, spacing, boundary);
    fill_shift_table(row_shift, h, spacing, boundary);

    // filter along rows: taps at offsets 0 and +spacing
    for (int i = 0; i < h; ++i) {
      const double* x = src->row(i);
      double* lo = row_lo.row(i);
      double* hi = row_hi.row(i);
      for (int j = 0; j < w; ++j) {
        const double a = x[j];
        const double b = x[col_shift[j]];
        lo[j] = 0.5 * (a + b);
        hi[j] = 0.5 * (a - b);
      }
    }

    // filter along columns
    Plane& pa = pyr.at(level, Band::A);
    Plane& ph = pyr.at(level, Band::H);
    Plane& pv = pyr.at(level, Band::V);
    Plane& pd = pyr.at(level, Band::D);
    for (int i = 0; i < h; ++i) {
      const int i2 = row_shift[i];
      const double* lo0 = row_lo.row(i);
      const double* lo1 = row_lo.row(i2);
      const double* hi0 = row_hi.row(i);
      const double* hi1 = row_hi.row(i2);
      double* a = pa.row(i);
      double* hh = ph.row(i);
      double* vv = pv.row(i);
      double* dd = pd.row(i);
      for (int j = 0; j < w; ++j) {
        a[j] = 0.5 * (lo0[j] + lo1[j]);
        vv[j] = 0.5 * (lo0[j] - lo1[j]);
        hh[j] = 0.5 * (hi0[j] + hi1[j]);
        dd[j] = 0.5 * (hi0[j] - hi1[j]);
      }
    }
    src = &pyr.at(level, Band::A);
  }
  return pyr;
}

Pyramid decompose(const Frame& frame, int levels, Boundary boundary) {
  return decompose(frame_to_plane(frame), levels, boundary);
}

Plane reconstruct_level(const Plane& a, const Plane& h, const Plane& v, const Plane& d) {
  if (!same_size(a, h) || !same_size(a, v) || !same_size(a, d))
    throw std::invalid_argument("reconstruct_level: plane dimension mismatch");
  Plane out(a.width, a.height);
  for (std::size_t i = 0; i < a.size(); ++i)
    out.values[i] = a.values[i] + h.values[i] + v.values[i] + d.values[i];
  return out;
}

double plane_std(const Plane& plane) {
  if (plane.size() == 0) throw std::invalid_argument("plane_std: empty plane");
  double sum = 0.0, sumsq = 0.0;
  for (double v : plane.values) {
    sum += v;
    sumsq += v * v;
  }
  const double n = static_cast<double>(plane.size());
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  return var > 0.0 ? std::sqrt(var) : 0.0;
}

void dump_band_images(const Pyramid& pyramid, const std::string& directory,
                      const std::string& tag) {
  std::filesystem::create_directories(directory);
  for (int level = 1; level <= pyramid.levels; ++level) {
    for (Band band : kAllBands) {
      const Plane& p = pyramid.at(level, band);
      double lo = p.values[0], hi = p.values[0];
      for (double v : p.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      const double span = hi - lo;
      Frame img(p.width, p.height);
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double t = span > 0.0 ? (p.values[i] - lo) / span : 0.0;
        img.samples[i] = static_cast<std::uint8_t>(std::lround(t * 255.0));
      }
      const std::string name = directory + "/" + tag + "_" + band_name(band) +
                               std::to_string(level) + ".png";
      write_frame(img, name);
    }
  }
}

}  // namespace fwfc
