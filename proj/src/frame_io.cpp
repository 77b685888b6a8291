#include "fwfc/frame_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace fwfc {

namespace fs = std::filesystem;

std::uint8_t to_grayscale(int r, int g, int b) {
  if (r < 0 || r > 255 || g < 0 || g > 255 || b < 0 || b > 255)
    throw std::invalid_argument("to_grayscale: channel outside [0,255]");
  const double y = 0.299 * r + 0.587 * g + 0.114 * b;
  const long rounded = std::lround(y);
  return static_cast<std::uint8_t>(std::clamp(rounded, 0L, 255L));
}

Frame crop_to_multiple(const Frame& frame, int factor) {
  if (factor < 1) throw std::invalid_argument("crop_to_multiple: factor must be >= 1");
  if (frame.width < factor || frame.height < factor)
    throw std::invalid_argument("crop_to_multiple: frame smaller than factor");
  const int w = factor * (frame.width / factor);
  const int h = factor * (frame.height / factor);
  if (w == frame.width && h == frame.height) return frame;
  Frame out(w, h);
  for (int i = 0; i < h; ++i)
    std::copy_n(&frame.samples[static_cast<std::size_t>(i) * frame.width], w,
                &out.samples[static_cast<std::size_t>(i) * w]);
  return out;
}

Mask crop_to_multiple(const Mask& mask, int factor) {
  if (factor < 1) throw std::invalid_argument("crop_to_multiple: factor must be >= 1");
  if (mask.width < factor || mask.height < factor)
    throw std::invalid_argument("crop_to_multiple: mask smaller than factor");
  const int w = factor * (mask.width / factor);
  const int h = factor * (mask.height / factor);
  if (w == mask.width && h == mask.height) return mask;
  Mask out(w, h);
  for (int i = 0; i < h; ++i)
    std::copy_n(&mask.bits[static_cast<std::size_t>(i) * mask.width], w,
                &out.bits[static_cast<std::size_t>(i) * w]);
  return out;
}

namespace {

bool is_raster_file(const fs::path& p) {
  static const char* kExts[] = {".png", ".pgm", ".ppm", ".bmp",
                                ".tif", ".tiff", ".jpg", ".jpeg"};
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  for (const char* e : kExts)
    if (ext == e) return true;
  return false;
}

bool glob_match(const char* pat, const char* str) {
  // '*' and '?' wildcards, no character classes
  if (*pat == '\0') return *str == '\0';
  if (*pat == '*') {
    for (const char* s = str;; ++s) {
      if (glob_match(pat + 1, s)) return true;
      if (*s == '\0') return false;
    }
  }
  if (*str == '\0') return false;
  if (*pat != '?' && *pat != *str) return false;
  return glob_match(pat + 1, str + 1);
}

// Last run of digits in the stem; files without one sort before numbered ones.
long long numeric_key(const fs::path& p) {
  const std::string stem = p.stem().string();
  int end = -1;
  for (int i = static_cast<int>(stem.size()) - 1; i >= 0; --i) {
    if (std::isdigit(static_cast<unsigned char>(stem[i]))) {
      end = i;
      break;
    }
  }
  if (end < 0) return -1;
  int begin = end;
  while (begin > 0 && std::isdigit(static_cast<unsigned char>(stem[begin - 1]))) --begin;
  std::string digits = stem.substr(begin, end - begin + 1);
  if (digits.size() > 18) digits = digits.substr(digits.size() - 18);
  return std::stoll(digits);
}

}  // namespace

std::vector<fs::path> list_frame_files(const std::string& directory,
                                       const std::string& pattern) {
  if (!fs::is_directory(directory))
    throw std::runtime_error("list_frame_files: no such directory: " + directory);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (!entry.is_regular_file()) continue;
    const fs::path& p = entry.path();
    if (!is_raster_file(p)) continue;
    if (!glob_match(pattern.c_str(), p.filename().string().c_str())) continue;
    files.push_back(p);
  }
  if (files.empty())
    throw std::runtime_error("list_frame_files: no frames in " + directory +
                             " matching '" + pattern + "'");
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    const long long ka = numeric_key(a), kb = numeric_key(b);
    if (ka != kb) return ka < kb;
    return a.filename().string() < b.filename().string();
  });
  return files;
}

Frame read_frame(const fs::path& file) {
  cv::Mat img = cv::imread(file.string(), cv::IMREAD_UNCHANGED);
  if (img.empty()) throw std::runtime_error("read_frame: cannot read " + file.string());
  if (img.depth() != CV_8U)
    throw std::runtime_error("read_frame: not an 8-bit image: " + file.string());
  Frame out(img.cols, img.rows);
  if (img.channels() == 1) {
    for (int i = 0; i < img.rows; ++i)
      std::copy_n(img.ptr<std::uint8_t>(i), img.cols,
                  &out.samples[static_cast<std::size_t>(i) * img.cols]);
  } else if (img.channels() == 3 || img.channels() == 4) {
    const int ch = img.channels();
    for (int i = 0; i < img.rows; ++i) {
      const std::uint8_t* src = img.ptr<std::uint8_t>(i);
      for (int j = 0; j < img.cols; ++j) {
        // imread delivers BGR order
        out.at(i, j) = to_grayscale(src[j * ch + 2], src[j * ch + 1], src[j * ch]);
      }
    }
  } else {
    throw std::runtime_error("read_frame: unsupported channel count in " + file.string());
  }
  return out;
}

FrameSequence load_frame_sequence(const std::string& directory,
                                  const std::string& pattern) {
  const auto files = list_frame_files(directory, pattern);
  FrameSequence seq;
  seq.frames.reserve(files.size());
  seq.source_names.reserve(files.size());
  for (const auto& f : files) {
    Frame frame = read_frame(f);
    if (!seq.frames.empty() && !same_size(frame, seq.frames.front()))
      throw std::runtime_error("load_frame_sequence: mixed frame dimensions at " +
                               f.filename().string());
    seq.frames.push_back(std::move(frame));
    seq.source_names.push_back(f.filename().string());
  }
  return seq;
}

void write_mask(const Mask& mask, const std::string& path) {
  if (mask.width <= 0 || mask.height <= 0)
    throw std::invalid_argument("write_mask: empty mask");
  cv::Mat img(mask.height, mask.width, CV_8UC1);
  for (int i = 0; i < mask.height; ++i) {
    std::uint8_t* dst = img.ptr<std::uint8_t>(i);
    for (int j = 0; j < mask.width; ++j) dst[j] = mask.at(i, j) ? 255 : 0;
  }
  if (!cv::imwrite(path, img))
    throw std::runtime_error("write_mask: cannot write " + path);
}

Mask read_mask(const std::string& path) {
  cv::Mat img = cv::imread(path, cv::IMREAD_GRAYSCALE);
  if (img.empty()) throw std::runtime_error("read_mask: cannot read " + path);
  Mask out(img.cols, img.rows);
  for (int i = 0; i < img.rows; ++i) {
    const std::uint8_t* src = img.ptr<std::uint8_t>(i);
    for (int j = 0; j < img.cols; ++j) out.at(i, j) = src[j] >= 128 ? 1 : 0;
  }
  return out;
}

void write_frame(const Frame& frame, const std::string& path) {
  cv::Mat img(frame.height, frame.width, CV_8UC1);
  for (int i = 0; i < frame.height; ++i)
    std::copy_n(&frame.samples[static_cast<std::size_t>(i) * frame.width], frame.width,
                img.ptr<std::uint8_t>(i));
  if (!cv::imwrite(path, img))
    throw std::runtime_error("write_frame: cannot write " + path);
}

}  // namespace fwfc
