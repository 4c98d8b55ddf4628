#pragma once

#include <string>
#include <vector>

#include "spdsc/spd.hpp"

namespace spdsc {

struct TooFewSamples : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ImageTooSmall : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Per-location feature vectors on an h x w grid, d features per location.
struct FeatureGrid {
  Eigen::Index height = 0;
  Eigen::Index width = 0;
  Eigen::Index d = 0;
  // (height*width) x d, location-major.
  Matrix values;

  Eigen::Index at(Eigen::Index row, Eigen::Index col) const {
    return row * width + col;
  }
};

/// Sequence of frame vectors (length 3K each) for joint covariance.
struct FrameSequence {
  std::vector<Vector> frames;
  Eigen::Index joints = 0;  // K
};

/// Sample covariance (m-1 denominator) of the given vectors, regularized by
/// eps * mean(diag) * I, validated SPD.
SpdMatrix cov_descriptor(const std::vector<Vector>& vectors,
                         double eps = 1e-6);
SpdMatrix cov_descriptor(const Matrix& rows, double eps = 1e-6);

/// Per-pixel (I, |dI/dx|, |dI/dy|, |d2I/dx2|, |d2I/dy2|) using central
/// differences with replicated borders.
FeatureGrid texture_features(const Matrix& image);

/// Covariance of the frame vectors of a sequence.
SpdMatrix joint_covariance(const FrameSequence& seq, double eps = 1e-6);

/// Covariance descriptor of a rectangular block of a feature grid.
SpdMatrix block_descriptor(const FeatureGrid& grid, Eigen::Index row0,
                           Eigen::Index col0, Eigen::Index h, Eigen::Index w,
                           double eps = 1e-6);

// ---- input parsing ----

/// Plain PGM, P2 (ASCII) or P5 (binary); intensities scaled to [0, 1].
Matrix load_pgm(const std::string& path);

/// CSV grid of intensities, one image row per line.
Matrix load_csv_grid(const std::string& path);

/// CSV frame sequence: one frame per line, 3K columns.
FrameSequence load_frames_csv(const std::string& path);

}  // namespace spdsc
