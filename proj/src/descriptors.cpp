#include "spdsc/descriptors.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "spdsc/dataset.hpp"

namespace spdsc {

SpdMatrix cov_descriptor(const Matrix& rows, double eps) {
  const Eigen::Index m = rows.rows();
  const Eigen::Index d = rows.cols();
  if (m < 2) {
    throw TooFewSamples("cov_descriptor: need at least 2 vectors");
  }
  if (eps < 0.0) {
    throw std::invalid_argument("cov_descriptor: eps must be >= 0");
  }
  const Eigen::RowVectorXd mean = rows.colwise().mean();
  const Matrix centered = rows.rowwise() - mean;
  Matrix cov = (centered.transpose() * centered) /
               static_cast<double>(m - 1);
  cov = sym_part(cov);
  if (eps > 0.0) {
    cov.diagonal().array() += eps * cov.diagonal().mean();
  }
  // LLT alone can accept an exactly singular covariance through rounding;
  // reject rank deficiency explicitly.
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  if (eig.info() != Eigen::Success ||
      eig.eigenvalues().minCoeff() <= 1e-12 * std::max(1e-300, cov.trace())) {
    throw NotPositiveDefinite(
        "cov_descriptor: covariance is rank deficient (d=" +
        std::to_string(d) + "); increase eps or vary the features");
  }
  try {
    return SpdMatrix::FromDense(cov);
  } catch (const NotPositiveDefinite&) {
    throw NotPositiveDefinite(
        "cov_descriptor: covariance is rank deficient (d=" +
        std::to_string(d) + "); increase eps or vary the features");
  }
}

SpdMatrix cov_descriptor(const std::vector<Vector>& vectors, double eps) {
  if (vectors.size() < 2) {
    throw TooFewSamples("cov_descriptor: need at least 2 vectors");
  }
  const Eigen::Index d = vectors.front().size();
  Matrix rows(static_cast<Eigen::Index>(vectors.size()), d);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != d) {
      throw DimensionMismatch("cov_descriptor: inconsistent vector lengths");
    }
    rows.row(static_cast<Eigen::Index>(i)) = vectors[i];
  }
  return cov_descriptor(rows, eps);
}

FeatureGrid texture_features(const Matrix& image) {
  const Eigen::Index h = image.rows();
  const Eigen::Index w = image.cols();
  if (h < 3 || w < 3) {
    throw ImageTooSmall("texture_features: need at least a 3x3 image");
  }
  FeatureGrid grid;
  grid.height = h;
  grid.width = w;
  grid.d = 5;
  grid.values.resize(h * w, 5);
  auto clampr = [&](Eigen::Index r) { return std::clamp<Eigen::Index>(r, 0, h - 1); };
  auto clampc = [&](Eigen::Index c) { return std::clamp<Eigen::Index>(c, 0, w - 1); };
  for (Eigen::Index r = 0; r < h; ++r) {
    for (Eigen::Index c = 0; c < w; ++c) {
      const double xm = image(r, clampc(c - 1)), xp = image(r, clampc(c + 1));
      const double ym = image(clampr(r - 1), c), yp = image(clampr(r + 1), c);
      const double v = image(r, c);
      auto row = grid.values.row(grid.at(r, c));
      row[0] = v;
      row[1] = std::abs(0.5 * (xp - xm));
      row[2] = std::abs(0.5 * (yp - ym));
      row[3] = std::abs(xp - 2.0 * v + xm);
      row[4] = std::abs(yp - 2.0 * v + ym);
    }
  }
  return grid;
}

SpdMatrix joint_covariance(const FrameSequence& seq, double eps) {
  if (seq.frames.size() < 2) {
    throw TooFewSamples("joint_covariance: need at least 2 frames");
  }
  return cov_descriptor(seq.frames, eps);
}

SpdMatrix block_descriptor(const FeatureGrid& grid, Eigen::Index row0,
                           Eigen::Index col0, Eigen::Index h, Eigen::Index w,
                           double eps) {
  if (row0 < 0 || col0 < 0 || row0 + h > grid.height ||
      col0 + w > grid.width) {
    throw DimensionMismatch("block_descriptor: block outside the grid");
  }
  Matrix rows(h * w, grid.d);
  Eigen::Index k = 0;
  for (Eigen::Index r = row0; r < row0 + h; ++r) {
    for (Eigen::Index c = col0; c < col0 + w; ++c) {
      rows.row(k++) = grid.values.row(grid.at(r, c));
    }
  }
  return cov_descriptor(rows, eps);
}

namespace {

// Skips whitespace and '#' comment lines in a PGM header.
int next_header_int(std::istream& in, const std::string& path) {
  while (in) {
    const int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int value = -1;
  if (!(in >> value)) {
    throw ParseError(path + ": truncated PGM header");
  }
  return value;
}

}  // namespace

Matrix load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open: " + path);
  std::string magic;
  in >> magic;
  if (magic != "P2" && magic != "P5") {
    throw ParseError(path + ": expected P2 or P5 PGM");
  }
  const int w = next_header_int(in, path);
  const int h = next_header_int(in, path);
  const int maxval = next_header_int(in, path);
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) {
    throw ParseError(path + ": invalid PGM header");
  }
  Matrix img(h, w);
  if (magic == "P2") {
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        int v;
        if (!(in >> v)) throw ParseError(path + ": truncated PGM data");
        img(r, c) = static_cast<double>(v) / maxval;
      }
    }
  } else {
    in.get();  // single whitespace after maxval
    const int bytes = maxval > 255 ? 2 : 1;
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        int v = in.get();
        if (bytes == 2) v = (v << 8) | in.get();
        if (!in) throw ParseError(path + ": truncated PGM data");
        img(r, c) = static_cast<double>(v) / maxval;
      }
    }
  }
  return img;
}

namespace {

std::vector<std::vector<double>> parse_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ParseError(path + ": bad number '" + cell + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(path + ": ragged CSV rows");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path + ": empty CSV");
  return rows;
}

}  // namespace

Matrix load_csv_grid(const std::string& path) {
  const auto rows = parse_csv(path);
  Matrix img(static_cast<Eigen::Index>(rows.size()),
             static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      img(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          rows[r][c];
    }
  }
  return img;
}

FrameSequence load_frames_csv(const std::string& path) {
  const auto rows = parse_csv(path);
  if (rows.front().size() % 3 != 0) {
    throw ParseError(path + ": frame length must be a multiple of 3");
  }
  FrameSequence seq;
  seq.joints = static_cast<Eigen::Index>(rows.front().size() / 3);
  for (const auto& row : rows) {
    Vector f(static_cast<Eigen::Index>(row.size()));
    for (std::size_t i = 0; i < row.size(); ++i) {
      f[static_cast<Eigen::Index>(i)] = row[i];
    }
    seq.frames.push_back(std::move(f));
  }
  return seq;
}

}  // namespace spdsc
