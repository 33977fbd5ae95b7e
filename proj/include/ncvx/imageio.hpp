#pragma once

#include <Eigen/Dense>
#include <iosfwd>

namespace ncvx {

/// Plain-text netpbm images. Gray images are rows x cols matrices; color
/// images keep one column per channel with pixels vectorized column-major.
/// Sample values are scaled to [0, 1] on read and clamped to [0, 1] on
/// write. Read errors throw InvalidArgument.

struct ColorImage {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  Eigen::MatrixXd channels;  // (rows * cols) x 3
};

Eigen::MatrixXd read_pgm(std::istream& in);
void write_pgm(std::ostream& out, const Eigen::MatrixXd& image, int maxval = 255);

ColorImage read_ppm(std::istream& in);
void write_ppm(std::ostream& out, const ColorImage& image, int maxval = 255);

}  // namespace ncvx
