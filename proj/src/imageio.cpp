#include "ncvx/imageio.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "ncvx/errors.hpp"

namespace ncvx {

namespace {

// Next whitespace-delimited token, skipping '#' comments to end of line.
std::string next_token(std::istream& in) {
  std::string tok;
  char c;
  while (in.get(c)) {
    if (c == '#') {
      std::string rest;
      std::getline(in, rest);
      if (!tok.empty()) return tok;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(c);
  }
  if (tok.empty()) throw InvalidArgument("image: unexpected end of data");
  return tok;
}

long read_int(std::istream& in, const char* what) {
  const std::string tok = next_token(in);
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size()) throw InvalidArgument(std::string("image: bad ") + what + " '" + tok + "'");
  return v;
}

struct Header {
  long cols, rows, maxval;
};

Header read_header(std::istream& in, const char* magic) {
  const std::string m = next_token(in);
  if (m != magic) throw InvalidArgument("image: expected magic " + std::string(magic) + ", got " + m);
  Header h{read_int(in, "width"), read_int(in, "height"), read_int(in, "maxval")};
  if (h.cols < 1 || h.rows < 1) throw InvalidArgument("image: empty image");
  if (h.maxval < 1 || h.maxval > 65535) throw InvalidArgument("image: maxval out of range");
  return h;
}

double read_sample(std::istream& in, long maxval) {
  const long v = read_int(in, "sample");
  if (v < 0 || v > maxval) throw InvalidArgument("image: sample out of range");
  return static_cast<double>(v) / static_cast<double>(maxval);
}

long quantize(double v, int maxval) {
  if (std::isnan(v)) throw InvalidArgument("image: NaN sample");
  return std::lround(std::clamp(v, 0.0, 1.0) * maxval);
}

void check_maxval(int maxval) {
  if (maxval < 1 || maxval > 65535) throw InvalidArgument("image: maxval out of range");
}

}  // namespace

Eigen::MatrixXd read_pgm(std::istream& in) {
  const Header h = read_header(in, "P2");
  Eigen::MatrixXd img(h.rows, h.cols);
  for (long i = 0; i < h.rows; ++i) {
    for (long j = 0; j < h.cols; ++j) img(i, j) = read_sample(in, h.maxval);
  }
  return img;
}

void write_pgm(std::ostream& out, const Eigen::MatrixXd& image, int maxval) {
  check_maxval(maxval);
  out << "P2\n" << image.cols() << ' ' << image.rows() << '\n' << maxval << '\n';
  for (Eigen::Index i = 0; i < image.rows(); ++i) {
    for (Eigen::Index j = 0; j < image.cols(); ++j) {
      out << quantize(image(i, j), maxval) << (j + 1 == image.cols() ? '\n' : ' ');
    }
  }
}

ColorImage read_ppm(std::istream& in) {
  const Header h = read_header(in, "P3");
  ColorImage img{h.rows, h.cols, Eigen::MatrixXd(h.rows * h.cols, 3)};
  for (long i = 0; i < h.rows; ++i) {
    for (long j = 0; j < h.cols; ++j) {
      for (int c = 0; c < 3; ++c) img.channels(i + j * h.rows, c) = read_sample(in, h.maxval);
    }
  }
  return img;
}

void write_ppm(std::ostream& out, const ColorImage& image, int maxval) {
  check_maxval(maxval);
  if (image.channels.rows() != image.rows * image.cols || image.channels.cols() != 3) {
    throw DimensionMismatch("write_ppm: channel matrix shape");
  }
  out << "P3\n" << image.cols << ' ' << image.rows << '\n' << maxval << '\n';
  for (Eigen::Index i = 0; i < image.rows; ++i) {
    for (Eigen::Index j = 0; j < image.cols; ++j) {
      const Eigen::Index p = i + j * image.rows;
      out << quantize(image.channels(p, 0), maxval) << ' ' << quantize(image.channels(p, 1), maxval)
          << ' ' << quantize(image.channels(p, 2), maxval) << (j + 1 == image.cols ? '\n' : ' ');
    }
  }
}

}  // namespace ncvx
