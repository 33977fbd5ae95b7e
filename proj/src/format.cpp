#include "ncvx/format.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "ncvx/errors.hpp"

namespace ncvx {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw NumericalError("format_double: conversion failed");
  return std::string(buf, end);
}

double parse_double(std::string_view text, std::string_view what) {
  if (text == "inf" || text == "+inf") return INFINITY;
  if (text == "-inf") return -INFINITY;
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    throw InvalidArgument("invalid number for '" + std::string(what) + "': '" + std::string(text) +
                          "'");
  }
  return value;
}

long long parse_int(std::string_view text, std::string_view what) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw InvalidArgument("invalid integer for '" + std::string(what) + "': '" + std::string(text) +
                          "'");
  }
  return value;
}

}  // namespace ncvx
