// Copyright 2026 The multivec Authors.
// SPDX-License-Identifier: Apache-2.0

#include "multivec/json_format.hpp"

#include <charconv>
#include <cmath>
#include <string_view>

namespace multivec {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x,
                           std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

void dump(const nlohmann::json& j, std::string& out) {
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      // nlohmann::json stores objects in a std::map, so iteration is sorted.
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += nlohmann::json(it.key()).dump();
        out += ':';
        dump(it.value(), out);
      }
      out += '}';
      break;
    }
    case nlohmann::json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i > 0) out += ',';
        dump(j[i], out);
      }
      out += ']';
      break;
    }
    case nlohmann::json::value_t::number_float: {
      double x = j.get<double>();
      if (!std::isfinite(x)) {
        out += "null";
        break;
      }
      std::string s = format_double(x);
      // Keep floats recognisable as floats on re-read.
      if (s.find_first_of(".eE") == std::string::npos) s += ".0";
      out += s;
      break;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string canonical_dump(const nlohmann::json& j) {
  std::string out;
  dump(j, out);
  return out;
}

}  // namespace multivec
