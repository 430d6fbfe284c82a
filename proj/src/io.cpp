// Copyright 2026 The multivec Authors.
// SPDX-License-Identifier: Apache-2.0

#include "multivec/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "multivec/json_format.hpp"

namespace multivec {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// from_chars is locale independent, unlike strtod.
bool parse_double(const std::string& text, double& out) {
  std::string t = trim(text);
  if (t.empty()) return false;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (*first == '+') ++first;
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += ',';
    out += xs[i];
  }
  return out;
}

}  // namespace

SampleMatrix read_csv(std::istream& in, const std::vector<std::string>& header,
                      bool require_positive) {
  std::string line;
  int lineno = 0;
  bool have_header = false;
  while (!have_header && std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<std::string> got = split(line, ',');
    for (std::string& g : got) g = trim(g);
    if (lineno == 1 && !got.empty() && got[0].rfind("\xEF\xBB\xBF", 0) == 0) {
      got[0] = got[0].substr(3);  // UTF-8 byte order mark
    }
    if (got != header) {
      throw InputError("line " + std::to_string(lineno) + ": expected header '" +
                       join(header) + "', got '" + trim(line) + "'");
    }
    have_header = true;
  }
  if (!have_header) throw InputError("empty input: missing header");

  const std::size_t k = header.size();
  std::vector<double> values;
  Eigen::Index rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split(line, ',');
    if (cells.size() != k) {
      throw InputError("line " + std::to_string(lineno) + ": expected " +
                       std::to_string(k) + " fields, got " +
                       std::to_string(cells.size()));
    }
    for (std::size_t j = 0; j < k; ++j) {
      double v = 0.0;
      if (!parse_double(cells[j], v) || !std::isfinite(v)) {
        throw InputError("line " + std::to_string(lineno) + ": column '" +
                         header[j] + "' is not a finite number: '" +
                         trim(cells[j]) + "'");
      }
      if (require_positive && !(v > 0.0)) {
        throw InputError("line " + std::to_string(lineno) + " (row " +
                         std::to_string(rows + 1) + "): column '" + header[j] +
                         "' must be > 0, got " + trim(cells[j]));
      }
      values.push_back(v);
    }
    ++rows;
  }
  SampleMatrix m(rows, static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      m(i, static_cast<Eigen::Index>(j)) = values[i * k + j];
    }
  }
  return m;
}

void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const SampleMatrix& data) {
  std::string buf = join(header) + '\n';
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
      if (j > 0) buf += ',';
      buf += format_double(data(i, j));
    }
    buf += '\n';
    if (buf.size() > (1u << 16)) {
      out << buf;
      buf.clear();
    }
  }
  out << buf;
}

std::vector<double> parse_list(const std::string& text,
                               const std::string& what) {
  std::vector<double> out;
  for (const std::string& cell : split(text, ',')) {
    double v = 0.0;
    if (!parse_double(cell, v)) {
      throw InputError(what + ": cannot parse '" + trim(cell) + "' as a number");
    }
    out.push_back(v);
  }
  return out;
}

std::string ParamsDocument::dump() const {
  nlohmann::json j;
  j["model"] = model;
  if (!mode.empty()) j["mode"] = mode;
  nlohmann::json p = nlohmann::json::object();
  for (const auto& [k, v] : params) p[k] = v;
  j["params"] = p;
  if (loglik) {
    j["loglik"] = *loglik;
  } else {
    j["loglik"] = nullptr;
  }
  j["meta"] = meta;
  return canonical_dump(j) + "\n";
}

ParamsDocument ParamsDocument::parse(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("params JSON must be an object");
  ParamsDocument d;
  const nlohmann::json* params = &j;
  if (j.contains("params")) {
    params = &j["params"];
    if (!params->is_object()) throw InputError("'params' must be an object");
    if (j.contains("model")) {
      if (!j["model"].is_string()) throw InputError("'model' must be a string");
      d.model = j["model"].get<std::string>();
    }
    if (j.contains("mode")) {
      if (!j["mode"].is_string()) throw InputError("'mode' must be a string");
      d.mode = j["mode"].get<std::string>();
    }
    if (j.contains("loglik") && !j["loglik"].is_null()) {
      if (!j["loglik"].is_number()) throw InputError("'loglik' must be a number");
      d.loglik = j["loglik"].get<double>();
    }
    if (j.contains("meta")) d.meta = j["meta"];
  }
  for (auto it = params->begin(); it != params->end(); ++it) {
    if (!it.value().is_number()) {
      throw InputError("parameter '" + it.key() + "' must be a number");
    }
    d.params[it.key()] = it.value().get<double>();
  }
  return d;
}

double ParamsDocument::get(const std::string& key) const {
  auto it = params.find(key);
  if (it == params.end()) {
    throw InputError("missing parameter '" + key + "'");
  }
  return it->second;
}

ParamsDocument read_params_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open params file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParamsDocument::parse(ss.str());
}

}  // namespace multivec
