// Copyright 2026 The multivec Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef MULTIVEC_IO_HPP_
#define MULTIVEC_IO_HPP_

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "multivec/core.hpp"
#include "multivec/errors.hpp"

namespace multivec {

inline constexpr char kVersion[] = "0.1.0";

/// Malformed user input (CSV, JSON, flag values). The message carries the
/// line number when there is one.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Reads a CSV whose header names exactly the given columns. Blank lines
/// are skipped; a trailing CR is ignored. Cells must parse completely as
/// finite decimals, and when require_positive is set they must be > 0.
/// Errors name the line (1-based, header is line 1).
SampleMatrix read_csv(std::istream& in, const std::vector<std::string>& header,
                      bool require_positive);

/// Header line then one row per observation, values with 17 significant
/// digits so that read_csv returns the same matrix.
void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const SampleMatrix& data);

/// Parses "a,b,c" into doubles; throws InputError naming `what`.
std::vector<double> parse_list(const std::string& text, const std::string& what);

/// Parameters plus provenance, stored as canonical JSON.
struct ParamsDocument {
  std::string model;
  std::string mode;  // empty when not a fit result
  std::map<std::string, double> params;
  std::optional<double> loglik;
  nlohmann::json meta = nlohmann::json::object();

  /// Canonical text: sorted keys, 17-digit numbers, trailing newline.
  std::string dump() const;
  /// Accepts either a full document or a bare {"name": number} object.
  static ParamsDocument parse(const std::string& text);

  /// Throws InputError naming the key when it is absent.
  double get(const std::string& key) const;
};

ParamsDocument read_params_file(const std::string& path);

}  // namespace multivec

#endif  // MULTIVEC_IO_HPP_
