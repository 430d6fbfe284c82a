// Copyright 2026 The multivec Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef MULTIVEC_JSON_FORMAT_HPP_
#define MULTIVEC_JSON_FORMAT_HPP_

#include <string>

#include "json.hpp"

namespace multivec {

/// Locale-independent "%.17g" rendering of x. Non-finite
/// values render as "inf", "-inf" or "nan".
std::string format_double(double x);

/// Compact JSON with object keys in sorted order and every floating-point
/// number written with 17 significant digits (non-finite numbers become
/// null). Writing, parsing and writing again reproduces the same bytes.
std::string canonical_dump(const nlohmann::json& j);

}  // namespace multivec

#endif  // MULTIVEC_JSON_FORMAT_HPP_
