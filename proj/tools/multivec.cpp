// Copyright 2026 The multivec Authors.
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "multivec/cli.hpp"

int main(int argc, char** argv) {
  return multivec::run_cli(argc, argv, std::cout, std::cerr);
}
