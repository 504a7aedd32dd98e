// Copyright 2026 The pfrac Authors
// SPDX-License-Identifier: Apache-2.0

#include "pfrac/cli_runner.hpp"

int main(int argc, char** argv) { return pfrac::run_cli(argc, argv); }
