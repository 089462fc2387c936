// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

// Own entry point: some distributions ship benchmark_main only as LTO bytecode.
BENCHMARK_MAIN();
