/* Copyright 2026 The Spinprobe Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

namespace spinprobe {

// Execution policy for the batch kernels (slot bundles, restarts, grid
// scans, Monte-Carlo runs).  Serial is the reference path kept for testing;
// results must be identical either way, so every work item owns its output
// slot and no reduction depends on scheduling order.
enum class Exec { serial, parallel };

// True when a kernel should open an OpenMP region: policy says parallel and
// we are not already inside one (no nested pools).
bool omp_active(Exec exec);

int thread_count();

}  // namespace spinprobe
