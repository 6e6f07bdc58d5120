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

#include <cstdint>
#include <random>

namespace spinprobe {

// splitmix64 step; used to spread (seed, index) pairs into independent
// engine seeds so that parallel and serial execution draw the same streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index);

}  // namespace spinprobe
