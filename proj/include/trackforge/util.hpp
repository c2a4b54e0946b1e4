// Copyright 2026 The Trackforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace trackforge {

std::string_view trim(std::string_view s);
std::optional<double> parse_double(std::string_view s);

// Shortest representation that round-trips exactly; `nan`/`inf` spelled out.
std::string format_double(double v);

// SplitMix64 finalizer; derives independent stream seeds from a master seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Worker count from TRACKFORGE_THREADS (0 or unset = hardware concurrency).
std::size_t worker_count();

// Runs body(i) for i in [0, n). Each index is visited exactly once; callers
// write results into pre-sized slots so the outcome is schedule independent.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace trackforge
