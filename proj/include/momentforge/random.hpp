// Copyright 2026 The MomentForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MOMENTFORGE_RANDOM_HPP_
#define MOMENTFORGE_RANDOM_HPP_

#include <cstdint>

namespace momentforge {

// SplitMix64.  Chosen over std engines + std distributions because the
// library distributions are implementation-defined; every draw here is
// specified bit for bit, so a seed reproduces on any platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  // +1 or -1 from the top bit.
  double rademacher() { return (next() >> 63) ? 1.0 : -1.0; }

 private:
  std::uint64_t state_;
};

// Independent stream seed for (base, stream id).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// Standard normal quantile by Wichura's AS 241 (PPND16), relative accuracy
// about 1e-16.  p must lie in (0, 1).
double normal_quantile(double p);

// Standard normal draws by inversion: normal_quantile(uniform()).
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : rng_(seed) {}
  double next() { return normal_quantile(rng_.uniform()); }

 private:
  SplitMix64 rng_;
};

}  // namespace momentforge

#endif  // MOMENTFORGE_RANDOM_HPP_
