// Copyright 2026 The mrd Authors
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

#ifndef MRD_RNG_H_
#define MRD_RNG_H_

#include <cstdint>

namespace mrd {

// SplitMix64 (Steele, Lea, Flood 2014). State advances by the golden-ratio
// increment; each output is the mixed state. Split(k) seeds an independent
// stream from the mixed value of (seed, k), so stream k of seed s is the same
// on every platform.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    state_ += kGamma;
    return Mix(state_);
  }

  // Uniform on [0, 1) from the top 53 bits.
  double Uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform on [lo, hi].
  double Uniform(double lo, double hi) {
    // Divides by 2^53 - 1 so both endpoints are attainable.
    const double u =
        static_cast<double>((*this)() >> 11) / 9007199254740991.0;
    return lo + (hi - lo) * u;
  }

  SplitMix64 Split(std::uint64_t stream) const {
    return SplitMix64(Mix(state_ ^ Mix(stream + kGamma)));
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t Mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace mrd

#endif  // MRD_RNG_H_
