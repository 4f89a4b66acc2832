// Copyright 2026 The qmlab developers
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

// Determines an unknown qutrit state from measurement statistics alone:
// sample pure outcomes, average their projectors, invert the dilution law.

#include <iostream>

#include "qmlab/tomographic.hpp"

int main() {
  using namespace qmlab;

  RandomStream prep(99);
  const DensityMatrix unknown = random_density(3, 2, prep);

  for (const std::size_t n : {1000UL, 10000UL, 100000UL}) {
    const auto run = run_tomography(unknown, n, 42);
    std::cout << "N = " << n
              << "  trace distance to the true state: "
              << run.td_reconstruction_to_input << '\n';
  }
  return 0;
}
