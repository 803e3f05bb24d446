// Copyright 2026 The mfa-fusion Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

// Prints composite FAR/FRR for 1..7 homogeneous factors (FAR 0.03 %,
// FRR 2 %) under All, Any and majority voting, plus the gains of the
// majority rule over a single factor.

#include <array>
#include <iostream>

#include "mfa/reliability.hpp"

int main() {
  const mfa::FactorRates single{0.0003, 0.02};
  const std::array strategies{mfa::SweepStrategy::All, mfa::SweepStrategy::Any,
                              mfa::SweepStrategy::Balanced};
  const auto rows = mfa::sweep_homogeneous(single, strategies, 1, 7);
  mfa::write_sweep_csv(std::cout, rows);

  const auto &last = rows.back();
  std::cout << "\nmajority of 7: FAR gain " << mfa::format_g17(single.far / last.rates.far)
            << ", FRR gain " << mfa::format_g17(single.frr / last.rates.frr) << '\n';
}
