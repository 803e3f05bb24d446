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

// Steps one session by hand: a passive wearable during the approach earns
// the Basic tier, a PIN entry completes the Full grant, and a failed
// behaviour validation revokes access.

#include <iostream>

#include "mfa/session.hpp"

namespace {

void show(const char *what, const mfa::SessionState &s) {
  std::cout << what << ": phase=" << mfa::to_string(s.phase)
            << " tier=" << mfa::to_string(s.tier) << " terminal=" << mfa::to_string(s.terminal)
            << " score=" << s.score << '\n';
}

} // namespace

int main() {
  const auto catalog = mfa::default_catalog();
  mfa::Policy policy;
  policy.strategy = mfa::Strategy::weighted(1.5);
  policy.weights = {{"ecg", 1.0}, {"pin_code", 1.0}};
  const mfa::SessionModel model(catalog, policy, mfa::ContextModel::defaults().nominal());

  mfa::SessionState s;
  s = mfa::step(s, mfa::EvidenceArrival{{"ecg", true, std::nullopt, 0.8, 30.0}}, model);
  show("wearable ECG", s);
  s = mfa::step(s, mfa::PhaseTimeout{40.0}, model);
  s = mfa::step(s, mfa::EvidenceArrival{{"pin_code", true, std::nullopt, 1.0, 40.5}}, model);
  s = mfa::step(s, mfa::PhaseTimeout{40.5}, model);
  show("after PIN", s);
  s = mfa::step(s, mfa::EvidenceArrival{{"behavior_patterns", false, std::nullopt, 1.0, 190.5}},
                model);
  s = mfa::step(s, mfa::Tick{190.5}, model);
  show("behaviour check", s);
}
