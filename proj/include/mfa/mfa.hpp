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

#pragma once

/// Multi-factor authentication fusion: factor catalog, decision fusion,
/// composite FAR/FRR analytics, trust and context weighting, and the
/// three-phase session simulator.

#include "mfa/config_io.hpp"
#include "mfa/context.hpp"
#include "mfa/error.hpp"
#include "mfa/factor.hpp"
#include "mfa/factor_catalog.hpp"
#include "mfa/fusion.hpp"
#include "mfa/numeric.hpp"
#include "mfa/parallel.hpp"
#include "mfa/reliability.hpp"
#include "mfa/session.hpp"
#include "mfa/simulator.hpp"
#include "mfa/trust_context.hpp"
