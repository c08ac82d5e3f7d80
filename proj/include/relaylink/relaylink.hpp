// SPDX-License-Identifier: Apache-2.0
//
// relaylink: BER analysis and simulation of opportunistic decode-and-forward relaying
// Copyright (C) 2026 The relaylink authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "relaylink/core.hpp"
#include "relaylink/stats.hpp"
#include "relaylink/analytic.hpp"
#include "relaylink/rng.hpp"
#include "relaylink/simlink.hpp"
#include "relaylink/oracle.hpp"
#include "relaylink/experiment.hpp"
#include "relaylink/validate.hpp"
