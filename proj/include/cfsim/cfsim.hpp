// cfsim - uplink scheduling simulator for dense user-centric cell-free
// massive MIMO networks
// Copyright (C) 2026 The cfsim authors
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
//
// Umbrella header pulling in the whole library.

#pragma once

#include "cfsim/association.hpp"
#include "cfsim/channel.hpp"
#include "cfsim/config.hpp"
#include "cfsim/engine.hpp"
#include "cfsim/experiments.hpp"
#include "cfsim/geometry.hpp"
#include "cfsim/io.hpp"
#include "cfsim/ratealloc.hpp"
#include "cfsim/receiver.hpp"
#include "cfsim/rng.hpp"
#include "cfsim/scheduler.hpp"
#include "cfsim/version.hpp"
