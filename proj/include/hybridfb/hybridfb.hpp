// SPDX-License-Identifier: Apache-2.0
//
// hybridfb - hybrid statistical/instantaneous feedback for FDD massive MIMO
// Copyright (C) 2026 The hybridfb Authors
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

#include "hybridfb/channel_model.hpp"
#include "hybridfb/classification.hpp"
#include "hybridfb/codebooks.hpp"
#include "hybridfb/common.hpp"
#include "hybridfb/experiment.hpp"
#include "hybridfb/precoding.hpp"
#include "hybridfb/rate_analysis.hpp"
#include "hybridfb/rng.hpp"
#include "hybridfb/scenario.hpp"
