// qdimer.hpp - convenience umbrella header for the whole library.
//
// Copyright 2026 The qdimer authors
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

#include "qdimer/channels.hpp"
#include "qdimer/errors.hpp"
#include "qdimer/evolve.hpp"
#include "qdimer/liouvillian.hpp"
#include "qdimer/observables.hpp"
#include "qdimer/rate_model.hpp"
#include "qdimer/scenario.hpp"
#include "qdimer/system.hpp"
