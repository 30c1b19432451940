// Copyright 2026 The dyexp Authors.
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

#include "dyexp/adahedge.hpp"
#include "dyexp/adversaries.hpp"
#include "dyexp/core.hpp"
#include "dyexp/dying_learners.hpp"
#include "dyexp/error.hpp"
#include "dyexp/experiment.hpp"
#include "dyexp/flipflop.hpp"
#include "dyexp/ftl.hpp"
#include "dyexp/hedge.hpp"
#include "dyexp/instance.hpp"
#include "dyexp/learner.hpp"
#include "dyexp/numeric.hpp"
#include "dyexp/oracle.hpp"
#include "dyexp/quantile.hpp"
#include "dyexp/rng.hpp"
#include "dyexp/verify.hpp"
