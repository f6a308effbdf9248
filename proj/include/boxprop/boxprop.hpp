// Copyright 2026 The boxprop Authors
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

#include "boxprop/belief_propagation.hpp"
#include "boxprop/bench.hpp"
#include "boxprop/bound_result.hpp"
#include "boxprop/error.hpp"
#include "boxprop/exact.hpp"
#include "boxprop/factor_graph.hpp"
#include "boxprop/ids.hpp"
#include "boxprop/measure.hpp"
#include "boxprop/propagation.hpp"
#include "boxprop/saw_tree.hpp"
#include "boxprop/subtree.hpp"
