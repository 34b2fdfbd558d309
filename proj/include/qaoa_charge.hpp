// Copyright 2026 The qaoa-charge Authors
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

#include "qaoa_charge/bits.hpp"
#include "qaoa_charge/convert.hpp"
#include "qaoa_charge/error.hpp"
#include "qaoa_charge/exact.hpp"
#include "qaoa_charge/hardware.hpp"
#include "qaoa_charge/ising.hpp"
#include "qaoa_charge/model.hpp"
#include "qaoa_charge/noise.hpp"
#include "qaoa_charge/numfmt.hpp"
#include "qaoa_charge/optimize.hpp"
#include "qaoa_charge/parallel.hpp"
#include "qaoa_charge/random.hpp"
#include "qaoa_charge/report.hpp"
#include "qaoa_charge/sim.hpp"
