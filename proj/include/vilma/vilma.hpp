// Copyright 2026 The VILMA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "vilma/core.hpp"
#include "vilma/json_io.hpp"
#include "vilma/pauli.hpp"
#include "vilma/povm.hpp"
#include "vilma/maps.hpp"
#include "vilma/circuit.hpp"
#include "vilma/kernels.hpp"
#include "vilma/cone.hpp"
#include "vilma/densesim.hpp"
#include "vilma/parallel.hpp"
#include "vilma/estimation.hpp"
#include "vilma/sdp.hpp"
#include "vilma/varopt.hpp"
