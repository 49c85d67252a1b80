/* Copyright 2026 The rmlab Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include "rmlab/analysis.hpp"
#include "rmlab/braid.hpp"
#include "rmlab/builtins.hpp"
#include "rmlab/commutant.hpp"
#include "rmlab/error.hpp"
#include "rmlab/io.hpp"
#include "rmlab/random.hpp"
#include "rmlab/rmatrix.hpp"
#include "rmlab/search.hpp"
#include "rmlab/table.hpp"
#include "rmlab/tensor.hpp"
