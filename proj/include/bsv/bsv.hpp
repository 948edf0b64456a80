/**
 * Copyright 2026 The bsv developers
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include "bsv/complex_matrix.hpp"
#include "bsv/errors.hpp"
#include "bsv/estimators.hpp"
#include "bsv/experiments.hpp"
#include "bsv/linalg.hpp"
#include "bsv/outcomes.hpp"
#include "bsv/rng.hpp"
#include "bsv/samplers.hpp"
#include "bsv/stats.hpp"
