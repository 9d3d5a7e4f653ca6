// Copyright 2026 The PGKET Authors
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

#ifndef PGKET_PGKET_HPP_
#define PGKET_PGKET_HPP_

#include "pgket/autodiff.hpp"
#include "pgket/checkpoint.hpp"
#include "pgket/coherent.hpp"
#include "pgket/data.hpp"
#include "pgket/errors.hpp"
#include "pgket/experiment.hpp"
#include "pgket/fock.hpp"
#include "pgket/graph.hpp"
#include "pgket/kernel.hpp"
#include "pgket/linalg.hpp"
#include "pgket/mesh.hpp"
#include "pgket/model.hpp"
#include "pgket/nn.hpp"
#include "pgket/optim.hpp"
#include "pgket/rng.hpp"
#include "pgket/synth.hpp"
#include "pgket/tensor.hpp"
#include "pgket/train.hpp"

#endif  // PGKET_PGKET_HPP_
