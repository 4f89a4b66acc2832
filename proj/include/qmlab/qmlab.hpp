// Copyright 2026 The qmlab developers
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

#include "qmlab/coherent.hpp"
#include "qmlab/cpmap.hpp"
#include "qmlab/disentangle.hpp"
#include "qmlab/experiment.hpp"
#include "qmlab/json_io.hpp"
#include "qmlab/projective_sampling.hpp"
#include "qmlab/qstate.hpp"
#include "qmlab/tomographic.hpp"
#include "qmlab/version.hpp"
