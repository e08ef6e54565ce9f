//
// Copyright 2026 The gazedp Authors
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
//

#pragma once

#include "gazedp/cap_optimizer.hpp"
#include "gazedp/error.hpp"
#include "gazedp/gaze_map.hpp"
#include "gazedp/heatmap.hpp"
#include "gazedp/io.hpp"
#include "gazedp/mechanisms.hpp"
#include "gazedp/metrics.hpp"
#include "gazedp/privacy_audit.hpp"
#include "gazedp/random.hpp"
#include "gazedp/run_config.hpp"
#include "gazedp/synthetic.hpp"
