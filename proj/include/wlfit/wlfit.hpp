/*
 * wlfit - Residual-weighted 3D Morphable Model landmark fitting.
 *
 * File: include/wlfit/wlfit.hpp
 *
 * Copyright 2026 The wlfit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#ifndef WLFIT_WLFIT_HPP
#define WLFIT_WLFIT_HPP

#include "wlfit/core/error.hpp"
#include "wlfit/core/random.hpp"
#include "wlfit/model/morphable_model.hpp"
#include "wlfit/model/synthetic.hpp"
#include "wlfit/camera/pose.hpp"
#include "wlfit/fitting/weights.hpp"
#include "wlfit/fitting/coefficient_solver.hpp"
#include "wlfit/fitting/contour.hpp"
#include "wlfit/fitting/fit.hpp"
#include "wlfit/metrics/mem.hpp"
#include "wlfit/metrics/benchmark.hpp"
#include "wlfit/io/model_io.hpp"
#include "wlfit/io/pts.hpp"
#include "wlfit/io/obj.hpp"
#include "wlfit/io/report.hpp"

#endif /* WLFIT_WLFIT_HPP */
