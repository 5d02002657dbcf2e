// SPDX-License-Identifier: MIT
// Copyright (c) 2026 se23nav contributors
#pragma once

#include "se23nav/bias_update.hpp"
#include "se23nav/earth_models.hpp"
#include "se23nav/errors.hpp"
#include "se23nav/factors.hpp"
#include "se23nav/imu.hpp"
#include "se23nav/increments.hpp"
#include "se23nav/propagation.hpp"
#include "se23nav/se23_core.hpp"
#include "se23nav/serialization.hpp"
#include "se23nav/uncertainty_metrics.hpp"
