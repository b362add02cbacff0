// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The swarm-mimo-sim authors

#pragma once

#include "channel.hpp"
#include "core.hpp"
#include "geometry.hpp"
#include "mission.hpp"
#include "montecarlo.hpp"
#include "polarization.hpp"
#include "rates.hpp"
#include "sampling.hpp"
#include "spacing.hpp"
#include "special_functions.hpp"
