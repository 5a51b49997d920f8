// Copyright 2026 The oatmetro Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "oat/collective_ops.hpp"
#include "oat/experiments.hpp"
#include "oat/imperfections.hpp"
#include "oat/metrology.hpp"
#include "oat/rotation.hpp"
#include "oat/spin_state.hpp"
