// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "bell_lab/core.hpp"
#include "bell_lab/correlator.hpp"
#include "bell_lab/inequalities.hpp"
#include "bell_lab/models.hpp"
#include "bell_lab/rng.hpp"
#include "bell_lab/search.hpp"
