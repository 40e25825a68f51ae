#pragma once

#include "rbed/agent.hpp"
#include "rbed/config.hpp"
#include "rbed/csv.hpp"
#include "rbed/env.hpp"
#include "rbed/episode.hpp"
#include "rbed/harness.hpp"
#include "rbed/metrics.hpp"
#include "rbed/rng.hpp"
#include "rbed/schedule.hpp"
#include "rbed/svg.hpp"
