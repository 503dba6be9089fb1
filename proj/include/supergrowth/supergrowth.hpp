#pragma once
/// Umbrella header.

#include "supergrowth/rng.hpp"
#include "supergrowth/model.hpp"
#include "supergrowth/stats.hpp"
#include "supergrowth/parallel.hpp"
#include "supergrowth/io.hpp"
#include "supergrowth/motion.hpp"
#include "supergrowth/schroedinger.hpp"
#include "supergrowth/branching.hpp"
#include "supergrowth/superprocess.hpp"
#include "supergrowth/cumulant_pde.hpp"
#include "supergrowth/growth.hpp"
#include "supergrowth/config.hpp"
#include "supergrowth/runner.hpp"
#include "supergrowth/acceptance.hpp"
