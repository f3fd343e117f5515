#pragma once

#include "rcm/colocation.hpp"
#include "rcm/ensemble_cache.hpp"
#include "rcm/error.hpp"
#include "rcm/geometry.hpp"
#include "rcm/grid_index.hpp"
#include "rcm/harness.hpp"
#include "rcm/io_instances.hpp"
#include "rcm/io_partitions.hpp"
#include "rcm/miners.hpp"
#include "rcm/parallel.hpp"
#include "rcm/random.hpp"
#include "rcm/rational.hpp"
#include "rcm/results_io.hpp"
#include "rcm/significance.hpp"
#include "rcm/spatial_core.hpp"
#include "rcm/spatial_types.hpp"
#include "rcm/synthgen.hpp"
