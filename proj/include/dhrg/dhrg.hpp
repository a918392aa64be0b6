#pragma once

#include "hypgeom.hpp"
#include "tessellation.hpp"
#include "tile_distance.hpp"
#include "tally_counter.hpp"
#include "random.hpp"
#include "parallel.hpp"
#include "model.hpp"
#include "likelihood.hpp"
#include "local_search.hpp"
#include "convert.hpp"
#include "routing.hpp"
#include "io.hpp"

namespace dhrg {
inline constexpr const char* kVersion = "0.1.0";
}
