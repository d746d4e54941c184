#pragma once

// Umbrella header for the con2prim library.

#include "rmhd/bench.hpp"
#include "rmhd/diagnostics.hpp"
#include "rmhd/eos.hpp"
#include "rmhd/master.hpp"
#include "rmhd/recovery.hpp"
#include "rmhd/state.hpp"
