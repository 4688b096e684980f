#pragma once

// Umbrella header for the topochain library.

#include "topochain/config.hpp"
#include "topochain/dynamics.hpp"
#include "topochain/ensemble.hpp"
#include "topochain/errors.hpp"
#include "topochain/io.hpp"
#include "topochain/model.hpp"
#include "topochain/numerics.hpp"
#include "topochain/pump.hpp"
#include "topochain/topo.hpp"
#include "topochain/types.hpp"
#include "topochain/version.hpp"
