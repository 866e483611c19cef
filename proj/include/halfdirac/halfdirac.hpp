#pragma once

// Umbrella header.

#include "halfdirac/core.hpp"
#include "halfdirac/quadrature.hpp"
#include "halfdirac/kernels.hpp"
#include "halfdirac/bounds.hpp"
#include "halfdirac/potentials.hpp"
#include "halfdirac/certify.hpp"
#include "halfdirac/delta.hpp"
#include "halfdirac/nonrel.hpp"
