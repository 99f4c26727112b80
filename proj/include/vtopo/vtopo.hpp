#pragma once

// Umbrella header for the vessel-topology toolkit.

#include "vtopo/adapters.hpp"
#include "vtopo/ccl.hpp"
#include "vtopo/distance.hpp"
#include "vtopo/draw.hpp"
#include "vtopo/errors.hpp"
#include "vtopo/eval.hpp"
#include "vtopo/fragment.hpp"
#include "vtopo/mask.hpp"
#include "vtopo/metrics.hpp"
#include "vtopo/pcg32.hpp"
#include "vtopo/pnm.hpp"
#include "vtopo/repair.hpp"
#include "vtopo/skeleton.hpp"
