#pragma once

#include "pedallab/vec2.hpp"
#include "pedallab/errors.hpp"
#include "pedallab/curve_kernel.hpp"
#include "pedallab/pedal_family.hpp"
#include "pedallab/area_centroid.hpp"
#include "pedallab/invariance.hpp"
