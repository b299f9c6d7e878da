#pragma once

// Umbrella header.

#include "projcap/capacity.hpp"
#include "projcap/chebyshev.hpp"
#include "projcap/equilibrium.hpp"
#include "projcap/error.hpp"
#include "projcap/evans.hpp"
#include "projcap/fekete.hpp"
#include "projcap/geometry.hpp"
#include "projcap/measure.hpp"
#include "projcap/parallel.hpp"
#include "projcap/random.hpp"
#include "projcap/sampling.hpp"
#include "projcap/set_spec.hpp"
#include "projcap/version.hpp"
