#pragma once

#include "cauchy.hpp"
#include "config.hpp"
#include "exact.hpp"
#include "experiments.hpp"
#include "measures.hpp"
#include "numeric.hpp"
#include "rng.hpp"
#include "spectral.hpp"
#include "stats.hpp"
#include "stickbreak.hpp"
#include "transforms.hpp"
