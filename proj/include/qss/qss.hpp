#pragma once

#include "qss/analysis.hpp"
#include "qss/densities.hpp"
#include "qss/physicality.hpp"
#include "qss/quantum.hpp"
#include "qss/rng.hpp"
#include "qss/samplers.hpp"
#include "qss/simplex.hpp"
