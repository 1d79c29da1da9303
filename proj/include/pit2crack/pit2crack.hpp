#pragma once

// Umbrella header for the pit2crack library: stochastic pitting-corrosion
// morphology generation and multiaxial strain-life fatigue analysis.

#include "pit2crack/errors.hpp"
#include "pit2crack/fatigue.hpp"
#include "pit2crack/heightfield.hpp"
#include "pit2crack/history.hpp"
#include "pit2crack/manifest.hpp"
#include "pit2crack/material.hpp"
#include "pit2crack/meshio.hpp"
#include "pit2crack/pitgen.hpp"
#include "pit2crack/rainflow.hpp"
#include "pit2crack/report.hpp"
#include "pit2crack/rng.hpp"
#include "pit2crack/util.hpp"
#include "pit2crack/validation.hpp"
