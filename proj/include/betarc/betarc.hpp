#pragma once

// Umbrella header for the betarc library.

#include "betarc/betadist.hpp"
#include "betarc/diagnostics.hpp"
#include "betarc/dynamics.hpp"
#include "betarc/errors.hpp"
#include "betarc/estimation.hpp"
#include "betarc/links.hpp"
#include "betarc/model.hpp"
#include "betarc/montecarlo.hpp"
#include "betarc/optimize.hpp"
#include "betarc/parallel.hpp"
#include "betarc/report.hpp"
#include "betarc/rng.hpp"
