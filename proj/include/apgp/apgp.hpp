#pragma once

// Umbrella header: complexity estimation, priors, the surrogate folder,
// the GP classifier, and the experiment harness.

#include "apgp/catalog.hpp"
#include "apgp/errors.hpp"
#include "apgp/experiment.hpp"
#include "apgp/gp.hpp"
#include "apgp/lz_complexity.hpp"
#include "apgp/prior.hpp"
#include "apgp/rna.hpp"
#include "apgp/rng.hpp"
#include "apgp/shape.hpp"
