#pragma once

/* Umbrella header: the whole toolkit. */

#include "errors.hpp"
#include "rng.hpp"
#include "membership.hpp"
#include "operators.hpp"
#include "dataset.hpp"
#include "fis.hpp"
#include "rulegen.hpp"
#include "genome.hpp"
#include "evolution.hpp"
#include "gradient.hpp"
#include "experiment.hpp"
