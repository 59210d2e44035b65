#pragma once

// Umbrella header for the pepbayes peptide activity-modeling library.

#include "pepbayes/alphabet.hpp"
#include "pepbayes/chemspace.hpp"
#include "pepbayes/combined.hpp"
#include "pepbayes/csv.hpp"
#include "pepbayes/dataset.hpp"
#include "pepbayes/error.hpp"
#include "pepbayes/eval.hpp"
#include "pepbayes/mcmc.hpp"
#include "pepbayes/mixture.hpp"
#include "pepbayes/motif.hpp"
#include "pepbayes/properties.hpp"
#include "pepbayes/random.hpp"
