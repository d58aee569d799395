#pragma once

// Library umbrella header (everything except the command-line front end).

#include "ratio_rmt/numerics.hpp"
#include "ratio_rmt/interpolation.hpp"
#include "ratio_rmt/random.hpp"
#include "ratio_rmt/ensemble.hpp"
#include "ratio_rmt/analytic.hpp"
#include "ratio_rmt/density_cache.hpp"
#include "ratio_rmt/statistics.hpp"
#include "ratio_rmt/oracle.hpp"
#include "ratio_rmt/fitting.hpp"
#include "ratio_rmt/spectra.hpp"
#include "ratio_rmt/ratio_io.hpp"
#include "ratio_rmt/validation.hpp"
